"""Truncated p-adic logarithm and exponential on the congruence filtration.

For ``g = I + x`` with ``x = 0 mod p^c`` (c >= 1) the series
``log(I + x) = sum (-1)^(j+1) x^j / j`` and ``exp(X) = sum X^j / j!`` converge
p-adically.  Modulo p^K only finitely many terms survive, and each division
by ``j`` (or ``j!``) is carried out exactly: the numerator is computed at a
working exponent ``W = K + s`` so that stripping the p-part of the
denominator still leaves K correct digits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import NotCongruent, NotNilpotentEnough, PrecisionExhausted
from .lie import LieElement, bracket, lift_trace_zero
from .residues import (
    ModMatrix,
    Rows,
    add_rows,
    identity_rows,
    int_valuation,
    mul_rows,
    rows_level,
    sub_rows,
)
from .words import group_commutator


def vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_factorial(n: int, p: int) -> int:
    """Legendre: v_p(n!) = (n - digit_sum_p(n)) / (p - 1)."""
    s, t = 0, n
    while t:
        s += t % p
        t //= p
    return (n - s) // (p - 1)


def _floor_log(n: int, p: int) -> int:
    e = 0
    while p ** (e + 1) <= n:
        e += 1
    return e


@dataclass(frozen=True)
class PrecisionBudget:
    """Series plan: terms 1..J survive mod p^K; numerators are computed mod p^W."""

    K: int
    s: int
    J: int

    @property
    def W(self) -> int:
        return self.K + self.s


def log_budget(p: int, c: int, K: int) -> PrecisionBudget:
    # j*c - floor(log_p j) bounds v(x^j / j) from below and is increasing in j
    j = 1
    while j * c - _floor_log(j, p) < K:
        j += 1
    J = j - 1
    s = max((vp(i, p) for i in range(1, J + 1)), default=0)
    return PrecisionBudget(K, s, J)


def exp_budget(p: int, c: int, K: int) -> PrecisionBudget:
    # j*c - (j-1)/(p-1) bounds v(X^j / j!) from below and is increasing in j
    j = 1
    while j * c * (p - 1) - (j - 1) < K * (p - 1):
        j += 1
    J = j - 1
    return PrecisionBudget(K, vp_factorial(J, p) if J else 0, J)


def _divide_term(num: Rows, p: int, e: int, unit_inv: int, K: int) -> Rows:
    pe = p**e
    qK = p**K
    out = []
    for row in num:
        r = []
        for x in row:
            if x % pe:
                raise PrecisionExhausted(f"series numerator not divisible by {p}^{e}")
            r.append((x // pe) * unit_inv % qK)
        out.append(tuple(r))
    return tuple(out)


def trunc_log(g: ModMatrix, K: int | None = None) -> LieElement:
    """``log(g) mod p^K`` for g = I mod p (result lies in p^c sl_m)."""
    p, m = g.p, g.m
    K = g.W if K is None else K
    if K > g.W:
        raise ValueError(f"g is only known mod {p}^{g.W}, asked for {p}^{K}")
    qK = p**K
    gk = tuple(tuple(x % qK for x in row) for row in g.rows)
    c = rows_level(gk, p, K)
    if c == K:
        return LieElement.zero(m, p, K)
    if c == 0:
        raise NotCongruent("logarithm needs g = I mod p")
    budget = log_budget(p, c, K)
    qW = p**budget.W
    x = sub_rows(gk, identity_rows(m), qW)
    power = x
    acc = tuple((0,) * m for _ in range(m))
    for j in range(1, budget.J + 1):
        if j > 1:
            power = mul_rows(power, x, qW)
        e = vp(j, p)
        u = j // p**e
        inv = pow(u, -1, qK)
        if j % 2 == 0:
            inv = -inv
        acc = add_rows(acc, _divide_term(power, p, e, inv, K), qK)
    return LieElement(acc, p, K, canonical=True)


def trunc_exp(X: ModMatrix, K: int | None = None) -> ModMatrix:
    """``exp(X) mod p^K`` for trace-zero X = 0 mod p."""
    p, m = X.p, X.m
    K = X.W if K is None else K
    if K > X.W:
        raise ValueError(f"X is only known mod {p}^{X.W}, asked for {p}^{K}")
    qK = p**K
    xk = tuple(tuple(v % qK for v in row) for row in X.rows)
    c = min(int_valuation(v, p, K) for row in xk for v in row)
    if c == K:
        return ModMatrix.identity(m, p, K)
    if c == 0:
        raise NotNilpotentEnough("exponential needs X = 0 mod p")
    budget = exp_budget(p, c, K)
    qW = p**budget.W
    power = identity_rows(m)
    acc = identity_rows(m)
    for j in range(1, budget.J + 1):
        power = mul_rows(power, xk, qW)
        e = vp_factorial(j, p)
        fact = 1
        for i in range(2, j + 1):
            fact *= i
        inv = pow(fact // p**e, -1, qK)
        acc = add_rows(acc, _divide_term(power, p, e, inv, K), qK)
    return ModMatrix(acc, p, K, canonical=True)


def random_lie(m: int, p: int, k: int, rng: random.Random) -> LieElement:
    q = p**k
    rows = [[rng.randrange(q) for _ in range(m)] for _ in range(m)]
    return lift_trace_zero(ModMatrix(rows, p, k), k)


@dataclass
class DiagramReport:
    p: int
    m: int
    i: int
    j: int
    k: int
    trials: int = 0
    commutator_failures: int = 0
    perturbation_failures: int = 0
    log_failures: int = 0

    @property
    def ok(self) -> bool:
        return self.trials > 0 and not (
            self.commutator_failures or self.perturbation_failures or self.log_failures
        )

    def __str__(self) -> str:
        return (
            f"p={self.p} m={self.m} (i,j,k)=({self.i},{self.j},{self.k}) trials={self.trials} "
            f"commutator_fail={self.commutator_failures} "
            f"perturbation_fail={self.perturbation_failures} log_fail={self.log_failures}"
        )


def verify_diagram(
    p: int, m: int, i: int, j: int, k: int, trials: int = 500, seed: int = 0
) -> DiagramReport:
    """Check the commutator/bracket correspondence modulo p^(i+j+k) on random lifts.

    For random A, B in sl_m and alpha = exp(p^i A), beta = exp(p^j B):

    * ``{alpha, beta} = I + p^(i+j) [A, B]``,
    * the class is unchanged by alpha -> alpha alpha', beta -> beta beta' with
      alpha' in Gamma_(i+k), beta' in Gamma_(j+k),
    * ``log {alpha, beta} = p^(i+j) [A, B]``.
    """
    if i < 1 or j < 1 or not 1 <= k <= min(i, j):
        raise ValueError(f"need i, j >= 1 and 1 <= k <= min(i, j), got {(i, j, k)}")
    K = i + j + k
    rng = random.Random(seed)
    report = DiagramReport(p, m, i, j, k)
    I = ModMatrix.identity(m, p, K)
    for _ in range(trials):
        A = random_lie(m, p, k, rng).lift(K)
        B = random_lie(m, p, k, rng).lift(K)
        alpha = trunc_exp(A * p**i, K)
        beta = trunc_exp(B * p**j, K)
        expected = I + bracket(A, B) * p ** (i + j)
        comm = group_commutator(alpha, beta)
        if comm != expected:
            report.commutator_failures += 1
        a2 = trunc_exp(random_lie(m, p, K, rng) * p ** (i + k), K)
        b2 = trunc_exp(random_lie(m, p, K, rng) * p ** (j + k), K)
        if group_commutator(alpha @ a2, beta @ b2) != comm:
            report.perturbation_failures += 1
        if trunc_log(comm, K) != bracket(A, B) * p ** (i + j):
            report.log_failures += 1
        report.trials += 1
    return report
