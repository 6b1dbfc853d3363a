"""Invariant suites run by ``slwords selftest``.

Each suite returns a :class:`SuiteResult`; failures are counted, never raised,
so a report always covers every suite.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterator

from .lie import LieElement, bracket, solve_bracket_sl2, solve_two_brackets
from .logexp import random_lie, trunc_exp, trunc_log, verify_diagram
from .residues import GroupSpec, group_order, random_sl
from .synth import SynthConfig, verify
from .lab import random_generating_set


@dataclass
class SuiteResult:
    name: str
    cases: int
    failures: int
    seconds: float

    @property
    def ok(self) -> bool:
        return self.cases > 0 and self.failures == 0

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"[{tag}] {self.name}: {self.cases} cases, {self.failures} failures, {self.seconds:.2f}s"


def all_sl(m: int, p: int, k: int) -> Iterator[LieElement]:
    """Every element of sl_m(Z/p^k): free off-diagonal and first m-1 diagonal entries."""
    q = p**k
    offdiag = [(i, j) for i in range(m) for j in range(m) if i != j]
    for vals in itertools.product(range(q), repeat=m * m - 1):
        rows = [[0] * m for _ in range(m)]
        for (i, j), v in zip(offdiag, vals):
            rows[i][j] = v
        diag = vals[len(offdiag) :]
        for i, v in enumerate(diag):
            rows[i][i] = v
        rows[m - 1][m - 1] = -sum(diag) % q
        yield LieElement(tuple(map(tuple, rows)), p, k, canonical=True)


def _timed(name: str, body: Callable[[], tuple[int, int]]) -> SuiteResult:
    t0 = time.perf_counter()
    cases, failures = body()
    return SuiteResult(name, cases, failures, time.perf_counter() - t0)


def check_single_bracket(p: int, k: int) -> SuiteResult:
    def body():
        n = bad = 0
        for a in all_sl(2, p, k):
            A1, A2 = solve_bracket_sl2(a)
            n += 1
            bad += bracket(A1, A2) != a
        return n, bad

    return _timed(f"single bracket, sl_2 mod {p}^{k} (exhaustive)", body)


def check_two_brackets(m: int, p: int, k: int) -> SuiteResult:
    def body():
        n = bad = 0
        for a in all_sl(m, p, k):
            B1, B2, B3, B4 = solve_two_brackets(a)
            n += 1
            bad += bracket(B1, B2) + bracket(B3, B4) != a
        return n, bad

    return _timed(f"two brackets, sl_{m} mod {p}^{k} (exhaustive)", body)


def check_two_brackets_random(m: int, p: int, k: int, count: int, seed: int = 0) -> SuiteResult:
    def body():
        rng = random.Random(seed)
        bad = 0
        for _ in range(count):
            a = random_lie(m, p, k, rng)
            B1, B2, B3, B4 = solve_two_brackets(a)
            bad += bracket(B1, B2) + bracket(B3, B4) != a
        return count, bad

    return _timed(f"two brackets, sl_{m} mod {p}^{k} ({count} random)", body)


def check_trace_identities(p: int, k: int, count: int, seed: int = 0) -> SuiteResult:
    """[[C,D],C] = 2Tr(CD)C - 2Tr(C^2)D and [[[A,B],A],[A,B]] = -2Tr([A,B]^2)A in sl_2."""

    def body():
        rng = random.Random(seed)
        bad = 0
        for _ in range(count):
            C = random_lie(2, p, k, rng)
            D = random_lie(2, p, k, rng)
            rhs = C * (2 * (C @ D).trace()) - D * (2 * (C @ C).trace())
            bad += bracket(bracket(C, D), C) != rhs
            AB = bracket(C, D)
            bad += bracket(bracket(AB, C), AB) != C * (-2 * (AB @ AB).trace())
        return 2 * count, bad

    return _timed(f"trace identities, sl_2 mod {p}^{k}", body)


def check_diagram(p: int, m: int, i: int, j: int, k: int, trials: int, seed: int = 0) -> SuiteResult:
    def body():
        r = verify_diagram(p, m, i, j, k, trials, seed)
        return r.trials, r.commutator_failures + r.perturbation_failures + r.log_failures

    return _timed(f"commutator diagram p={p} m={m} (i,j,k)=({i},{j},{k})", body)


def check_logexp(p: int, m: int, K: int, count: int, seed: int = 0) -> SuiteResult:
    def body():
        rng = random.Random(seed)
        bad = 0
        for _ in range(count):
            c = rng.randint(1, K - 1)
            X = random_lie(m, p, K - c, rng).lift(K) * p**c
            bad += trunc_log(trunc_exp(X, K), K) != X
            # a random element raised to |SL_m(F_p)| lies in Gamma_1
            h = random_sl(m, p, K, rng) ** group_order(GroupSpec(p, m, 1))
            bad += trunc_exp(trunc_log(h, K), K) != h
        return 2 * count, bad

    return _timed(f"log/exp round trips p={p} m={m} K={K}", body)


def check_synthesis(p: int, m: int, n: int, sets: int, targets: int, seed: int = 0) -> SuiteResult:
    def body():
        spec = GroupSpec(p, m, n)
        rng = random.Random(seed)
        bad = cases = 0
        for _ in range(sets):
            S, syn = random_generating_set(spec, 2, rng, config=SynthConfig())
            for _ in range(targets):
                t = random_sl(m, p, n, rng)
                cases += 1
                bad += not verify(t, syn.synthesize(t), S).ok
        return cases, bad

    return _timed(f"synthesis p={p} m={m} n={n}", body)


def quick_suites() -> list[Callable[[], SuiteResult]]:
    return [
        lambda: check_single_bracket(3, 1),
        lambda: check_single_bracket(3, 2),
        lambda: check_two_brackets(3, 3, 1),
        lambda: check_two_brackets_random(4, 5, 2, 500),
        lambda: check_trace_identities(3, 4, 500),
        lambda: check_diagram(3, 2, 1, 1, 1, 100),
        lambda: check_diagram(5, 3, 2, 2, 2, 50),
        lambda: check_logexp(3, 2, 12, 100),
        lambda: check_logexp(5, 3, 8, 50),
        lambda: check_synthesis(3, 2, 8, 2, 10),
        lambda: check_synthesis(3, 3, 4, 1, 5),
    ]


def full_suites() -> list[Callable[[], SuiteResult]]:
    suites: list[Callable[[], SuiteResult]] = [
        lambda: check_single_bracket(3, 1),
        lambda: check_single_bracket(3, 2),
        lambda: check_two_brackets(3, 3, 1),
    ]
    for m in (3, 4, 5):
        suites.append(lambda m=m: check_two_brackets_random(m, 5, 3, 10_000))
    for p in (3, 5):
        for k in range(1, 7):
            suites.append(lambda p=p, k=k: check_trace_identities(p, k, 10_000))
    for p in (3, 5):
        for i in range(1, 5):
            for j in range(1, 5):
                for k in range(1, min(i, j) + 1):
                    suites.append(lambda p=p, i=i, j=j, k=k: check_diagram(p, 2, i, j, k, 500))
    for p in (3, 5):
        suites.append(lambda p=p: check_logexp(p, 2, 12, 1000))
    suites.append(lambda: check_synthesis(3, 2, 12, 5, 20))
    suites.append(lambda: check_synthesis(3, 3, 6, 2, 10))
    return suites


def run_suites(suites, echo: Callable[[str], None] | None = None) -> list[SuiteResult]:
    out = []
    for s in suites:
        r = s()
        if echo:
            echo(r.line())
        out.append(r)
    return out
