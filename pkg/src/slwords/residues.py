"""Exact arithmetic in Z/p^W Z and in m x m matrix rings over it.

Matrices are stored as tuples of rows holding canonical representatives in
``[0, p**W)``.  Python integers are used throughout, so moduli may exceed a
machine word; the array kernels in :mod:`slwords.kernels` take over only when
the modulus is small enough for int64.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidGroupSpec, NotAUnit, Singular

Rows = tuple[tuple[int, ...], ...]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class GroupSpec:
    """Parameters of ``G_n = SL_m(Z/p^n Z)`` with working exponent ``W >= n``."""

    p: int
    m: int
    n: int
    W: int | None = None

    def __post_init__(self) -> None:
        if self.W is None:
            object.__setattr__(self, "W", self.n)
        p, m, n, W = self.p, self.m, self.n, self.W
        if not is_prime(p) or p < 3:
            raise InvalidGroupSpec(f"p must be an odd prime, got {p}")
        if m < 2:
            raise InvalidGroupSpec(f"m must be >= 2, got {m}")
        if not ((m == 2 and p > m) or (m > 2 and p >= m)):
            raise InvalidGroupSpec(f"need p > m = 2 or p >= m > 2, got p={p}, m={m}")
        if n < 1 or W < n:
            raise InvalidGroupSpec(f"need 1 <= n <= W, got n={n}, W={W}")

    @property
    def modulus(self) -> int:
        return self.p**self.n

    def at_level(self, n: int) -> "GroupSpec":
        return GroupSpec(self.p, self.m, n)


# ---------------------------------------------------------------------------
# scalars


def int_valuation(x: int, p: int, W: int) -> int:
    """p-adic valuation of ``x mod p**W``, capped at ``W`` (so v(0) = W)."""
    x %= p**W
    if x == 0:
        return W
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def int_inverse(x: int, q: int) -> int:
    try:
        return pow(x, -1, q)
    except ValueError:
        raise NotAUnit(f"{x} is not a unit modulo {q}") from None


@dataclass(frozen=True)
class ResidueInt:
    """An element of ``Z/p^W Z`` kept in canonical form."""

    value: int
    p: int
    W: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.p**self.W)

    @property
    def modulus(self) -> int:
        return self.p**self.W

    def _coerce(self, other) -> int:
        if isinstance(other, ResidueInt):
            if (other.p, other.W) != (self.p, self.W):
                raise ValueError("residues live in different rings")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def _new(self, v: int) -> "ResidueInt":
        return ResidueInt(v, self.p, self.W)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def __pow__(self, e: int):
        if e < 0:
            return invert_residue(self) ** (-e)
        return self._new(pow(self.value, e, self.modulus))

    def __int__(self) -> int:
        return self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, ResidueInt):
            return (self.value, self.p, self.W) == (other.value, other.p, other.W)
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.p, self.W))

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.p}^{self.W})"


def valuation(x: ResidueInt) -> int:
    return int_valuation(x.value, x.p, x.W)


def invert_residue(x: ResidueInt) -> ResidueInt:
    if x.value % x.p == 0:
        raise NotAUnit(f"{x.value} is divisible by {x.p}")
    return ResidueInt(pow(x.value, -1, x.modulus), x.p, x.W)


# ---------------------------------------------------------------------------
# raw integer matrices (tuples of rows); hot-path helpers


def identity_rows(m: int) -> Rows:
    return tuple(tuple(1 if i == j else 0 for j in range(m)) for i in range(m))


def zero_rows(m: int) -> Rows:
    return tuple((0,) * m for _ in range(m))


def reduce_rows(a: Iterable[Iterable[int]], q: int) -> Rows:
    return tuple(tuple(x % q for x in row) for row in a)


def mul_rows(a: Rows, b: Rows, q: int) -> Rows:
    cols = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) % q for col in cols) for row in a)


def add_rows(a: Rows, b: Rows, q: int) -> Rows:
    return tuple(tuple((x + y) % q for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub_rows(a: Rows, b: Rows, q: int) -> Rows:
    return tuple(tuple((x - y) % q for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale_rows(a: Rows, c: int, q: int) -> Rows:
    return tuple(tuple(x * c % q for x in row) for row in a)


def det_int(a: Sequence[Sequence[int]]) -> int:
    """Determinant over Z (Bareiss fraction-free elimination)."""
    m = len(a)
    if m == 1:
        return a[0][0]
    if m == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if m == 3:
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )
    M = [list(r) for r in a]
    sign = 1
    prev = 1
    for k in range(m - 1):
        if M[k][k] == 0:
            for r in range(k + 1, m):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[m - 1][m - 1]


def inv_rows(a: Rows, p: int, q: int) -> Rows:
    """Inverse modulo q = p**W: adjugate for m <= 3, unit-pivot Gauss-Jordan above."""
    m = len(a)
    if m <= 3:
        d = det_int(a) % q
        if d % p == 0:
            raise Singular("determinant is not a unit")
        dinv = pow(d, -1, q)
        if m == 1:
            return ((dinv,),)
        if m == 2:
            (x, y), (z, w) = a
            return ((w * dinv % q, -y * dinv % q), (-z * dinv % q, x * dinv % q))
        adj = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                r = [k for k in range(3) if k != j]
                c = [k for k in range(3) if k != i]
                minor = a[r[0]][c[0]] * a[r[1]][c[1]] - a[r[0]][c[1]] * a[r[1]][c[0]]
                adj[i][j] = (-1) ** (i + j) * minor
        return tuple(tuple(x * dinv % q for x in row) for row in adj)
    M = [list(row) + [1 if i == j else 0 for j in range(m)] for i, row in enumerate(a)]
    for col in range(m):
        piv = next((r for r in range(col, m) if M[r][col] % p), None)
        if piv is None:
            raise Singular("no unit pivot; determinant is not a unit")
        M[col], M[piv] = M[piv], M[col]
        inv = pow(M[col][col], -1, q)
        M[col] = [x * inv % q for x in M[col]]
        for r in range(m):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [(x - f * y) % q for x, y in zip(M[r], M[col])]
    return tuple(tuple(row[m:]) for row in M)


def rows_level(a: Rows, p: int, W: int) -> int:
    """Largest k <= W with a = I mod p**k."""
    m = len(a)
    v = W
    for i in range(m):
        for j in range(m):
            x = a[i][j] - (1 if i == j else 0)
            if x:
                v = min(v, int_valuation(x, p, W))
                if v == 0:
                    return 0
    return v


# ---------------------------------------------------------------------------
# ModMatrix


class ModMatrix:
    """An m x m matrix over ``Z/p^W Z``.  Immutable."""

    __slots__ = ("rows", "p", "W", "q")

    def __init__(self, rows: Iterable[Iterable[int]], p: int, W: int, *, canonical: bool = False):
        q = p**W
        if canonical:
            self.rows = rows  # type: ignore[assignment]
        else:
            rows = tuple(tuple(int(x) % q for x in row) for row in rows)
            m = len(rows)
            if m == 0 or any(len(r) != m for r in rows):
                raise ValueError("matrix must be square and non-empty")
            self.rows = rows
        self.p = p
        self.W = W
        self.q = q

    # construction helpers
    @classmethod
    def identity(cls, m: int, p: int, W: int) -> "ModMatrix":
        return cls(identity_rows(m), p, W, canonical=True)

    @classmethod
    def zeros(cls, m: int, p: int, W: int) -> "ModMatrix":
        return cls(zero_rows(m), p, W, canonical=True)

    @classmethod
    def unit(cls, m: int, i: int, j: int, p: int, W: int) -> "ModMatrix":
        """Elementary matrix E_{ij} with 0-based indices."""
        return cls([[1 if (r, c) == (i, j) else 0 for c in range(m)] for r in range(m)], p, W)

    def _like(self, rows: Rows) -> "ModMatrix":
        return type(self)(rows, self.p, self.W, canonical=True)

    @property
    def m(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> ResidueInt:
        return ResidueInt(self.rows[i][j], self.p, self.W)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def _check(self, other: "ModMatrix") -> None:
        if (self.p, self.W, self.m) != (other.p, other.W, other.m):
            raise ValueError(
                f"incompatible matrices: (p, W, m) = {(self.p, self.W, self.m)} vs "
                f"{(other.p, other.W, other.m)}"
            )

    # ring operations
    def __matmul__(self, other: "ModMatrix") -> "ModMatrix":
        self._check(other)
        return ModMatrix(mul_rows(self.rows, other.rows, self.q), self.p, self.W, canonical=True)

    def __add__(self, other: "ModMatrix") -> "ModMatrix":
        self._check(other)
        return self._like(add_rows(self.rows, other.rows, self.q))

    def __sub__(self, other: "ModMatrix") -> "ModMatrix":
        self._check(other)
        return self._like(sub_rows(self.rows, other.rows, self.q))

    def __neg__(self) -> "ModMatrix":
        return self._like(scale_rows(self.rows, -1, self.q))

    def __mul__(self, c) -> "ModMatrix":
        if isinstance(c, ResidueInt):
            c = c.value
        if not isinstance(c, int):
            return NotImplemented
        return self._like(scale_rows(self.rows, c, self.q))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "ModMatrix":
        base = self if e >= 0 else self.inv()
        e = abs(e)
        out = ModMatrix.identity(self.m, self.p, self.W)
        while e:
            if e & 1:
                out = out @ base
            base = base @ base
            e >>= 1
        return out

    def det(self) -> ResidueInt:
        return ResidueInt(det_int(self.rows), self.p, self.W)

    def inv(self) -> "ModMatrix":
        return ModMatrix(inv_rows(self.rows, self.p, self.q), self.p, self.W, canonical=True)

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.m)) % self.q

    def transpose(self) -> "ModMatrix":
        return self._like(tuple(zip(*self.rows)))

    # p-adic structure
    def valuation(self) -> int:
        """Minimum entry valuation (W for the zero matrix)."""
        return min(int_valuation(x, self.p, self.W) for row in self.rows for x in row)

    def is_identity(self) -> bool:
        return self.rows == identity_rows(self.m)

    def is_zero(self) -> bool:
        return not any(x for row in self.rows for x in row)

    def congruence_level(self) -> int:
        return rows_level(self.rows, self.p, self.W)

    def project(self, k: int) -> "ModMatrix":
        if not 0 <= k <= self.W:
            raise ValueError(f"cannot project exponent {self.W} matrix to exponent {k}")
        return ModMatrix(reduce_rows(self.rows, self.p**k), self.p, k, canonical=True)

    def lift(self, W: int) -> "ModMatrix":
        """Reinterpret canonical representatives at a larger exponent."""
        if W < self.W:
            raise ValueError("lift target exponent is smaller; use project")
        return ModMatrix(self.rows, self.p, W, canonical=True)

    def at_exponent(self, W: int) -> "ModMatrix":
        return self.project(W) if W <= self.W else self.lift(W)

    def divide_p_power(self, e: int) -> "ModMatrix":
        """Exact division by p**e; the result lives at exponent W - e."""
        pe = self.p**e
        if any(x % pe for row in self.rows for x in row):
            raise ValueError(f"matrix is not divisible by {self.p}^{e}")
        return ModMatrix(
            tuple(tuple(x // pe for x in row) for row in self.rows), self.p, self.W - e
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModMatrix):
            return NotImplemented
        return self.rows == other.rows and self.p == other.p and self.W == other.W

    def __hash__(self) -> int:
        return hash((self.rows, self.p, self.W))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.tolist()}, p={self.p}, W={self.W})"


def mat_mul(a: ModMatrix, b: ModMatrix) -> ModMatrix:
    return a @ b


def mat_det(a: ModMatrix) -> ResidueInt:
    return a.det()


def mat_inv(a: ModMatrix) -> ModMatrix:
    return a.inv()


def congruence_level(g: ModMatrix) -> int:
    return g.congruence_level()


def project(g: ModMatrix, k: int) -> ModMatrix:
    return g.project(k)


def group_order(spec: GroupSpec) -> int:
    """``|SL_m(Z/p^n Z)|``."""
    p, m, n = spec.p, spec.m, spec.n
    order = p ** ((n - 1) * (m * m - 1)) * p ** (m * (m - 1) // 2)
    for i in range(2, m + 1):
        order *= p**i - 1
    return order


def random_sl(m: int, p: int, W: int, rng: random.Random) -> ModMatrix:
    """Uniform element of SL_m(Z/p^W): uniform matrix, first row scaled by det^-1."""
    q = p**W
    while True:
        rows = [[rng.randrange(q) for _ in range(m)] for _ in range(m)]
        d = det_int(rows) % q
        if d % p:
            dinv = pow(d, -1, q)
            rows[0] = [x * dinv for x in rows[0]]
            return ModMatrix(rows, p, W)
