"""The Lie algebra sl_m over Z/p^k and constructive bracket decompositions.

Two solvers are provided:

* :func:`solve_bracket_sl2` writes any element of sl_2(Z/p^k) as a single
  bracket, using the sl_2 identity ``[[[A,B],A],[A,B]] = -2 Tr([A,B]^2) A``.
* :func:`solve_two_brackets` writes any element of sl_m(Z/p^k) as a sum of two
  brackets, one fixing the diagonal (in a triangular change of basis) and one
  against a diagonal matrix with unit eigenvalue gaps for the off-diagonal
  remainder.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import InvalidGroupSpec, WrongDimension
from .residues import ModMatrix, Rows


class LieElement(ModMatrix):
    """Trace-zero m x m matrix modulo p^k."""

    __slots__ = ()

    def __init__(self, rows, p: int, k: int, *, canonical: bool = False):
        super().__init__(rows, p, k, canonical=canonical)
        if self.trace() != 0:
            raise ValueError(f"trace {self.trace()} != 0 mod {self.p}^{self.W}")

    @property
    def k(self) -> int:
        return self.W

    @classmethod
    def from_matrix(cls, a: ModMatrix) -> "LieElement":
        return cls(a.rows, a.p, a.W, canonical=True)

    @classmethod
    def zero(cls, m: int, p: int, k: int) -> "LieElement":
        return cls(tuple((0,) * m for _ in range(m)), p, k, canonical=True)

    def lift(self, W: int) -> "LieElement":
        """Lift to a larger exponent, keeping the trace exactly zero.

        The last diagonal entry absorbs the trace defect, which is a multiple
        of p^k, so the lift agrees with ``self`` modulo p^k.
        """
        return lift_trace_zero(self, W)


def lift_trace_zero(a: ModMatrix, W: int) -> LieElement:
    q = a.p**W
    rows = [list(r) for r in a.rows]
    m = len(rows)
    rows[m - 1][m - 1] = -sum(rows[i][i] for i in range(m - 1))
    return LieElement(tuple(tuple(x % q for x in r) for r in rows), a.p, W, canonical=True)


def bracket(a: ModMatrix, b: ModMatrix) -> LieElement:
    """``[a, b] = ab - ba``."""
    return LieElement.from_matrix(a @ b - b @ a)


def _unit(m: int, i: int, j: int, p: int, k: int) -> LieElement:
    return LieElement.from_matrix(ModMatrix.unit(m, i, j, p, k))


def solve_bracket_sl2(a: ModMatrix) -> tuple[LieElement, LieElement]:
    """Return ``(A1, A2)`` with ``[A1, A2] = a`` in sl_2(Z/p^k)."""
    if a.m != 2:
        raise WrongDimension(f"solve_bracket_sl2 needs m = 2, got m = {a.m}")
    p, k = a.p, a.W
    if a.is_zero():
        z = LieElement.zero(2, p, k)
        return z, z
    # factor out p^l so that some entry is a unit; solve at exponent k - l
    l = a.valuation()
    ap = LieElement.from_matrix(a.divide_p_power(l))
    kk = k - l
    u, v, w = ap[0, 0], ap[0, 1], ap[1, 0]
    # Tr([a,E12]^2) = 2w^2, Tr([a,E21]^2) = 2v^2, Tr([a,E12+E21]^2) = -8u^2
    if w % p:
        B = _unit(2, 0, 1, p, kk)
    elif v % p:
        B = _unit(2, 1, 0, p, kk)
    else:
        assert u % p, "no unit entry after dividing out the valuation"
        B = _unit(2, 0, 1, p, kk) + _unit(2, 1, 0, p, kk)
    C = bracket(ap, B)
    t = (C @ C).trace()
    assert t % p, "candidate trace is not a unit"
    beta = pow(-2 * t, -1, p**kk)
    A1 = bracket(C, ap) * beta
    A1 = LieElement.from_matrix(A1.lift(k) * p**l)
    A2 = C.lift(k)
    return A1, A2


def reference_diagonal_values(m: int) -> list[int]:
    """(1, -1, 2, -2, ...) for even m, (0, 1, -1, 2, -2, ...) for odd m."""
    vals = [0] if m % 2 else []
    i = 1
    while len(vals) < m:
        vals += [i, -i]
        i += 1
    return vals


def reference_diagonal(m: int, p: int, k: int) -> LieElement:
    lam = reference_diagonal_values(m)
    for i in range(m):
        for j in range(i + 1, m):
            if (lam[i] - lam[j]) % p == 0:
                raise InvalidGroupSpec(
                    f"eigenvalue gap {lam[i] - lam[j]} is not a unit mod {p} (m = {m})"
                )
    q = p**k
    return LieElement(
        tuple(tuple(lam[i] % q if i == j else 0 for j in range(m)) for i in range(m)), p, k
    )


def basis_change(m: int, p: int, k: int) -> tuple[ModMatrix, ModMatrix]:
    """``g`` with columns e1, e1+e2, ..., e1+...+em, and its inverse."""
    g = ModMatrix([[1 if j >= i else 0 for j in range(m)] for i in range(m)], p, k)
    ginv_rows: Rows = tuple(
        tuple(1 if j == i else (-1 if j == i + 1 else 0) for j in range(m)) for i in range(m)
    )
    return g, ModMatrix(ginv_rows, p, k)


def conjugate_by_basis(b: ModMatrix) -> ModMatrix:
    """``b^g := g^T b (g^T)^-1``.

    With this convention ``diag[D^g, E_{i,i+1}^g] = (l_i - l_{i+1})(E_{i+1,i+1} - E_{i,i})``
    for diagonal D = diag(l_1, ..., l_m).
    """
    g, ginv = basis_change(b.m, b.p, b.W)
    return g.transpose() @ b @ ginv.transpose()


@lru_cache(maxsize=64)
def _conjugated_reference(m: int, p: int, k: int) -> tuple[LieElement, tuple[ModMatrix, ...]]:
    """``D^g`` and ``E_{i,i+1}^g`` for i < m-1; these depend only on (m, p, k)."""
    D = reference_diagonal(m, p, k)
    units = tuple(conjugate_by_basis(ModMatrix.unit(m, i, i + 1, p, k)) for i in range(m - 1))
    return LieElement.from_matrix(conjugate_by_basis(D)), units


def solve_two_brackets(
    a: ModMatrix,
) -> tuple[LieElement, LieElement, LieElement, LieElement]:
    """Return ``(B1, B2, B3, B4)`` with ``[B1, B2] + [B3, B4] = a`` in sl_m(Z/p^k)."""
    m, p, k = a.m, a.p, a.W
    q = p**k
    if a.is_zero():
        z = LieElement.zero(m, p, k)
        return z, z, z, z
    lam = reference_diagonal_values(m)
    D = reference_diagonal(m, p, k)

    # diag(a) = sum_i c_i (E_{i+1,i+1} - E_{i,i}) with c_i = -(d_1 + ... + d_i)
    coeffs = []
    acc = 0
    for i in range(m - 1):
        acc += a[i, i]
        coeffs.append(-acc % q)

    B1, e_conj = _conjugated_reference(m, p, k)
    B2 = LieElement.zero(m, p, k)
    for i, c in enumerate(coeffs):
        if c:
            B2 = B2 + LieElement.from_matrix(e_conj[i] * (c * pow(lam[i] - lam[i + 1], -1, q)))

    R = a - bracket(B1, B2)
    assert all(R[i, i] == 0 for i in range(m)), "diagonal step left a residue"
    B4_rows = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i != j and R[i, j]:
                B4_rows[i][j] = R[i, j] * pow(lam[i] - lam[j], -1, q)
    B4 = LieElement(B4_rows, p, k)
    return B1, B2, D, B4
