"""Words over S and S^-1, and their exact evaluation in G_k = SL_m(Z/p^k).

A word is a tuple of nonzero signed generator indices: ``i`` stands for the
i-th generator (1-based) and ``-i`` for its inverse.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import BadIndex, InvalidGroupSpec, ParseError
from .residues import GroupSpec, ModMatrix, identity_rows, inv_rows, mul_rows

Word = tuple[int, ...]


class GeneratingSet:
    """An ordered list of elements of G_n together with their inverses."""

    def __init__(self, spec: GroupSpec, gens: Iterable[ModMatrix | Sequence[Sequence[int]]]):
        self.spec = spec
        p, n, m = spec.p, spec.n, spec.m
        out = []
        for g in gens:
            rows = g.rows if isinstance(g, ModMatrix) else g
            g = ModMatrix(rows, p, n)
            if g.m != m:
                raise InvalidGroupSpec(f"generator has size {g.m}, expected {m}")
            if g.det() != 1:
                raise InvalidGroupSpec(f"generator {g.tolist()} has det != 1 mod {p}^{n}")
            out.append(g)
        if not out:
            raise InvalidGroupSpec("empty generating set")
        self.gens: tuple[ModMatrix, ...] = tuple(out)
        self.inverses: tuple[ModMatrix, ...] = tuple(g.inv() for g in out)
        self._arrays: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def __len__(self) -> int:
        return len(self.gens)

    def letter(self, x: int, k: int | None = None) -> ModMatrix:
        if x == 0 or abs(x) > len(self.gens):
            raise BadIndex(f"letter {x} out of range for {len(self.gens)} generators")
        g = self.gens[x - 1] if x > 0 else self.inverses[-x - 1]
        return g if k is None else g.project(k)

    def arrays(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """(gens, inverses) as int64 arrays modulo p^k."""
        if k not in self._arrays:
            q = self.spec.p**k
            gens = np.array([g.rows for g in self.gens], dtype=np.int64) % q
            invs = np.array([g.rows for g in self.inverses], dtype=np.int64) % q
            self._arrays[k] = (gens, invs)
        return self._arrays[k]

    def moves(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Letters in ascending signed order (-r, ..., -1, 1, ..., r) and their matrices."""
        gens, invs = self.arrays(k)
        r = len(self.gens)
        letters = np.array([-i for i in range(r, 0, -1)] + list(range(1, r + 1)), dtype=np.int64)
        mats = np.concatenate([invs[::-1], gens])
        return letters, mats

    def project(self, k: int) -> "GeneratingSet":
        return GeneratingSet(self.spec.at_level(k), [g.project(k) for g in self.gens])

    @cached_property
    def fingerprint(self) -> str:
        return ";".join(",".join(map(str, r)) for g in self.gens for r in g.rows)

    def __repr__(self) -> str:
        return f"GeneratingSet({self.spec}, {[g.tolist() for g in self.gens]})"


def _check_letters(w: Sequence[int], r: int) -> None:
    for x in w:
        if x == 0 or abs(x) > r:
            raise BadIndex(f"letter {x} out of range for {r} generators")


def evaluate(w: Sequence[int], S: GeneratingSet, k: int | None = None) -> ModMatrix:
    """Product of the letters of ``w`` from left to right, modulo p^k (default p^n)."""
    p, m = S.spec.p, S.spec.m
    k = S.spec.n if k is None else k
    if k > S.spec.n:
        raise ValueError(f"cannot evaluate at exponent {k} > n = {S.spec.n}")
    _check_letters(w, len(S))
    q = p**k
    if kernels.int64_safe(m, q):
        gens, invs = S.arrays(k)
        out = kernels.eval_word(np.asarray(w, dtype=np.int64), gens, invs, q)
        return ModMatrix(tuple(tuple(int(x) for x in row) for row in out), p, k, canonical=True)
    acc = identity_rows(m)
    for x in w:
        acc = mul_rows(acc, S.letter(x).rows, q)
    return ModMatrix(acc, p, k)


def inverse_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*ws: Sequence[int]) -> Word:
    out: list[int] = []
    for w in ws:
        out.extend(w)
    return tuple(out)


def free_reduce(w: Sequence[int]) -> Word:
    """Cancel adjacent ``x, -x`` pairs until none remain."""
    if len(w) < 2:
        return tuple(w)
    return tuple(int(x) for x in kernels.free_reduce_array(w))


def commutator_word(w1: Sequence[int], w2: Sequence[int]) -> Word:
    """Word for ``{g, h} = g^-1 h^-1 g h``; length exactly 2(|w1| + |w2|)."""
    return concat(inverse_word(w1), inverse_word(w2), w1, w2)


def group_commutator(g: ModMatrix, h: ModMatrix) -> ModMatrix:
    return g.inv() @ h.inv() @ g @ h


def commutator_rows(g, h, p: int, q: int):
    """Raw-tuple version of :func:`group_commutator` used on the hot path."""
    gi = inv_rows(g, p, q)
    hi = inv_rows(h, p, q)
    return mul_rows(mul_rows(gi, hi, q), mul_rows(g, h, q), q)


def format_word(w: Sequence[int]) -> str:
    return ",".join(str(x) for x in w)


def parse_word(text: str) -> Word:
    text = text.strip()
    if not text:
        return ()
    try:
        w = tuple(int(t) for t in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise ParseError(f"bad word {text!r}: {exc}") from None
    if any(x == 0 for x in w):
        raise ParseError("letter 0 is not allowed")
    return w
