"""Short words for arbitrary elements of SL_m(Z/p^n) by commutator recursion.

Pipeline for a target T:

1. look up a base-table word ``w0`` for T modulo p^b (b = N0+1 when the table
   is a full BFS of G_b, else b = 1);
2. the residual ``delta = eval(w0)^-1 T`` lies in Gamma_b; while it is not the
   identity, take its level l and realise the class of delta in
   Gamma_l / Gamma_(l+1), append that word and update the residual.  The level
   strictly increases, so at most n - 1 passes are needed.

A class ``I + p^l A`` (A trace-zero mod p) with l > N0 is split as l = k + j,
j = ceil(l/2), k = floor(l/2): A = [A1, A2] (m = 2) or
A = [B1, B2] + [B3, B4] (m > 2), and the class is the commutator (or product of
two commutators) of the classes ``I + p^j A1`` and ``I + p^k A2``, realised
recursively.  Modulo p^(l+1) the commutator of any lifts of those classes is
``I + p^l [A1, A2]``, and a product ``(I + p^l X)(I + p^l Y) = I + p^l (X + Y)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidGroupSpec, VerificationError
from .lie import LieElement, solve_bracket_sl2, solve_two_brackets
from .residues import ModMatrix, Rows, identity_rows, inv_rows, mul_rows, rows_level
from .search import BaseTable, build_base_table, load_or_build_base_table
from .words import GeneratingSet, Word, commutator_rows, commutator_word, evaluate, free_reduce

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthConfig:
    """Tunables for table construction and recursion.

    ``n0`` is the highest level served directly by the base table; the split
    policy (ceil/floor halves) and lifting depth (1) are fixed.
    """

    n0: int = 1
    memory_budget: int = 10**7
    ball_states: int = 200_000
    cache_dir: str | Path | None = None

    def __post_init__(self) -> None:
        if self.n0 < 1:
            raise InvalidGroupSpec(f"n0 must be >= 1, got {self.n0}")


@dataclass(frozen=True)
class SynthResult:
    word: Word
    raw_length: int
    levels: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    raw_length: int
    reduced_length: int


def lie_datum(delta: Rows, level: int, p: int) -> Rows:
    """``(delta - I) / p^level mod p`` for delta = I mod p^level."""
    pl = p**level
    m = len(delta)
    return tuple(
        tuple(((delta[i][j] - (1 if i == j else 0)) // pl) % p for j in range(m)) for i in range(m)
    )


def first_order_lift(A: Rows, level: int, p: int) -> ModMatrix:
    """``I + p^level A`` modulo p^(level+1)."""
    m = len(A)
    return ModMatrix(
        [[(1 if i == j else 0) + p**level * A[i][j] for j in range(m)] for i in range(m)],
        p,
        level + 1,
    )


class Synthesizer:
    """Word synthesis against one generating set; holds the base table and a memo.

    The memo maps ``(level, A)`` to the word realising ``I + p^level A`` and its
    value modulo p^n.  Values of composite words are products of child values,
    which equal the evaluation of the composite word because evaluation is a
    homomorphism.
    """

    def __init__(self, S: GeneratingSet, config: SynthConfig | None = None, table: BaseTable | None = None):
        self.S = S
        self.config = config or SynthConfig()
        spec = S.spec
        self.p, self.m, self.n = spec.p, spec.m, spec.n
        self.q = self.p**self.n
        if table is None:
            table = load_or_build_base_table(
                S,
                self.config.n0,
                self.config.memory_budget,
                self.config.ball_states,
                self.config.cache_dir,
            )
        self.table = table
        self._memo: dict[tuple[int, Rows], tuple[Word, Rows]] = {}
        self._table_values: dict[int, Rows] = {}
        self._eye = identity_rows(self.m)

    # ------------------------------------------------------------------
    def _value(self, w: Word) -> Rows:
        return evaluate(w, self.S, self.n).rows

    def _table_node(self, g: ModMatrix, level: int) -> tuple[Word, Rows]:
        rid = self.table.record_id(g, level)
        if rid not in self._table_values:
            self._table_values[rid] = self._value(self.table.words[rid])
        return self.table.words[rid], self._table_values[rid]

    def _realize(self, level: int, A: Rows) -> tuple[Word, Rows]:
        if not any(x for row in A for x in row):
            return (), self._eye
        key = (level, A)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        p, q = self.p, self.q
        if level <= self.table.n0:
            word, value = self._table_node(first_order_lift(A, level, p), level + 1)
        else:
            k = level // 2
            j = level - k
            a = LieElement(A, p, 1, canonical=True)
            if self.m == 2:
                pairs = [solve_bracket_sl2(a)]
            else:
                B1, B2, B3, B4 = solve_two_brackets(a)
                pairs = [(B1, B2), (B3, B4)]
            parts: list[Word] = []
            value = self._eye
            for X, Y in pairs:
                if X.is_zero() or Y.is_zero():
                    continue
                w1, v1 = self._realize(j, X.rows)
                w2, v2 = self._realize(k, Y.rows)
                parts.append(commutator_word(w1, w2))
                value = mul_rows(value, commutator_rows(v1, v2, p, q), q)
            word = tuple(x for part in parts for x in part)
        target = first_order_lift(A, level, p)
        got = tuple(tuple(x % target.q for x in row) for row in value)
        if got != target.rows:
            raise VerificationError(
                f"level {level}: word value {got} != class {target.rows} mod {p}^{level + 1}"
            )
        self._memo[key] = (word, value)
        return word, value

    # ------------------------------------------------------------------
    def realize_level(self, delta: ModMatrix, level: int) -> Word:
        """Word ``w`` with ``eval(w) = delta mod p^(level+1)`` for delta in Gamma_level."""
        if not 1 <= level < self.n:
            raise ValueError(f"level must lie in [1, {self.n - 1}], got {level}")
        d = delta.project(level + 1)
        if d.congruence_level() < level:
            raise ValueError(f"delta is not congruent to I mod {self.p}^{level}")
        if d.det() != 1:
            raise ValueError("delta must have determinant 1")
        word, _ = self._realize(level, lie_datum(d.rows, level, self.p))
        if evaluate(word, self.S, level + 1) != d:
            raise VerificationError(f"realize_level({level}) produced a wrong word")
        return word

    def synthesize_detailed(self, target: ModMatrix) -> SynthResult:
        p, n, q = self.p, self.n, self.q
        if target.m != self.m or target.p != p or target.W < n:
            raise InvalidGroupSpec(f"target must be a {self.m}x{self.m} matrix mod {p}^{n}")
        t = target.project(n)
        if t.det() != 1:
            raise InvalidGroupSpec("target must have determinant 1")
        b = min(n, self.table.full_level)
        w0, v0 = self._table_node(t, b)
        parts = [w0]
        delta = mul_rows(inv_rows(v0, p, q), t.rows, q)
        levels = []
        level = rows_level(delta, p, n)
        while level < n:
            w, v = self._realize(level, lie_datum(delta, level, p))
            parts.append(w)
            levels.append(level)
            delta = mul_rows(inv_rows(v, p, q), delta, q)
            new_level = rows_level(delta, p, n)
            if new_level <= level:
                raise VerificationError(f"residual level did not increase past {level}")
            level = new_level
        raw = tuple(x for part in parts for x in part)
        word = free_reduce(raw)
        if evaluate(word, self.S, n) != t:
            raise VerificationError("synthesized word does not evaluate to the target")
        return SynthResult(word, len(raw), tuple(levels))

    def synthesize(self, target: ModMatrix) -> Word:
        return self.synthesize_detailed(target).word

    def verify(self, target: ModMatrix, w: Word) -> VerifyReport:
        return verify(target, w, self.S)


def verify(target: ModMatrix, w: Word, S: GeneratingSet) -> VerifyReport:
    n = S.spec.n
    ok = target.W >= n and evaluate(w, S, n) == target.project(n)
    return VerifyReport(ok, len(w), len(free_reduce(w)))


def realize_level(
    delta: ModMatrix,
    level: int,
    S: GeneratingSet,
    table: BaseTable | None = None,
    config: SynthConfig | None = None,
) -> Word:
    return Synthesizer(S, config, table).realize_level(delta, level)


def synthesize(target: ModMatrix, S: GeneratingSet, config: SynthConfig | None = None) -> Word:
    return Synthesizer(S, config).synthesize(target)


__all__ = [
    "SynthConfig",
    "SynthResult",
    "Synthesizer",
    "VerifyReport",
    "build_base_table",
    "realize_level",
    "synthesize",
    "verify",
]
