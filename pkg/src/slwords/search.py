"""Cayley-graph search and the base table of exact words for low levels.

Elements of ``G_b = SL_m(Z/p^b)`` are handled as int64 codes (row-major, base
``p^b``) so that visited sets are sorted arrays and every expansion step is a
single kernel call.

Two ways of filling the base table:

* full BFS of ``G_{N0+1}`` when it fits the memory budget; words are
  geodesics, lexicographically smallest among equal length;
* otherwise BFS of ``G_1`` plus, for each level l <= N0, a meet-in-the-middle
  sweep that pairs ball elements agreeing mod p^l, so that ``r^-1 x`` lands in
  ``Gamma_l`` mod p^(l+1).  Classes the sweep misses are filled by closure in
  the abelian quotient ``Gamma_l / Gamma_(l+1)`` and, failing that, by a
  two-sided search for the missing class.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import NotGenerating, TooLarge
from .residues import GroupSpec, ModMatrix, group_order
from .words import GeneratingSet, Word, free_reduce, inverse_word

log = logging.getLogger(__name__)

MAGIC = b"SWBT1"
_HEADER = struct.Struct("<5sQQQQ")


def _require_encodable(m: int, q: int) -> None:
    if not kernels.encodable(m, q):
        raise TooLarge(f"matrices mod {q} of size {m} do not fit an int64 code")


def _member(sorted_codes: np.ndarray, codes: np.ndarray) -> np.ndarray:
    if sorted_codes.size == 0:
        return np.zeros(codes.shape, dtype=bool)
    pos = np.searchsorted(sorted_codes, codes)
    pos[pos == sorted_codes.size] = 0
    return sorted_codes[pos] == codes


@dataclass
class BFSTree:
    """Breadth-first spanning tree of a Cayley graph (or of a ball in it)."""

    m: int
    q: int
    codes: np.ndarray
    parent: np.ndarray
    letter: np.ndarray
    depth: np.ndarray
    complete: bool

    def __len__(self) -> int:
        return int(self.codes.size)

    def word(self, i: int) -> Word:
        out = []
        while self.parent[i] >= 0:
            out.append(int(self.letter[i]))
            i = int(self.parent[i])
        return tuple(reversed(out))

    def all_words(self) -> list[Word]:
        words: list[Word] = [()] * len(self)
        for i in range(1, len(self)):
            words[i] = words[int(self.parent[i])] + (int(self.letter[i]),)
        return words

    @property
    def radius(self) -> int:
        return int(self.depth[-1]) if len(self) else 0

    def mats(self) -> np.ndarray:
        return kernels.decode(self.codes, self.m, self.q)

    def distance_map(self) -> dict[int, int]:
        return dict(zip(self.codes.tolist(), self.depth.tolist()))


def cayley_bfs(
    letters: np.ndarray,
    moves: np.ndarray,
    q: int,
    max_states: int | None = None,
    start: np.ndarray | None = None,
) -> BFSTree:
    """Level-synchronous BFS by right multiplication with ``moves``.

    ``letters`` must be sorted ascending; the frontier is kept in lexicographic
    order of its words, and each new element takes its first candidate in
    (parent rank, letter) order, so stored words are the lexicographically
    smallest geodesics.
    """
    R, m, _ = moves.shape
    _require_encodable(m, q)
    root = np.eye(m, dtype=np.int64)[None] if start is None else start.reshape(1, m, m) % q
    codes = [kernels.encode(root, q)]
    parents = [np.array([-1], dtype=np.int64)]
    lets = [np.array([0], dtype=np.int64)]
    depths = [np.array([0], dtype=np.int64)]
    seen = codes[0].copy()
    frontier_ids = np.array([0], dtype=np.int64)
    frontier = root
    total, d = 1, 0
    complete = True
    while frontier_ids.size:
        cand = kernels.right_multiply_all(np.ascontiguousarray(frontier), moves, q)
        cc = kernels.encode(cand, q)
        fresh = np.flatnonzero(~_member(seen, cc))
        if fresh.size == 0:
            break
        _, first = np.unique(cc[fresh], return_index=True)
        order = fresh[np.sort(first)]
        if max_states is not None and total + order.size > max_states:
            order = order[: max_states - total]
            complete = False
        d += 1
        new_ids = np.arange(total, total + order.size, dtype=np.int64)
        codes.append(cc[order])
        parents.append(frontier_ids[order // R])
        lets.append(letters[order % R])
        depths.append(np.full(order.size, d, dtype=np.int64))
        seen = np.sort(np.concatenate([seen, cc[order]]))
        total += order.size
        frontier_ids = new_ids
        frontier = cand[order]
        if not complete:
            break
    return BFSTree(
        m,
        q,
        np.concatenate(codes),
        np.concatenate(parents),
        np.concatenate(lets),
        np.concatenate(depths),
        complete,
    )


def group_bfs(S: GeneratingSet, level: int, max_states: int | None = None) -> BFSTree:
    letters, moves = S.moves(level)
    return cayley_bfs(letters, moves, S.spec.p**level, max_states)


def bidirectional_search(
    S: GeneratingSet, target: ModMatrix, level: int, max_states: int = 2_000_000
) -> Word:
    """Shortest word evaluating to ``target`` mod p^level by two-sided BFS.

    The forward side grows words ``w`` from the identity; the backward side
    grows words ``u`` with stored value ``target * u^-1``.  A shared code gives
    ``w u``.  The smaller frontier is expanded first.
    """
    m, p = S.spec.m, S.spec.p
    q = p**level
    _require_encodable(m, q)
    letters, moves = S.moves(level)
    # letters are symmetric about 0, so reversing gives each letter's inverse
    inv_moves = np.ascontiguousarray(moves[::-1])
    t = np.array(target.project(level).rows, dtype=np.int64)
    t_code = int(kernels.encode(t[None], q)[0])
    eye = np.eye(m, dtype=np.int64)
    e_code = int(kernels.encode(eye[None], q)[0])
    if t_code == e_code:
        return ()
    fwd: dict[int, Word] = {e_code: ()}
    bwd: dict[int, Word] = {t_code: ()}
    f_front = (eye[None], [()])
    b_front = (t[None], [()])
    let_list = letters.tolist()
    R = len(let_list)
    while f_front[1] and b_front[1]:
        expand_forward = len(f_front[1]) <= len(b_front[1])
        mats, words = f_front if expand_forward else b_front
        mul = moves if expand_forward else inv_moves
        cand = kernels.right_multiply_all(np.ascontiguousarray(mats), mul, q)
        cc = kernels.encode(cand, q).tolist()
        mine, other = (fwd, bwd) if expand_forward else (bwd, fwd)
        new_mats, new_words, hits = [], [], []
        for idx, c in enumerate(cc):
            if c in mine:
                continue
            w = words[idx // R]
            x = let_list[idx % R]
            w = w + (x,) if expand_forward else (x,) + w
            mine[c] = w
            new_mats.append(cand[idx])
            new_words.append(w)
            if c in other:
                hits.append(w + other[c] if expand_forward else other[c] + w)
        if hits:
            return min(hits, key=lambda h: (len(h), h))
        if len(fwd) + len(bwd) > max_states:
            raise TooLarge(f"bidirectional search exceeded {max_states} states")
        front = (np.array(new_mats).reshape(-1, m, m), new_words)
        if expand_forward:
            f_front = front
        else:
            b_front = front
    raise NotGenerating(f"target {target.tolist()} is not reachable mod {p}^{level}")


# ---------------------------------------------------------------------------
# meet-in-the-middle class coverage for Gamma_l / Gamma_(l+1)


def _class_vector(mat: np.ndarray, p: int, level: int) -> list[int]:
    eye = np.eye(mat.shape[0], dtype=np.int64)
    return [int(x) for x in (((mat - eye) // p**level) % p).ravel()]


def _fp_rank_basis(vectors: Sequence[list[int]], p: int) -> list[int]:
    """Indices of a greedy F_p basis among ``vectors``."""
    pivots: list[tuple[int, list[int]]] = []
    chosen = []
    for idx, v in enumerate(vectors):
        v = [x % p for x in v]
        for col, b in pivots:
            if v[col]:
                f = v[col]
                v = [(x - f * y) % p for x, y in zip(v, b)]
        col = next((c for c, x in enumerate(v) if x), None)
        if col is None:
            continue
        inv = pow(v[col], -1, p)
        pivots.append((col, [x * inv % p for x in v]))
        chosen.append(idx)
    return chosen


def congruence_classes(
    S: GeneratingSet, level: int, ball_states: int = 200_000, max_ball: int = 5_000_000
) -> dict[int, Word]:
    """Words for every class of ``Gamma_level / Gamma_(level+1)``.

    Keys are codes mod p^(level+1) of elements ``= I mod p^level``.
    """
    p, m = S.spec.p, S.spec.m
    b = level + 1
    q, ql = p**b, p**level
    _require_encodable(m, q)
    expected = p ** (m * m - 1)
    eye_code = int(kernels.encode(np.eye(m, dtype=np.int64)[None], q)[0])
    cap = ball_states
    while True:
        tree = group_bfs(S, b, max_states=min(cap, group_order(GroupSpec(p, m, b))))
        found = _sweep(S, tree, b, ql)
        found.setdefault(eye_code, ())
        if len(found) < expected:
            found = _pair_fill(found, p, m, level)
        if len(found) < expected:
            found = _abelian_closure(S, found, level)
        if len(found) >= expected:
            return found
        if tree.complete or cap >= max_ball:
            break
        cap *= 4
    # last resort: two-sided search for classes still missing, one at a time
    for _ in range(m * m):
        missing = next(iter(_missing_classes(found, p, m, level)), None)
        if missing is None:
            return found
        w = bidirectional_search(S, missing, b, max_states=max_ball)
        found[int(kernels.encode(np.array([missing.rows], dtype=np.int64), q)[0])] = w
        found = _abelian_closure(S, found, level)
        if len(found) >= expected:
            return found
    raise NotGenerating(
        f"only {len(found)} of {expected} classes of Gamma_{level}/Gamma_{level + 1} reached"
    )


def _sweep(S: GeneratingSet, tree: BFSTree, b: int, ql: int) -> dict[int, Word]:
    m, q = tree.m, tree.q
    cls = kernels.project_codes(tree.codes, m, q, ql)
    order = np.argsort(cls, kind="stable")
    cls_sorted = cls[order]
    starts = np.flatnonzero(np.r_[True, cls_sorted[1:] != cls_sorted[:-1]])
    bucket_of = np.repeat(np.arange(starts.size), np.diff(np.r_[starts, cls_sorted.size]))
    rep_nodes = order[starts]
    bucket_of_node = np.empty(len(tree), dtype=np.int64)
    bucket_of_node[order] = bucket_of
    rep_of_node = rep_nodes[bucket_of_node]
    gens, invs = S.arrays(b)
    rep_inv = np.stack(
        [
            kernels.eval_word(np.array(inverse_word(tree.word(r)), dtype=np.int64), gens, invs, q)
            for r in rep_nodes.tolist()
        ]
    )
    # r^-1 x lies in Gamma_l whenever r = x mod p^l
    prods = kernels.matmul_pairs(rep_inv[bucket_of_node], tree.mats(), q)
    pc = kernels.encode(prods, q)
    length = tree.depth[rep_of_node] + tree.depth
    pick = np.lexsort((np.arange(len(tree)), length))
    _, first = np.unique(pc[pick], return_index=True)
    out: dict[int, Word] = {}
    for node in pick[first].tolist():
        r = int(rep_of_node[node])
        out[int(pc[node])] = free_reduce(inverse_word(tree.word(r)) + tree.word(node))
    return out


def _abelian_closure(S: GeneratingSet, found: dict[int, Word], level: int) -> dict[int, Word]:
    """Add every class reachable as a product of found classes (the quotient is abelian)."""
    p, m = S.spec.p, S.spec.m
    q = p ** (level + 1)
    codes = list(found)
    mats = kernels.decode(np.array(codes, dtype=np.int64), m, q)
    vecs = [_class_vector(x, p, level) for x in mats]
    basis = _fp_rank_basis(vecs, p)
    if not basis:
        return found
    letters = np.arange(1, len(basis) + 1, dtype=np.int64)
    moves = np.ascontiguousarray(mats[basis])
    tree = cayley_bfs(letters, moves, q)
    out = dict(found)
    basis_words = [found[codes[i]] for i in basis]
    words = tree.all_words()
    for code, w in zip(tree.codes.tolist(), words):
        expanded: Word = tuple(x for letter in w for x in basis_words[letter - 1])
        cur = out.get(code)
        if cur is None or len(expanded) < len(cur):
            out[code] = expanded
    return out


def _missing_classes(found: dict[int, Word], p: int, m: int, level: int):
    q = p ** (level + 1)
    for entries in itertools.product(range(p), repeat=m * m - 1):
        A = list(entries) + [0]
        A[-1] = -sum(A[i * m + i] for i in range(m - 1)) % p
        # det(I + p^l A) = 1 + p^l tr(A) = 1 mod p^(l+1) since 2l >= l+1
        g = ModMatrix(
            [[(1 if i == j else 0) + p**level * A[i * m + j] for j in range(m)] for i in range(m)],
            p,
            level + 1,
        )
        code = int(kernels.encode(np.array([g.rows], dtype=np.int64), q)[0])
        if code not in found:
            yield g


def _pair_fill(found: dict[int, Word], p: int, m: int, level: int) -> dict[int, Word]:
    """Fill each missing class with the shortest product of two found classes."""
    q = p ** (level + 1)
    codes = np.array(sorted(found), dtype=np.int64)
    lengths = np.array([len(found[c]) for c in codes.tolist()], dtype=np.int64)
    mats = kernels.decode(codes, m, q)
    # (I + p^l A)^-1 = I - p^l A = 2I - g mod p^(l+1)
    inv = (2 * np.eye(m, dtype=np.int64)[None] - mats) % q
    out = dict(found)
    for target in _missing_classes(found, p, m, level):
        t = np.array(target.rows, dtype=np.int64)[None]
        other = kernels.encode(kernels.right_multiply_all(inv, t, q), q)
        hit = np.flatnonzero(_member(codes, other))
        if hit.size == 0:
            continue
        partner = np.searchsorted(codes, other[hit])
        total = lengths[hit] + lengths[partner]
        best = int(np.argmin(total))
        a, c = int(codes[hit[best]]), int(codes[partner[best]])
        out[int(kernels.encode(t, q)[0])] = free_reduce(found[a] + found[c])
    return out


# ---------------------------------------------------------------------------
# the base table


class BaseTable:
    """Exact words for residue classes at levels ``1 .. top`` (top = N0 + 1).

    The table is a list of records ``(element of G_top, word)`` with
    ``evaluate(word) = element``.  For each level b an index maps a class
    mod p^b to its shortest record (first in record order on ties).

    ``method == "bfs"``: the records are all of ``G_top``, so every level
    indexes the full group.  ``method == "bidirectional"``: level 1 indexes
    ``G_1``; level b >= 2 indexes ``Gamma_(b-1) / Gamma_b`` only.
    """

    def __init__(self, p: int, m: int, top: int, codes: np.ndarray, words: list[Word], method: str):
        self.p, self.m, self.top = p, m, top
        self.codes = np.asarray(codes, dtype=np.int64)
        self.words = list(words)
        self.method = method
        self._index: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._build_index()

    @property
    def n0(self) -> int:
        return self.top - 1

    @property
    def full_level(self) -> int:
        """Highest level at which every element of G has an entry."""
        return self.top if self.method == "bfs" else 1

    def __len__(self) -> int:
        return len(self.words)

    def _build_index(self) -> None:
        p, m, top = self.p, self.m, self.top
        lengths = np.array([len(w) for w in self.words], dtype=np.int64)
        qt = p**top
        for b in range(1, top + 1):
            cls = kernels.project_codes(self.codes, m, qt, p**b)
            ids = np.arange(len(self.words))
            if self.method != "bfs" and b >= 2:
                lower = kernels.project_codes(self.codes, m, qt, p ** (b - 1))
                eye = kernels.encode(np.eye(m, dtype=np.int64)[None], p ** (b - 1))[0]
                ids = ids[lower == eye]
            pick = ids[np.lexsort((ids, lengths[ids]))]
            keys, first = np.unique(cls[pick], return_index=True)
            self._index[b] = (keys, pick[first])

    def coverage(self, level: int) -> int:
        return int(self._index[level][0].size)

    def expected_coverage(self, level: int) -> int:
        if self.method == "bfs" or level == 1:
            return group_order(GroupSpec(self.p, self.m, level))
        return self.p ** (self.m * self.m - 1)

    def is_complete(self) -> bool:
        return all(self.coverage(b) == self.expected_coverage(b) for b in range(1, self.top + 1))

    def record_id(self, g: ModMatrix, level: int) -> int:
        q = self.p**level
        code = kernels.encode(np.array([g.project(level).rows], dtype=np.int64), q)
        keys, ids = self._index[level]
        pos = int(np.searchsorted(keys, code[0]))
        if pos == keys.size or keys[pos] != code[0]:
            raise KeyError(f"no base-table entry for {g.project(level).tolist()} at level {level}")
        return int(ids[pos])

    def lookup(self, g: ModMatrix, level: int) -> Word:
        return self.words[self.record_id(g, level)]

    # persistence ---------------------------------------------------------
    def save(self, path: str | Path) -> None:
        m, qt = self.m, self.p**self.top
        mats = kernels.decode(self.codes, m, qt)
        entry = struct.Struct(f"<{m * m}q")
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, self.p, m, self.top, len(self.words)))
            for mat, w in zip(mats, self.words):
                fh.write(entry.pack(*mat.ravel().tolist()))
                fh.write(struct.pack("<I", len(w)))
                fh.write(struct.pack(f"<{len(w)}i", *w))

    @classmethod
    def load(cls, path: str | Path, S: GeneratingSet | None = None) -> "BaseTable":
        """Read a table file; with ``S`` given, every record is re-verified."""
        data = Path(path).read_bytes()
        magic, p, m, top, count = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        off = _HEADER.size
        entry = struct.Struct(f"<{m * m}q")
        mats = np.empty((count, m, m), dtype=np.int64)
        words: list[Word] = []
        for r in range(count):
            mats[r] = np.array(entry.unpack_from(data, off)).reshape(m, m)
            off += entry.size
            (length,) = struct.unpack_from("<I", data, off)
            off += 4
            words.append(tuple(struct.unpack_from(f"<{length}i", data, off)))
            off += 4 * length
        qt = p**top
        method = "bfs" if count == group_order(GroupSpec(p, m, top)) else "bidirectional"
        if S is not None:
            if (S.spec.p, S.spec.m) != (p, m):
                raise ValueError(f"{path}: table is for p={p}, m={m}")
            gens, invs = S.arrays(top)
            for mat, w in zip(mats, words):
                if not np.array_equal(kernels.eval_word(np.array(w, dtype=np.int64), gens, invs, qt), mat):
                    raise ValueError(f"{path}: record {w} does not evaluate to its element")
        return cls(p, m, top, kernels.encode(mats, qt), words, method)


def table_cache_key(S: GeneratingSet, n0: int) -> str:
    top = min(n0 + 1, S.spec.n)
    gens = ";".join(str(g.project(top).tolist()) for g in S.gens)
    h = hashlib.sha256(f"{S.spec.p}|{S.spec.m}|{n0}|{gens}".encode()).hexdigest()[:16]
    return f"swbt_p{S.spec.p}_m{S.spec.m}_n0{n0}_{h}.bin"


def build_base_table(
    S: GeneratingSet,
    n0: int = 1,
    memory_budget: int = 10**7,
    ball_states: int = 200_000,
) -> BaseTable:
    """Exact words for all classes the synthesis pipeline looks up.

    Raises NotGenerating when search cannot cover the required classes.
    """
    p, m, n = S.spec.p, S.spec.m, S.spec.n
    top = min(n0 + 1, n)
    qt = p**top
    _require_encodable(m, qt)
    order_top = group_order(GroupSpec(p, m, top))
    if order_top <= memory_budget:
        tree = group_bfs(S, top)
        if len(tree) != order_top:
            raise NotGenerating(f"S reaches {len(tree)} of {order_top} elements of G_{top}")
        table = BaseTable(p, m, top, tree.codes, tree.all_words(), "bfs")
        log.debug("full BFS base table: %d elements, radius %d", len(tree), tree.radius)
        return table

    order1 = group_order(GroupSpec(p, m, 1))
    if order1 > memory_budget:
        raise TooLarge(f"|G_1| = {order1} exceeds the memory budget {memory_budget}")
    tree1 = group_bfs(S, 1)
    if len(tree1) != order1:
        raise NotGenerating(f"S reaches {len(tree1)} of {order1} elements of G_1")
    words = tree1.all_words()
    for level in range(1, top):
        words.extend(congruence_classes(S, level, ball_states=ball_states).values())
    gens, invs = S.arrays(top)
    mats = np.stack([kernels.eval_word(np.array(w, dtype=np.int64), gens, invs, qt) for w in words])
    table = BaseTable(p, m, top, kernels.encode(mats, qt), words, "bidirectional")
    if not table.is_complete():
        raise NotGenerating("base table does not cover every required class")
    return table


def load_or_build_base_table(
    S: GeneratingSet,
    n0: int = 1,
    memory_budget: int = 10**7,
    ball_states: int = 200_000,
    cache_dir: str | Path | None = None,
) -> BaseTable:
    if cache_dir is None:
        return build_base_table(S, n0, memory_budget, ball_states)
    path = Path(cache_dir) / table_cache_key(S, n0)
    if path.exists():
        try:
            table = BaseTable.load(path, S.project(min(n0 + 1, S.spec.n)))
            if table.is_complete():
                return table
        except (ValueError, struct.error) as exc:
            log.warning("ignoring unreadable cache %s: %s", path, exc)
    table = build_base_table(S, n0, memory_budget, ball_states)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.save(path)
    return table


def check_words(table: BaseTable, S: GeneratingSet) -> bool:
    """Re-evaluate every record of the table."""
    qt = table.p**table.top
    gens, invs = S.arrays(table.top)
    mats = kernels.decode(table.codes, table.m, qt)
    return all(
        np.array_equal(kernels.eval_word(np.array(w, dtype=np.int64), gens, invs, qt), mat)
        for w, mat in zip(table.words, mats)
    )

