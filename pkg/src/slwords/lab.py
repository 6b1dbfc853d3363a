"""Exact Cayley diameters, sampled worst cases and word-length benchmarks."""

from __future__ import annotations

import csv
import io
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import NotGenerating, TooLarge, VerificationError
from .residues import GroupSpec, ModMatrix, group_order, random_sl
from .search import group_bfs
from .synth import SynthConfig, Synthesizer, verify
from .words import GeneratingSet, format_word

log = logging.getLogger(__name__)

CSV_HEADER = [
    "p",
    "m",
    "n",
    "seed",
    "set_size",
    "max_len",
    "mean_len",
    "diameter",
    "group_order_log",
    "slope_ref",
]


def cell_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(x) for x in parts]).generate_state(1)[0])


def log2_order(spec: GroupSpec) -> float:
    return math.log2(group_order(spec))


def reference_exponent(m: int) -> float:
    """Exponent in the poly-log bound: near 3 for m = 2, near 4 for m > 2."""
    return 3.0 if m == 2 else 4.0


# ---------------------------------------------------------------------------
# diameters


def exact_diameter(spec: GroupSpec, S: GeneratingSet, budget: int = 10**6) -> int:
    """Eccentricity of the identity in Cay(G_n, S u S^-1), i.e. diam(G_n, S)."""
    order = group_order(spec)
    if order > budget:
        raise TooLarge(f"|G_{spec.n}| = {order} exceeds budget {budget}")
    tree = group_bfs(S, spec.n)
    if len(tree) != order:
        raise NotGenerating(f"S reaches {len(tree)} of {order} elements")
    diameter = tree.radius
    # a ball of radius d has at most (2|S|)^d + ... elements
    bound = math.log(order) / math.log(2 * len(S)) - 1 if len(S) else 0.0
    if diameter < bound:
        raise AssertionError(f"diameter {diameter} below counting bound {bound:.3f}")
    return diameter


def distance_table(S: GeneratingSet, level: int) -> dict[int, int]:
    """Word-metric distance from the identity for every element, keyed by code."""
    return group_bfs(S, level).distance_map()


def random_generating_set(
    spec: GroupSpec,
    size: int,
    rng: random.Random,
    *,
    check: str = "table",
    config: SynthConfig | None = None,
    max_tries: int = 1000,
) -> tuple[GeneratingSet, Synthesizer | None]:
    """Rejection-sample ``size`` uniform elements until they generate.

    ``check="table"`` accepts a set once its base table can be built (which
    the synthesizer needs anyway); ``check="bfs"`` demands a BFS covering G_n.
    """
    for _ in range(max_tries):
        S = GeneratingSet(spec, [random_sl(spec.m, spec.p, spec.n, rng) for _ in range(size)])
        try:
            if check == "bfs":
                if len(group_bfs(S, spec.n)) == group_order(spec):
                    return S, None
            else:
                return S, Synthesizer(S, config)
        except NotGenerating:
            pass
    raise NotGenerating(f"no generating set found in {max_tries} draws")


@dataclass
class WorstCase:
    diameter: int
    generators: list[list[list[int]]]
    diameters: list[int]


def worst_case_sample(
    spec: GroupSpec, num_sets: int, seed: int, set_size: int = 2, budget: int = 10**6
) -> WorstCase:
    """Largest exact diameter over ``num_sets`` random generating sets ("sampled worst case")."""
    if group_order(spec) > budget:
        raise TooLarge(f"|G_{spec.n}| exceeds budget {budget}")
    rng = random.Random(seed)
    best: WorstCase | None = None
    diameters = []
    for _ in range(num_sets):
        S, _ = random_generating_set(spec, set_size, rng, check="bfs")
        d = exact_diameter(spec, S, budget)
        diameters.append(d)
        if best is None or d > best.diameter:
            best = WorstCase(d, [g.tolist() for g in S.gens], [])
    if best is None:
        return WorstCase(0, [], [])
    best.diameters = diameters
    return best


# ---------------------------------------------------------------------------
# benchmark


@dataclass
class BenchRow:
    p: int
    m: int
    n: int
    seed: int
    set_size: int
    max_len: int
    mean_len: float
    diameter: int | None
    group_order_log: float
    slope_ref: float
    raw_max_len: int | None = field(default=None, compare=False)

    @property
    def n3(self) -> int:
        return self.n**3

    @property
    def n4(self) -> int:
        return self.n**4


@dataclass
class BenchResult:
    rows: list[BenchRow]
    slope: float | None
    doubling: dict[int, float]
    words_checked: int

    def max_len_by_n(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for r in self.rows:
            out[r.n] = max(out.get(r.n, 0), r.max_len)
        return out


def _bench_cell(args) -> tuple[BenchRow, int]:
    p, m, n, trial, seed, targets, set_size, config, diameter_budget = args
    spec = GroupSpec(p, m, n)
    s = cell_seed(seed, p, m, n, trial)
    rng = random.Random(s)
    S, syn = random_generating_set(spec, set_size, rng, config=config)
    assert syn is not None
    dist = None
    diameter = None
    if group_order(spec) <= diameter_budget:
        dist = distance_table(S, n)
        diameter = max(dist.values())
    lengths, raws = [], []
    q = p**n
    for _ in range(targets):
        target = random_sl(m, p, n, rng)
        res = syn.synthesize_detailed(target)
        report = verify(target, res.word, S)
        if not report.ok:
            raise VerificationError(
                f"counterexample: p={p} m={m} n={n} S={[g.tolist() for g in S.gens]} "
                f"target={target.tolist()} word={format_word(res.word)}"
            )
        if dist is not None:
            code = int(kernels.encode(np.array([target.rows], dtype=np.int64), q)[0])
            if len(res.word) < dist[code]:
                raise VerificationError(
                    f"word of length {len(res.word)} beats BFS distance {dist[code]}"
                )
        lengths.append(len(res.word))
        raws.append(res.raw_length)
    row = BenchRow(
        p,
        m,
        n,
        s,
        set_size,
        max(lengths, default=0),
        float(np.mean(lengths)) if lengths else 0.0,
        diameter,
        log2_order(spec),
        reference_exponent(m),
        max(raws, default=0),
    )
    return row, len(lengths)


def fit_exponent(max_len: dict[int, int], n_min: int = 4) -> float | None:
    """Least-squares slope of log(max length) against log(n) for n >= n_min."""
    pts = [(n, L) for n, L in sorted(max_len.items()) if n >= n_min and L > 0]
    if len(pts) < 2:
        return None
    x = np.log([n for n, _ in pts])
    y = np.log([L for _, L in pts])
    return float(np.polyfit(x, y, 1)[0])


def doubling_ratios(max_len: dict[int, int]) -> dict[int, float]:
    return {n: max_len[2 * n] / max_len[n] for n in sorted(max_len) if 2 * n in max_len and max_len[n]}


def bench_lengths(
    p: int,
    m: int,
    n_lo: int,
    n_hi: int,
    trials: int,
    targets: int,
    seed: int,
    set_size: int = 2,
    config: SynthConfig | None = None,
    diameter_budget: int = 20_000,
    workers: int = 1,
) -> BenchResult:
    """Synthesize and verify words for random sets and targets at each n in [n_lo, n_hi]."""
    config = config or SynthConfig()
    cells = [
        (p, m, n, t, seed, targets, set_size, config, diameter_budget)
        for n in range(n_lo, n_hi + 1)
        for t in range(trials)
    ]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_bench_cell, cells))
    else:
        results = [_bench_cell(c) for c in cells]
    rows = [r for r, _ in results]
    checked = sum(k for _, k in results)
    by_n: dict[int, int] = {}
    for r in rows:
        by_n[r.n] = max(by_n.get(r.n, 0), r.max_len)
    return BenchResult(rows, fit_exponent(by_n, max(4, n_lo)), doubling_ratios(by_n), checked)


# ---------------------------------------------------------------------------
# CSV


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(rows, key=lambda r: (r.p, r.m, r.n, r.seed)):
        w.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
    return buf.getvalue()


def emit_csv(rows: Sequence[BenchRow], path: str | Path) -> None:
    Path(path).write_text(rows_to_csv(rows))


_FLOAT_FIELDS = {"mean_len", "group_order_log", "slope_ref"}


def parse_csv(text: str) -> list[BenchRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for rec in reader:
        if len(rec) != len(CSV_HEADER):
            raise ValueError(f"expected {len(CSV_HEADER)} fields, got {len(rec)}")
        kw = {}
        for name, val in zip(CSV_HEADER, rec):
            if val == "":
                kw[name] = None
            elif name in _FLOAT_FIELDS:
                kw[name] = float(val)
            else:
                kw[name] = int(val)
        out.append(BenchRow(**kw))
    return out


def standard_generators(m: int, p: int, n: int) -> list[ModMatrix]:
    """Upper and lower elementary unipotents I + E_12 and I + E_21."""
    up = ModMatrix.identity(m, p, n) + ModMatrix.unit(m, 0, 1, p, n)
    low = ModMatrix.identity(m, p, n) + ModMatrix.unit(m, 1, 0, p, n)
    return [up, low]
