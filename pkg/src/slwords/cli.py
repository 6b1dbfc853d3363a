"""Command-line interface: ``slwords {synthesize,verify,diameter,bench,selftest}``.

Problem files are JSON objects::

    {"p": 3, "m": 2, "n": 4,
     "generators": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]],
     "target": [[2, 0], [0, 5]]}

Entries are arbitrary integers and are reduced mod p^n on load.

Exit codes: 0 success, 1 verify mismatch, 2 not generating, 3 parse or
validation error, 4 internal verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    BadIndex,
    InvalidGroupSpec,
    NotGenerating,
    ParseError,
    SLWordsError,
    TooLarge,
    VerificationError,
    WrongDimension,
)
from .lab import bench_lengths, exact_diameter, rows_to_csv
from .residues import GroupSpec, ModMatrix
from .synth import SynthConfig, Synthesizer, verify
from .words import GeneratingSet, format_word, parse_word

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_NOT_GENERATING = 2
EXIT_INVALID = 3
EXIT_INTERNAL = 4

log = logging.getLogger("slwords")


@dataclass
class ProblemFile:
    spec: GroupSpec
    generators: GeneratingSet
    target: ModMatrix | None


def _int(obj: dict, key: str) -> int:
    if key not in obj:
        raise ParseError(f"missing field {key!r}")
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ParseError(f"field {key!r} must be an integer, got {v!r}")
    return v


def parse_matrix(data, m: int, p: int, n: int, what: str = "matrix") -> ModMatrix:
    if not isinstance(data, list) or len(data) != m:
        raise ParseError(f"{what} must be a list of {m} rows")
    for row in data:
        if not isinstance(row, list) or len(row) != m:
            raise ParseError(f"{what}: every row must have {m} entries, got {row!r}")
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
            raise ParseError(f"{what}: entries must be integers, got {row!r}")
    return ModMatrix(data, p, n)


def parse_inline_matrix(text: str, m: int, p: int, n: int) -> ModMatrix:
    """``"a,b;c,d"`` -> 2x2 matrix (rows separated by ``;``)."""
    try:
        rows = [[int(x) for x in r.split(",")] for r in text.replace(" ", "").split(";")]
    except ValueError as exc:
        raise ParseError(f"bad inline matrix {text!r}: {exc}") from None
    return parse_matrix(rows, m, p, n, "target")


def parse_problem(data: dict) -> ProblemFile:
    if not isinstance(data, dict):
        raise ParseError("problem file must be a JSON object")
    p, m, n = _int(data, "p"), _int(data, "m"), _int(data, "n")
    spec = GroupSpec(p, m, n)
    gens = data.get("generators")
    if not isinstance(gens, list) or not gens:
        raise ParseError("'generators' must be a non-empty list of matrices")
    mats = [parse_matrix(g, m, p, n, f"generator {i + 1}") for i, g in enumerate(gens)]
    S = GeneratingSet(spec, mats)
    target = None
    if data.get("target") is not None:
        target = parse_matrix(data["target"], m, p, n, "target")
        if target.det() != 1:
            raise InvalidGroupSpec(f"target has det != 1 mod {p}^{n}")
    return ProblemFile(spec, S, target)


def load_problem(path: str | Path) -> ProblemFile:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return parse_problem(data)


def _target(prob: ProblemFile, inline: str | None) -> ModMatrix:
    if inline is not None:
        t = parse_inline_matrix(inline, prob.spec.m, prob.spec.p, prob.spec.n)
        if t.det() != 1:
            raise InvalidGroupSpec("target has det != 1")
        return t
    if prob.target is None:
        raise ParseError("no target given (use --target or a 'target' field)")
    return prob.target


# ---------------------------------------------------------------------------
# commands


def cmd_synthesize(args) -> int:
    prob = load_problem(args.problem)
    target = _target(prob, args.target)
    config = SynthConfig(n0=args.n0, cache_dir=args.cache)
    t0 = time.perf_counter()
    res = Synthesizer(prob.generators, config).synthesize_detailed(target)
    elapsed = time.perf_counter() - t0
    report = verify(target, res.word, prob.generators)
    if not report.ok:
        raise VerificationError("re-evaluation of the synthesized word does not match the target")
    print(format_word(res.word))
    print(f"raw_length={res.raw_length} reduced_length={len(res.word)}")
    print(f"levels={','.join(map(str, res.levels))} time={elapsed:.3f}s")
    print("verified=yes")
    return EXIT_OK


def cmd_verify(args) -> int:
    prob = load_problem(args.problem)
    target = _target(prob, args.target)
    w = parse_word(args.word)
    report = verify(target, w, prob.generators)
    print(f"raw_length={report.raw_length} reduced_length={report.reduced_length}")
    print(f"verified={'yes' if report.ok else 'no'}")
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_diameter(args) -> int:
    prob = load_problem(args.problem)
    d = exact_diameter(prob.spec, prob.generators, args.budget)
    print(f"diameter={d}")
    return EXIT_OK


def _n_range(text: str) -> tuple[int, int]:
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise ParseError(f"bad --n-range {text!r}; use LO-HI") from None


def cmd_bench(args) -> int:
    lo, hi = _n_range(args.n_range)
    GroupSpec(args.p, args.m, max(lo, 1))
    if lo < 1 or hi < lo:
        raise ParseError(f"empty n range {args.n_range!r}")
    res = bench_lengths(
        args.p,
        args.m,
        lo,
        hi,
        args.trials,
        args.targets,
        args.seed,
        set_size=args.set_size,
        config=SynthConfig(n0=args.n0, cache_dir=args.cache),
        workers=args.workers,
    )
    text = rows_to_csv(res.rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    out = sys.stderr if not args.out else sys.stdout
    for n, L in sorted(res.max_len_by_n().items()):
        raws = [r.raw_max_len for r in res.rows if r.n == n]
        print(f"n={n} max_reduced={L} max_raw={max(raws)}", file=out)
    if res.slope is not None:
        print(f"fitted exponent (n >= {max(4, lo)}): {res.slope:.3f}", file=out)
    print(f"words verified: {res.words_checked}", file=out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import full_suites, quick_suites, run_suites

    t0 = time.perf_counter()
    suites = full_suites() if args.full else quick_suites()
    results = run_suites(suites, print)
    ok = all(r.ok for r in results)
    print(f"{'PASS' if ok else 'FAIL'}: {sum(r.ok for r in results)}/{len(results)} suites in "
          f"{time.perf_counter() - t0:.1f}s")
    return EXIT_OK if ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slwords", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def problem_args(sp):
        sp.add_argument("problem", help="JSON problem file")
        sp.add_argument("--target", help='inline target, rows separated by ";" e.g. "1,1;0,1"')

    sp = sub.add_parser("synthesize", help="find a short word for the target")
    problem_args(sp)
    sp.add_argument("--n0", type=int, default=1, help="highest level served by the base table")
    sp.add_argument("--seed", type=int, default=0, help="accepted for scripting; synthesis is deterministic")
    sp.add_argument("--cache", help="directory for base-table cache files")
    sp.set_defaults(func=cmd_synthesize)

    sp = sub.add_parser("verify", help="check that a word evaluates to the target")
    problem_args(sp)
    sp.add_argument("--word", required=True, help='comma-separated signed letters, e.g. "1,-2"')
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("diameter", help="exact Cayley diameter by BFS")
    sp.add_argument("problem")
    sp.add_argument("--budget", type=int, default=10**6, help="largest group order to search")
    sp.set_defaults(func=cmd_diameter)

    sp = sub.add_parser("bench", help="word-length growth benchmark, CSV output")
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--n-range", default="2-8", help="LO-HI inclusive")
    sp.add_argument("--trials", type=int, default=3, help="generating sets per n")
    sp.add_argument("--targets", type=int, default=20, help="targets per generating set")
    sp.add_argument("--set-size", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n0", type=int, default=1)
    sp.add_argument("--cache")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("selftest", help="run the invariant suites")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true", default=True)
    g.add_argument("--full", action="store_true")
    sp.set_defaults(func=cmd_selftest)
    return ap


def _attach_word_values(argv: list[str]) -> list[str]:
    """Turn ``--word -1,2`` into ``--word=-1,2`` so argparse does not read an option."""
    out: list[str] = []
    it = iter(argv)
    for a in it:
        if a in ("--word", "--target"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    argv = _attach_word_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which collides with "not generating"
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except NotGenerating as exc:
        print(f"error: not generating: {exc}", file=sys.stderr)
        return EXIT_NOT_GENERATING
    except VerificationError as exc:
        print(f"error: internal verification failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ParseError, InvalidGroupSpec, WrongDimension, BadIndex, TooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SLWordsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
