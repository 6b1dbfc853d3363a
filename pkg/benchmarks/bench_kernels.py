"""Compare the numba and numpy kernel paths, then time one BFS end to end per backend.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The end-to-end part runs in subprocesses so that SLWORDS_NO_NUMBA takes effect
at import time.
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from slwords import kernels


def best_of(fn, repeat):
    fn()  # warm-up (JIT compile for the numba path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    m, q = 3, 27
    frontier = rng.integers(0, q, size=(20_000, m, m), dtype=np.int64)
    moves = rng.integers(0, q, size=(4, m, m), dtype=np.int64)
    pairs = rng.integers(0, q, size=(80_000, m, m), dtype=np.int64)
    codes = kernels.encode_np(pairs, q)
    word = rng.choice(np.array([-2, -1, 1, 2]), size=100_000).astype(np.int64)
    gens, invs = moves[:2].copy(), moves[2:].copy()
    cases = [
        ("right_multiply_all", lambda f: f(frontier, moves, q)),
        ("matmul_pairs", lambda f: f(pairs, pairs, q)),
        ("encode", lambda f: f(pairs, q)),
        ("decode", lambda f: f(codes, m, q)),
        ("eval_word", lambda f: f(word, gens, invs, q)),
        ("free_reduce", lambda f: f(word)),
    ]
    print(f"{'kernel':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, call in cases:
        f_np = getattr(kernels, name + "_np")
        t_np = best_of(lambda: call(f_np), repeat)
        if kernels.HAVE_NUMBA:
            f_nb = getattr(kernels, name + "_nb")
            assert np.array_equal(call(f_np), call(f_nb)), name
            t_nb = best_of(lambda: call(f_nb), repeat)
            print(f"{name:<20}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>10.1f}")
        else:
            print(f"{name:<20}{t_np * 1e3:>12.2f}{'-':>12}{'-':>10}")


E2E = """
import time
from slwords.residues import GroupSpec
from slwords.search import group_bfs
from slwords.words import GeneratingSet
from slwords import kernels
S = GeneratingSet(GroupSpec(5, 2, 3), [[[1, 1], [0, 1]], [[1, 0], [1, 1]]])
group_bfs(S, 2)
t0 = time.perf_counter()
tree = group_bfs(S, 3)
print(kernels.BACKEND, len(tree), tree.radius, time.perf_counter() - t0)
"""


def end_to_end():
    print("\nBFS of SL_2(Z/125) (1.5e6 elements):")
    for flag in ("0", "1"):
        env = dict(os.environ, SLWORDS_NO_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True)
        if out.returncode:
            print(out.stderr)
            continue
        backend, size, radius, secs = out.stdout.split()
        print(f"  {backend:<6} {int(size):>9} elements  radius {radius:>3}  {float(secs):.2f}s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    kernel_table(args.repeat)
    if not args.skip_e2e:
        end_to_end()


if __name__ == "__main__":
    main()
