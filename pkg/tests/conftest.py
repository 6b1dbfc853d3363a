"""Shared oracles and the acceptance summary hook.

The oracles below are deliberately naive: plain nested lists, no numpy, no
library helpers, so they can arbitrate the optimized code paths.
"""

from __future__ import annotations

import itertools
from collections import deque

import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[c]
        terminalreporter.write_line(f"criterion {c:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


# ---------------------------------------------------------------------------
# matrix oracles


def o_mul(a, b, q):
    n = len(a)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(n)) % q for j in range(n)) for i in range(n)
    )


def o_add(a, b, q):
    return tuple(tuple((x + y) % q for x, y in zip(r, s)) for r, s in zip(a, b))


def o_sub(a, b, q):
    return tuple(tuple((x - y) % q for x, y in zip(r, s)) for r, s in zip(a, b))


def o_bracket(a, b, q):
    return o_sub(o_mul(a, b, q), o_mul(b, a, q), q)


def o_det(a):
    """Laplace expansion; fine for m <= 5."""
    n = len(a)
    if n == 1:
        return a[0][0]
    return sum(
        (-1) ** j * a[0][j] * o_det([row[:j] + row[j + 1 :] for row in a[1:]]) for j in range(n)
    )


def o_canon(rows, q):
    return tuple(tuple(int(x) % q for x in r) for r in rows)


def o_identity(m):
    return tuple(tuple(int(i == j) for j in range(m)) for i in range(m))


def brute_sl_count(m: int, q: int) -> int:
    return sum(
        1
        for vals in itertools.product(range(q), repeat=m * m)
        if o_det([list(vals[i * m : (i + 1) * m]) for i in range(m)]) % q == 1
    )


def o_inverse(g, q):
    """Inverse by walking powers (g has finite order in a finite group)."""
    m = len(g)
    eye = o_identity(m)
    prev, cur = eye, g
    while cur != eye:
        prev, cur = cur, o_mul(cur, g, q)
    return prev


def oracle_bfs(gens, q):
    """Distances from I in the Cayley graph of <gens> w.r.t. gens and their inverses."""
    gens = [o_canon(g, q) for g in gens]
    moves = gens + [o_inverse(g, q) for g in gens]
    start = o_identity(len(gens[0]))
    dist = {start: 0}
    dq = deque([start])
    while dq:
        x = dq.popleft()
        for s in moves:
            y = o_mul(x, s, q)
            if y not in dist:
                dist[y] = dist[x] + 1
                dq.append(y)
    return dist


def o_eval(word, gens, q):
    m = len(gens[0])
    acc = o_identity(m)
    gens = [o_canon(g, q) for g in gens]
    for x in word:
        g = gens[abs(x) - 1]
        acc = o_mul(acc, g if x > 0 else o_inverse(g, q), q)
    return acc


@pytest.fixture
def oracle():
    import types

    return types.SimpleNamespace(
        mul=o_mul,
        add=o_add,
        sub=o_sub,
        bracket=o_bracket,
        det=o_det,
        canon=o_canon,
        identity=o_identity,
        inverse=o_inverse,
        bfs=oracle_bfs,
        eval=o_eval,
        sl_count=brute_sl_count,
    )
