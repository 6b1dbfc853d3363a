"""Hot array kernels over int64 matrices modulo a small q.

Every kernel has a numba ``@njit`` implementation and a pure-numpy fallback.
The numba path is used when numba imports and ``SLWORDS_NO_NUMBA`` is unset
(or ``0``); both variants stay importable as ``<name>_nb`` / ``<name>_np`` so
the benchmark and tests can compare them.

All kernels assume ``m * (q-1)**2 < 2**63`` (checked by :func:`int64_safe`);
callers fall back to Python integers otherwise.
"""

from __future__ import annotations

import os

import numpy as np

INT64_MAX = 2**63 - 1


def _numba_requested() -> bool:
    return os.environ.get("SLWORDS_NO_NUMBA", "0").lower() in ("", "0", "false", "no")


try:
    if not _numba_requested():
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def int64_safe(m: int, q: int) -> bool:
    return m * (q - 1) ** 2 < INT64_MAX


def encodable(m: int, q: int) -> bool:
    return q ** (m * m) <= INT64_MAX


# ---------------------------------------------------------------------------
# numpy implementations


def right_multiply_all_np(frontier: np.ndarray, moves: np.ndarray, q: int) -> np.ndarray:
    """out[i*R + j] = frontier[i] @ moves[j] mod q."""
    F, m, _ = frontier.shape
    R = moves.shape[0]
    out = np.einsum("fik,rkj->frij", frontier, moves) % q
    return out.reshape(F * R, m, m)


def matmul_pairs_np(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    return np.einsum("nik,nkj->nij", a, b) % q


def encode_np(mats: np.ndarray, q: int) -> np.ndarray:
    n, m, _ = mats.shape
    powers = q ** np.arange(m * m, dtype=np.int64)
    return mats.reshape(n, m * m) @ powers


def decode_np(codes: np.ndarray, m: int, q: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    powers = q ** np.arange(m * m, dtype=np.int64)
    return ((codes[:, None] // powers) % q).reshape(-1, m, m)


def eval_word_np(letters: np.ndarray, gens: np.ndarray, invs: np.ndarray, q: int) -> np.ndarray:
    """Left-to-right product of the letters; tree reduction keeps it vectorised."""
    m = gens.shape[1]
    if letters.size == 0:
        return np.eye(m, dtype=np.int64)
    idx = np.abs(letters) - 1
    mats = np.where((letters > 0)[:, None, None], gens[idx], invs[idx])
    eye = np.eye(m, dtype=np.int64)[None]
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, eye])
        mats = matmul_pairs_np(mats[0::2], mats[1::2], q)
    return mats[0]


def free_reduce_np(letters: np.ndarray) -> np.ndarray:
    stack: list[int] = []
    for x in letters.tolist():
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return np.array(stack, dtype=np.int64)


# ---------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True)
    def right_multiply_all_nb(frontier, moves, q):
        F, m, _ = frontier.shape
        R = moves.shape[0]
        out = np.empty((F * R, m, m), dtype=np.int64)
        for f in range(F):
            for r in range(R):
                t = f * R + r
                for i in range(m):
                    for j in range(m):
                        s = 0
                        for k in range(m):
                            s += frontier[f, i, k] * moves[r, k, j]
                        out[t, i, j] = s % q
        return out

    @njit(cache=True)
    def matmul_pairs_nb(a, b, q):
        n, m, _ = a.shape
        out = np.empty((n, m, m), dtype=np.int64)
        for t in range(n):
            for i in range(m):
                for j in range(m):
                    s = 0
                    for k in range(m):
                        s += a[t, i, k] * b[t, k, j]
                    out[t, i, j] = s % q
        return out

    @njit(cache=True)
    def encode_nb(mats, q):
        n, m, _ = mats.shape
        out = np.empty(n, dtype=np.int64)
        for t in range(n):
            c = 0
            for i in range(m - 1, -1, -1):
                for j in range(m - 1, -1, -1):
                    c = c * q + mats[t, i, j]
            out[t] = c
        return out

    @njit(cache=True)
    def decode_nb(codes, m, q):
        n = codes.shape[0]
        out = np.empty((n, m, m), dtype=np.int64)
        for t in range(n):
            c = codes[t]
            for i in range(m):
                for j in range(m):
                    out[t, i, j] = c % q
                    c //= q
        return out

    @njit(cache=True)
    def eval_word_nb(letters, gens, invs, q):
        m = gens.shape[1]
        acc = np.eye(m, dtype=np.int64)
        tmp = np.empty((m, m), dtype=np.int64)
        for x in letters:
            g = gens[x - 1] if x > 0 else invs[-x - 1]
            for i in range(m):
                for j in range(m):
                    s = 0
                    for k in range(m):
                        s += acc[i, k] * g[k, j]
                    tmp[i, j] = s % q
            acc[:, :] = tmp
        return acc

    @njit(cache=True)
    def free_reduce_nb(letters):
        out = np.empty(letters.shape[0], dtype=np.int64)
        top = 0
        for x in letters:
            if top > 0 and out[top - 1] == -x:
                top -= 1
            else:
                out[top] = x
                top += 1
        return out[:top].copy()

    right_multiply_all = right_multiply_all_nb
    matmul_pairs = matmul_pairs_nb
    _encode = encode_nb
    _decode = decode_nb
    _eval_word = eval_word_nb
    _free_reduce = free_reduce_nb
else:
    right_multiply_all = right_multiply_all_np
    matmul_pairs = matmul_pairs_np
    _encode = encode_np
    _decode = decode_np
    _eval_word = eval_word_np
    _free_reduce = free_reduce_np


def encode(mats: np.ndarray, q: int) -> np.ndarray:
    """Row-major base-q code of each matrix (entry (0,0) is the least significant digit)."""
    return _encode(np.ascontiguousarray(mats, dtype=np.int64), q)


def decode(codes: np.ndarray, m: int, q: int) -> np.ndarray:
    return _decode(np.ascontiguousarray(codes, dtype=np.int64), m, q)


def eval_word(letters, gens: np.ndarray, invs: np.ndarray, q: int) -> np.ndarray:
    return _eval_word(np.asarray(letters, dtype=np.int64), gens, invs, q)


def free_reduce_array(letters) -> np.ndarray:
    return _free_reduce(np.asarray(letters, dtype=np.int64))


def project_codes(codes: np.ndarray, m: int, q_from: int, q_to: int) -> np.ndarray:
    """Re-encode codes modulo a divisor q_to of q_from."""
    return encode(decode(codes, m, q_from) % q_to, q_to)
