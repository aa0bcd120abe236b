"""Integer hot loops: union-find labelling and exhaustive table checks.

Every kernel has a numba implementation and a pure-numpy fallback with the
same signature.  The numba path is used when numba imports cleanly and the
environment variable ``GPDATLAS_DISABLE_NUMBA`` is unset or ``0``, and only
for inputs above ``NUMBA_MIN_WORK``: loading the compiled functions costs
about half a second on first use, far more than numpy needs for small cases.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("GPDATLAS_DISABLE_NUMBA", "0") in ("", "0")

NO_WITNESS = (-1, -1, -1)

# elementary steps (edges, or table lookups) below which numpy is used anyway
NUMBA_MIN_WORK = 200_000


# ---------------------------------------------------------------- union-find

def union_find_numpy(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Component labels of the graph on ``range(n)`` with edges ``(u[i], v[i])``.

    Each vertex is labelled by the smallest vertex of its component.
    """
    labels = np.arange(n, dtype=np.int64)
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if n == 0 or u.size == 0:
        return labels
    while True:
        lu = labels[u]
        lv = labels[v]
        live = lu != lv
        if not live.any():
            break
        lu, lv = lu[live], lv[live]
        m = np.minimum(lu, lv)
        np.minimum.at(labels, lu, m)
        np.minimum.at(labels, lv, m)
        # pointer jumping until every label is a root
        while True:
            nxt = labels[labels]
            if np.array_equal(nxt, labels):
                break
            labels = nxt
    return labels


if _HAVE_NUMBA:

    @njit(cache=True)
    def _find(parent, x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            nxt = parent[x]
            parent[x] = root
            x = nxt
        return root

    @njit(cache=True)
    def _union_find_jit(n, u, v):
        parent = np.arange(n)
        for i in range(u.shape[0]):
            a = _find(parent, u[i])
            b = _find(parent, v[i])
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            out[i] = _find(parent, i)
        return out

    @njit(cache=True)
    def _associativity_jit(mul):
        n = mul.shape[0]
        for a in range(n):
            for b in range(n):
                ab = mul[a, b]
                for c in range(n):
                    if mul[ab, c] != mul[a, mul[b, c]]:
                        return a, b, c
        return -1, -1, -1

    @njit(cache=True)
    def _action_jit(mul, act):
        ng, nx = act.shape
        for g in range(ng):
            for h in range(ng):
                gh = mul[g, h]
                for x in range(nx):
                    if act[gh, x] != act[g, act[h, x]]:
                        return g, h, x
        return -1, -1, -1


def union_find_numba(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return _union_find_jit(
        int(n), np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64)
    )


def union_find(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    if USE_NUMBA and len(u) + n >= NUMBA_MIN_WORK:
        return union_find_numba(n, u, v)
    return union_find_numpy(n, u, v)


# ------------------------------------------------------- table verification

def associativity_witness_numpy(mul: np.ndarray) -> tuple[int, int, int]:
    """First triple ``(a, b, c)`` with ``(ab)c != a(bc)``, else ``(-1, -1, -1)``."""
    n = mul.shape[0]
    for a in range(n):
        left = mul[mul[a]]          # left[b, c] = (ab)c
        right = mul[a][mul]         # right[b, c] = a(bc)
        bad = np.argwhere(left != right)
        if bad.size:
            b, c = bad[0]
            return a, int(b), int(c)
    return NO_WITNESS


def associativity_witness_numba(mul: np.ndarray) -> tuple[int, int, int]:
    a, b, c = _associativity_jit(np.ascontiguousarray(mul, dtype=np.int64))
    return int(a), int(b), int(c)


def associativity_witness(mul: np.ndarray) -> tuple[int, int, int]:
    if USE_NUMBA and mul.shape[0] ** 3 >= NUMBA_MIN_WORK:
        return associativity_witness_numba(mul)
    return associativity_witness_numpy(mul)


def action_witness_numpy(mul: np.ndarray, act: np.ndarray) -> tuple[int, int, int]:
    """First ``(g, h, x)`` with ``(gh).x != g.(h.x)``, else ``(-1, -1, -1)``."""
    for g in range(mul.shape[0]):
        left = act[mul[g]]          # left[h, x] = (gh).x
        right = act[g][act]         # right[h, x] = g.(h.x)
        bad = np.argwhere(left != right)
        if bad.size:
            h, x = bad[0]
            return g, int(h), int(x)
    return NO_WITNESS


def action_witness_numba(mul: np.ndarray, act: np.ndarray) -> tuple[int, int, int]:
    g, h, x = _action_jit(
        np.ascontiguousarray(mul, dtype=np.int64), np.ascontiguousarray(act, dtype=np.int64)
    )
    return int(g), int(h), int(x)


def action_witness(mul: np.ndarray, act: np.ndarray) -> tuple[int, int, int]:
    if USE_NUMBA and mul.shape[0] ** 2 * act.shape[1] >= NUMBA_MIN_WORK:
        return action_witness_numba(mul, act)
    return action_witness_numpy(mul, act)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
