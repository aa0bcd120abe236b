"""Exact integer matrices and Smith normal form.

Arithmetic uses Python integers throughout; boundary matrices of nerves
overflow fixed-width integers during reduction.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry grid does not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols_t = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols_t) for r in self.entries),
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_diagonal(self) -> bool:
        return all(v == 0 for i, r in enumerate(self.entries) for j, v in enumerate(r) if i != j)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.entries for v in r)

    def det(self) -> int:
        """Exact determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SmithDecomposition:
    """``u @ A @ v`` is diagonal with entries ``d`` followed by zeros."""

    d: tuple[int, ...]
    u: IntMatrix
    v: IntMatrix

    @property
    def rank(self) -> int:
        return len(self.d)


def _as_rows(A) -> list[list[int]]:
    if isinstance(A, IntMatrix):
        return A.tolist()
    return [[int(x) for x in row] for row in A]


def _dense_snf(M: list[list[int]], m: int, n: int, track: bool):
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        rd, rs = M[dst], M[src]
        for k in range(n):
            if rs[k]:
                rd[k] += q * rs[k]
        if track:
            ud, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ud[k] += q * us[k]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in M:
            if row[src]:
                row[dst] += q * row[src]
        if track:
            for row in V:
                if row[src]:
                    row[dst] += q * row[src]

    d = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = M[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                if M[i][t]:
                    add_row(i, t, -(M[i][t] // p))
                    if M[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if M[t][j]:
                    add_col(j, t, -(M[t][j] // p))
                    if M[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remaining entry of row/column t to the pivot
                cand = [(abs(M[i][t]), i, "r") for i in range(t + 1, m) if M[i][t]]
                cand += [(abs(M[t][j]), j, "c") for j in range(t + 1, n) if M[t][j]]
                _, k, kind = min(cand)
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            if track:
                U[t] = [-x for x in U[t]]
        d.append(M[t][t])
        t += 1
    return d, U, V


def smith_normal_form(A) -> SmithDecomposition:
    """Smith normal form with unimodular transforms ``u``, ``v``."""
    rows = _as_rows(A)
    m = len(rows)
    n = A.cols if isinstance(A, IntMatrix) else (len(rows[0]) if rows else 0)
    d, U, V = _dense_snf(rows, m, n, track=True)
    return SmithDecomposition(tuple(d), IntMatrix.from_rows(U, m), IntMatrix.from_rows(V, n))


def invariant_factors(A) -> tuple[int, ...]:
    """Nonzero invariant factors of a dense integer matrix."""
    rows = _as_rows(A)
    n = A.cols if isinstance(A, IntMatrix) else (len(rows[0]) if rows else 0)
    d, _, _ = _dense_snf(rows, len(rows), n, track=False)
    return tuple(d)


def sparse_invariant_factors(nrows: int, columns: Iterable[dict[int, int]]) -> tuple[int, ...]:
    """Nonzero invariant factors of a sparse matrix given column by column.

    Unit pivots are eliminated first with a fill-aware ordering; whatever is
    left (no entries of absolute value one) goes through the dense routine.
    """
    cols = [dict(c) for c in columns if c]
    for c in cols:
        for r in [r for r, x in c.items() if x == 0]:
            del c[r]
    row_index: dict[int, set[int]] = {}
    for ci, c in enumerate(cols):
        for r in c:
            row_index.setdefault(r, set()).add(ci)
    alive = [bool(c) for c in cols]
    heap = [(len(c), ci) for ci, c in enumerate(cols) if c]
    heapq.heapify(heap)
    ones = 0
    while heap:
        size, ci = heapq.heappop(heap)
        col = cols[ci]
        if not alive[ci] or size != len(col):
            continue
        if not col:
            alive[ci] = False
            continue
        units = [r for r, x in col.items() if x in (1, -1)]
        if not units:
            continue
        r = min(units, key=lambda rr: (len(row_index[rr]), rr))
        a = col[r]
        for cj in sorted(row_index[r] - {ci}):
            other = cols[cj]
            q = other[r] * a
            for rr, x in col.items():
                val = other.get(rr, 0) - q * x
                if val:
                    if rr not in other:
                        row_index[rr].add(cj)
                    other[rr] = val
                elif rr in other:
                    del other[rr]
                    row_index[rr].discard(cj)
            heapq.heappush(heap, (len(other), cj))
        for rr in col:
            row_index[rr].discard(ci)
        del row_index[r]
        alive[ci] = False
        cols[ci] = {}
        ones += 1
    rest = [c for ci, c in enumerate(cols) if alive[ci] and c]
    if not rest:
        return (1,) * ones
    rows_left = sorted({r for c in rest for r in c})
    pos = {r: k for k, r in enumerate(rows_left)}
    dense = [[0] * len(rest) for _ in rows_left]
    for j, c in enumerate(rest):
        for r, x in c.items():
            dense[pos[r]][j] = x
    d, _, _ = _dense_snf(dense, len(rows_left), len(rest), track=False)
    return (1,) * ones + tuple(d)


def is_smith_chain(d: Sequence[int]) -> bool:
    return all(x > 0 for x in d) and all(d[k + 1] % d[k] == 0 for k in range(len(d) - 1))
