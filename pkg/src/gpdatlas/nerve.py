"""Truncated simplicial sets and the weak and strong nerves of an atlas.

Only nondegenerate simplices are stored.  ``faces[k][s, i]`` is the id of
the nondegenerate ``(k-1)``-simplex ``d_i(s)``, or ``-1`` when that face is
degenerate.

The strong nerve is computed on ``i(r(A))``.  A ``k``-chain
``x0 -> x1 -> ... -> xk`` in a connected local groupoid with ``n`` objects
and vertex group of order ``m`` is stored as the integer

    p0 * (n*m)**k + sum_i (p_i * m + v_i) * (n*m)**(k-i)

where ``p_i`` is the position of ``x_i`` among the objects and ``v_i`` the
vertex group coordinate of the ``i``-th arrow.  Chains of all indices are
laid out consecutively and identified along structural functors with a
union-find whose roots are the smallest member, so every class is
represented by its lexicographically first ``(index, chain)``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _kernels
from .atlas.model import Atlas
from .atlas.morphisms import AtlasMorphism
from .atlas.transforms import Irreducibilization, Regularization, irreducibilize, regularize
from .errors import ComplexTooLarge, GpdAtlasError, SpecError

DEFAULT_MAX_DIM = 4
DEFAULT_BUDGET = 1_000_000


def resolve_budget(budget: int | None) -> int:
    """Explicit budget, else ``GPDATLAS_BUDGET``, else the default of one million."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("GPDATLAS_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


# ----------------------------------------------------------- simplicial sets

@dataclass(frozen=True, eq=False)
class SimplicialSetTrunc:
    """Nondegenerate simplices of a simplicial set up to dimension ``max_dim``.

    ``vertices[k]`` (optional) holds the underlying points of each simplex.
    """

    max_dim: int
    faces: tuple[np.ndarray, ...]
    labels: tuple[tuple[str, ...], ...]
    vertices: tuple[np.ndarray, ...] | None = field(default=None, repr=False)
    kind: str = "generic"

    def __post_init__(self):
        if len(self.faces) != self.max_dim + 1 or len(self.labels) != self.max_dim + 1:
            raise GpdAtlasError("one face array and label list per dimension is required")
        for k, f in enumerate(self.faces):
            if f.ndim != 2 or f.shape[1] != (k + 1 if k else 0) or f.shape[0] != len(self.labels[k]):
                raise GpdAtlasError(f"face array of dimension {k} has the wrong shape")
            f.setflags(write=False)

    def __repr__(self):
        return f"SimplicialSetTrunc(kind={self.kind!r}, counts={self.counts})"

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(l) for l in self.labels)

    def count(self, k: int) -> int:
        return len(self.labels[k])

    def face(self, k: int, s: int, i: int) -> int:
        return int(self.faces[k][s, i])

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.counts))

    def vertex_lookup(self, k: int) -> dict[tuple[int, ...], int]:
        """First simplex id for every vertex tuple in dimension ``k``."""
        cache = self.__dict__.setdefault("_vlookup", {})
        if k not in cache:
            if self.vertices is None:
                raise GpdAtlasError("simplicial set carries no vertex data")
            d: dict[tuple[int, ...], int] = {}
            for s, row in enumerate(self.vertices[k].tolist()):
                d.setdefault(tuple(row), s)
            cache[k] = d
        return cache[k]

    def simplicial_identity_violations(self) -> list[tuple[int, int, int, int]]:
        """``(k, s, i, j)`` where ``d_i d_j s != d_{j-1} d_i s`` with every term nondegenerate."""
        out = []
        for k in range(2, self.max_dim + 1):
            F, G = self.faces[k], self.faces[k - 1]
            if F.shape[0] == 0:
                continue
            for j in range(k + 1):
                for i in range(j):
                    a, b = F[:, j], F[:, i]
                    ok = (a >= 0) & (b >= 0)
                    lhs = G[a[ok], i]
                    rhs = G[b[ok], j - 1]
                    bad = np.flatnonzero(lhs != rhs)
                    for t in bad[:5]:
                        out.append((k, int(np.flatnonzero(ok)[t]), i, j))
        return out

    def to_dict(self) -> dict:
        dims = []
        for k in range(self.max_dim + 1):
            entry = {"dim": k, "count": self.count(k), "labels": list(self.labels[k])}
            if k:
                entry["faces"] = self.faces[k].tolist()
            if self.vertices is not None:
                entry["vertices"] = self.vertices[k].tolist()
            dims.append(entry)
        return {"kind": "simplicial_set", "version": "v1", "nerve": self.kind, "max_dim": self.max_dim, "dims": dims}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dot(self) -> str:
        """The 1-skeleton as a DOT digraph, edges from ``d_1`` to ``d_0``."""
        lines = ["digraph nerve {"]
        for s, lab in enumerate(self.labels[0]):
            lines.append(f'  v{s} [label={json.dumps(lab)}];')
        if self.max_dim >= 1:
            for s, lab in enumerate(self.labels[1]):
                d0, d1 = self.faces[1][s]
                lines.append(f"  v{d1} -> v{d0} [label={json.dumps(lab)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def simplicial_set_from_dict(data: dict) -> SimplicialSetTrunc:
    if data.get("kind") != "simplicial_set":
        raise SpecError("not a simplicial_set document")
    if data.get("version") != "v1":
        raise SpecError(f"unsupported version {data.get('version')!r}")
    try:
        K = int(data["max_dim"])
        dims = sorted(data["dims"], key=lambda d: d["dim"])
        if [d["dim"] for d in dims] != list(range(K + 1)):
            raise SpecError("dims must list every dimension 0..max_dim")
        faces, labels, verts = [], [], []
        for d in dims:
            k, c = int(d["dim"]), int(d["count"])
            labels.append(tuple(str(x) for x in d.get("labels", [str(i) for i in range(c)])))
            if len(labels[-1]) != c:
                raise SpecError(f"dimension {k}: label count differs from count")
            if k == 0:
                faces.append(np.zeros((c, 0), dtype=np.int64))
            else:
                f = np.array(d["faces"], dtype=np.int64).reshape(c, k + 1)
                if f.size and (f.max() >= len(labels[k - 1]) or f.min() < -1):
                    raise SpecError(f"dimension {k}: face index out of range")
                faces.append(f)
            if "vertices" in d:
                verts.append(np.array(d["vertices"], dtype=np.int64).reshape(c, k + 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed simplicial set: {exc}") from exc
    return SimplicialSetTrunc(
        K, tuple(faces), tuple(labels),
        tuple(verts) if len(verts) == K + 1 else None,
        kind=str(data.get("nerve", "generic")),
    )


def nerve_counts(S: SimplicialSetTrunc) -> dict:
    return {"counts": list(S.counts), "euler_characteristic": S.euler_characteristic(), "max_dim": S.max_dim}


# ------------------------------------------------------------- weak nerve

def maximal_frames(A: Atlas) -> list[tuple[int, ...]]:
    frames = sorted({c.objects for g in A.local for c in g.comps}, key=lambda f: (-len(f), f))
    keep: list[tuple[int, ...]] = []
    for f in frames:
        fs = set(f)
        if not any(fs <= set(g) for g in keep):
            keep.append(f)
    return sorted(keep)


def _frame_tuples(frame: Sequence[int], k: int) -> np.ndarray:
    """All ``(x0..xk)`` in ``frame`` without adjacent repeats."""
    f = len(frame)
    objs = np.array(frame, dtype=np.int64)
    pos = np.arange(f, dtype=np.int64).reshape(-1, 1)
    for _ in range(k):
        if f < 2:
            return np.zeros((0, k + 1), dtype=np.int64)
        steps = np.arange(1, f, dtype=np.int64)
        nxt = (pos[:, -1:] + steps[None, :]) % f
        pos = np.concatenate([np.repeat(pos, f - 1, axis=0), nxt.reshape(-1, 1)], axis=1)
    return objs[pos]


class _RowIndex:
    """Lookup of rows of a lexicographically sorted integer array."""

    def __init__(self, rows: np.ndarray, base: int):
        self.rows = rows
        width = rows.shape[1]
        self.coded = base ** max(width, 1) < 2 ** 62
        self.base = base
        if self.coded:
            self.codes = self._code(rows)
        else:
            self.table = {tuple(r): i for i, r in enumerate(rows.tolist())}

    def _code(self, rows: np.ndarray) -> np.ndarray:
        codes = np.zeros(rows.shape[0], dtype=np.int64)
        for c in range(rows.shape[1]):
            codes = codes * self.base + rows[:, c]
        return codes

    def find(self, rows: np.ndarray) -> np.ndarray:
        if rows.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        if self.coded:
            q = self._code(rows)
            idx = np.searchsorted(self.codes, q)
            idx = np.minimum(idx, self.codes.size - 1)
            return np.where(self.codes[idx] == q, idx, -1)
        return np.array([self.table.get(tuple(r), -1) for r in rows.tolist()], dtype=np.int64)


def weak_nerve(A: Atlas, K: int = DEFAULT_MAX_DIM, budget: int | None = None) -> SimplicialSetTrunc:
    """Tuples of points lying in one local frame, without adjacent repeats."""
    budget = resolve_budget(budget)
    frames = maximal_frames(A)
    N = max(A.num_points, 1)
    faces, labels, verts = [], [], []
    prev_index = None
    for k in range(K + 1):
        estimate = sum(len(f) * (len(f) - 1) ** k for f in frames)
        if estimate > budget:
            raise ComplexTooLarge(f"weak nerve dimension {k} needs {estimate} tuples (budget {budget})")
        parts = [_frame_tuples(f, k) for f in frames]
        rows = np.concatenate(parts, axis=0) if parts else np.zeros((0, k + 1), dtype=np.int64)
        rows = np.unique(rows, axis=0) if rows.shape[0] else rows
        if k == 0:
            F = np.zeros((rows.shape[0], 0), dtype=np.int64)
        else:
            F = np.empty((rows.shape[0], k + 1), dtype=np.int64)
            for i in range(k + 1):
                sub = np.delete(rows, i, axis=1)
                ids = prev_index.find(sub)
                if 0 < i < k:
                    ids = np.where(rows[:, i - 1] == rows[:, i + 1], -1, ids)
                F[:, i] = ids
        faces.append(F)
        labels.append(tuple("(" + ",".join(A.points[x] for x in r) + ")" for r in rows.tolist()))
        verts.append(rows)
        prev_index = _RowIndex(rows, N)
    return SimplicialSetTrunc(K, tuple(faces), tuple(labels), tuple(verts), kind="weak")


# ------------------------------------------------------------ strong nerve

def _decode(keys: np.ndarray, n: int, m: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    nm = n * m
    p = np.empty((keys.size, k + 1), dtype=np.int64)
    v = np.empty((keys.size, k), dtype=np.int64)
    rest = keys.copy()
    for i in range(k, 0, -1):
        digit = rest % nm
        rest //= nm
        p[:, i] = digit // m
        v[:, i - 1] = digit % m
    p[:, 0] = rest
    return p, v


def _encode(p: np.ndarray, v: np.ndarray, n: int, m: int) -> np.ndarray:
    nm = n * m
    key = p[:, 0].copy()
    for i in range(1, p.shape[1]):
        key = key * nm + p[:, i] * m + v[:, i - 1]
    return key


@dataclass(frozen=True, eq=False)
class StrongNerve:
    """The strong nerve together with its quotient data.

    ``roots[k][c]`` is the canonical member of the class of chain ``c`` and
    ``simplex_of[k][c]`` the nondegenerate simplex id of that class (``-1``
    for degenerate classes); ``offsets[k][a]`` is where the chains of index
    ``a`` of ``i(r(A))`` start.
    """

    atlas: Atlas
    reg: Regularization
    irr: Irreducibilization
    sset: SimplicialSetTrunc
    offsets: tuple[np.ndarray, ...] = field(repr=False)
    roots: tuple[np.ndarray, ...] = field(repr=False)
    simplex_of: tuple[np.ndarray, ...] = field(repr=False)
    reps: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def base(self) -> Atlas:
        """The irreducible regular atlas the quotient is computed on."""
        return self.irr.atlas

    def shape(self, a: int) -> tuple[int, int]:
        c = self.base.local[a].comps[0]
        return c.n, c.m

    def index_of_chain(self, k: int, flat: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.offsets[k], flat, side="right") - 1

    def chain(self, k: int, flat: int) -> tuple[int, list[int], list[int]]:
        """``(index, objects, vertex group coordinates)`` of a chain."""
        a = int(self.index_of_chain(k, np.array([flat]))[0])
        n, m = self.shape(a)
        p, v = _decode(np.array([flat - self.offsets[k][a]]), n, m, k)
        objs = self.base.local[a].comps[0].objects
        return a, [objs[i] for i in p[0]], v[0].tolist()

    def classify(self, k: int, a: int, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Simplex ids (``-1`` if degenerate) of chains of index ``a`` given by positions."""
        n, m = self.shape(a)
        flat = self.offsets[k][a] + _encode(p, v, n, m)
        return self.simplex_of[k][self.roots[k][flat]]

    def classify_objects(self, a: int, objects: Sequence[int], vals: Sequence[int]) -> int:
        """Simplex id of the chain through ``objects`` with coordinates ``vals`` in index ``a`` of the base."""
        comp = self.base.local[a].comps[0]
        pos = {x: i for i, x in enumerate(comp.objects)}
        p = np.array([[pos[x] for x in objects]], dtype=np.int64)
        v = np.array([list(vals)], dtype=np.int64).reshape(1, len(objects) - 1)
        return int(self.classify(len(objects) - 1, a, p, v)[0])

    def classify_arrows(self, index: int, arrows: Sequence[int]) -> int:
        """Simplex id of a chain of composable arrows of ``A.local[index]`` (``-1`` if degenerate)."""
        g = self.atlas.local[index]
        arrows = [int(x) for x in arrows]
        if not arrows:
            raise GpdAtlasError("need at least one arrow")
        for f, h in zip(arrows, arrows[1:]):
            if g.tgt[f] != g.src[h]:
                raise GpdAtlasError("arrows are not composable")
        ci = g.component_index(int(g.src[arrows[0]]))
        a = self.irr.origin.index((index, ci))
        objs = [int(g.src[arrows[0]])] + [int(g.tgt[f]) for f in arrows]
        return self.classify_objects(a, objs, [int(g.val[f]) for f in arrows])

    def point_simplex(self, x: int) -> int:
        return self.sset.vertex_lookup(0)[(int(x),)]

    def original_index(self, a: int) -> int | None:
        """Index of the input atlas a base index comes from, ``None`` for added singletons."""
        r = self.irr.origin[a][0]
        return r if r < self.atlas.num_indices else None

    def well_defined_faces(self) -> bool:
        """Faces of every chain land in the class of the faces of its representative."""
        for k in range(1, self.sset.max_dim + 1):
            total = int(self.offsets[k][-1])
            if total == 0:
                continue
            for a in range(self.base.num_indices):
                lo, hi = int(self.offsets[k][a]), int(self.offsets[k][a + 1])
                if lo == hi:
                    continue
                keys = np.arange(hi - lo, dtype=np.int64)
                for i in range(k + 1):
                    mine = self._face_roots(k, a, keys, i)
                    rep_flat = self.roots[k][lo:hi]
                    ra = self.index_of_chain(k, rep_flat)
                    theirs = np.empty_like(mine)
                    for b in np.unique(ra).tolist():
                        sel = ra == b
                        theirs[sel] = self._face_roots(k, b, rep_flat[sel] - self.offsets[k][b], i)
                    if not np.array_equal(mine, theirs):
                        return False
        return True

    def _face_roots(self, k: int, a: int, keys: np.ndarray, i: int) -> np.ndarray:
        n, m = self.shape(a)
        grp = self.base.local[a].comps[0].group
        p, v = _decode(keys, n, m, k)
        fp, fv = _face(p, v, i, grp.mul)
        return self.roots[k - 1][self.offsets[k - 1][a] + _encode(fp, fv, n, m)]


def _face(p: np.ndarray, v: np.ndarray, i: int, mul: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = v.shape[1]
    if i == 0:
        return p[:, 1:], v[:, 1:]
    if i == k:
        return p[:, :-1], v[:, :-1]
    comp = mul[v[:, i], v[:, i - 1]].reshape(-1, 1)
    return np.delete(p, i, axis=1), np.concatenate([v[:, :i - 1], comp, v[:, i + 1:]], axis=1)


def _chain_label(B: Atlas, a: int, objs: Sequence[int], vals: Sequence[int], origin_label: str) -> str:
    grp = B.local[a].comps[0].group
    pts = B.points
    if not vals:
        return pts[objs[0]]
    out = pts[objs[0]]
    for x, v in zip(objs[1:], vals):
        out += f"-{origin_label}:{grp.labels[v]}->{pts[x]}"
    return out


def chain_identifications(B: Atlas, k: int, off: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Edges ``chain -> functor image`` between the ``k``-chains of an irreducible atlas.

    Chains of index ``a`` occupy ``off[a]:off[a+1]``.  Also returns the flag
    "contains an identity arrow" for every chain.
    """
    shapes = [(g.comps[0].n, g.comps[0].m) for g in B.local]
    total = int(off[-1])
    us, vs = [], []
    degen = np.zeros(total, dtype=bool)
    for a in range(B.num_indices):
        n, m = shapes[a]
        keys = np.arange(int(off[a + 1] - off[a]), dtype=np.int64)
        p, v = _decode(keys, n, m, k)
        if k:
            degen[off[a]:off[a + 1]] = ((p[:, 1:] == p[:, :-1]) & (v == 0)).any(axis=1)
        objs_a = np.array(B.local[a].comps[0].objects, dtype=np.int64)
        for b in B.up(a):
            nb, mb = shapes[b]
            if k == 0:
                img = B.local[b]._pos_arr[objs_a[p[:, 0]]]
            else:
                F = B.functors[(a, b)]
                arrows = p[:, :-1] * (n * m) + p[:, 1:] * m + v
                imgs = F[arrows]
                if (imgs < 0).any():
                    raise GpdAtlasError(f"structural functor {a} -> {b} is not total")
                q = np.empty((keys.size, k + 1), dtype=np.int64)
                q[:, 0] = imgs[:, 0] // (nb * mb)
                q[:, 1:] = (imgs % (nb * mb)) // mb
                img = _encode(q, imgs % mb, nb, mb)
            us.append(keys + off[a])
            vs.append(img + off[b])
    u = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
    return u, v, degen


def base_atlas(A: Atlas) -> tuple[Regularization, Irreducibilization]:
    cache = A.__dict__.setdefault("_base_cache", {})
    if "ir" not in cache:
        reg = regularize(A)
        cache["ir"] = (reg, irreducibilize(reg.atlas))
    return cache["ir"]


def strong_nerve_data(A: Atlas, K: int = DEFAULT_MAX_DIM, budget: int | None = None) -> StrongNerve:
    budget = resolve_budget(budget)
    cache = A.__dict__.setdefault("_strong_cache", {})
    if K in cache:
        hit = cache[K]
        worst = max(int(o[-1]) for o in hit.offsets)
        if worst <= budget:
            return hit
        raise ComplexTooLarge(f"strong nerve needs {worst} chains in one dimension (budget {budget})")
    reg, irr = base_atlas(A)
    B = irr.atlas
    nidx = B.num_indices
    shapes = [(g.comps[0].n, g.comps[0].m) for g in B.local]
    labels_of_origin = [reg.atlas.index_labels[o[0]] for o in irr.origin]
    offsets, roots, simplex_of, reps_all = [], [], [], []
    faces, labels, verts = [], [], []
    for k in range(K + 1):
        sizes = [n * (n * m) ** k for n, m in shapes]
        total = sum(sizes)
        if total > budget:
            raise ComplexTooLarge(f"strong nerve dimension {k} needs {total} chains (budget {budget})")
        off = np.zeros(nidx + 1, dtype=np.int64)
        off[1:] = np.cumsum(np.array(sizes, dtype=np.int64))
        u, w_, degen = chain_identifications(B, k, off)
        root = _kernels.union_find(total, u, w_)
        cls_degen = np.zeros(total, dtype=bool)
        np.logical_or.at(cls_degen, root, degen)
        is_rep = (root == np.arange(total)) & ~cls_degen[np.arange(total)]
        reps = np.flatnonzero(is_rep)
        sid = np.full(total, -1, dtype=np.int64)
        sid[reps] = np.arange(reps.size)
        simp = sid[root]
        offsets.append(off)
        roots.append(root)
        simplex_of.append(simp)
        reps_all.append(reps)
        # faces, vertices and labels of the representatives
        ra = np.searchsorted(off, reps, side="right") - 1
        F_k = np.empty((reps.size, k + 1 if k else 0), dtype=np.int64)
        V_k = np.empty((reps.size, k + 1), dtype=np.int64)
        lab: list[str] = [""] * reps.size
        for a in np.unique(ra).tolist():
            sel = np.flatnonzero(ra == a)
            n, m = shapes[a]
            p, v = _decode(reps[sel] - off[a], n, m, k)
            objs_a = np.array(B.local[a].comps[0].objects, dtype=np.int64)
            V_k[sel] = objs_a[p]
            mul = B.local[a].comps[0].group.mul
            for i in range(k + 1 if k else 0):
                fp, fv = _face(p, v, i, mul)
                flat = offsets[k - 1][a] + _encode(fp, fv, n, m)
                F_k[sel, i] = simplex_of[k - 1][flat]
            for t, s in enumerate(sel.tolist()):
                lab[s] = _chain_label(B, a, objs_a[p[t]].tolist(), v[t].tolist(), labels_of_origin[a])
        faces.append(F_k)
        verts.append(V_k)
        labels.append(tuple(lab))
    sset = SimplicialSetTrunc(K, tuple(faces), tuple(labels), tuple(verts), kind="strong")
    out = StrongNerve(A, reg, irr, sset, tuple(offsets), tuple(roots), tuple(simplex_of), tuple(reps_all))
    cache[K] = out
    return out


def strong_nerve(A: Atlas, K: int = DEFAULT_MAX_DIM, budget: int | None = None) -> SimplicialSetTrunc:
    return strong_nerve_data(A, K, budget).sset


def strong_index_sets(A: Atlas, K: int = 2, budget: int | None = None) -> list[tuple[tuple[int, ...], str]]:
    """For every strong nerve class up to ``K``, the input indices holding one of its members."""
    data = strong_nerve_data(A, K, budget)
    n0 = A.num_indices
    origin_r = np.array([o[0] for o in data.irr.origin], dtype=np.int64)
    out = []
    seen = set()
    for k in range(K + 1):
        total = int(data.offsets[k][-1])
        if total == 0:
            continue
        idx = data.index_of_chain(k, np.arange(total))
        orig = origin_r[idx]
        keep = orig < n0
        pairs = np.unique(np.stack([data.roots[k][keep], orig[keep]], axis=1), axis=0)
        if pairs.size == 0:
            continue
        splits = np.flatnonzero(np.diff(pairs[:, 0])) + 1
        for grp in np.split(pairs, splits):
            key = tuple(grp[:, 1].tolist())
            if key in seen:
                continue
            seen.add(key)
            out.append((key, f"dim {k} class {int(grp[0, 0])}"))
    return out


# ------------------------------------------------------ maps between nerves

@dataclass(frozen=True)
class SimplicialMap:
    """Images of nondegenerate simplices (``-1`` means a degenerate image)."""

    source: SimplicialSetTrunc = field(repr=False)
    target: SimplicialSetTrunc = field(repr=False)
    images: tuple[np.ndarray, ...] = field(repr=False)

    def is_injective(self, k: int) -> bool:
        img = self.images[k]
        return bool((img >= 0).all() and np.unique(img).size == img.size)

    def is_surjective(self, k: int) -> bool:
        img = self.images[k]
        return np.unique(img[img >= 0]).size == self.target.count(k)

    def is_bijective(self, k: int) -> bool:
        return self.is_injective(k) and self.is_surjective(k)

    def commutes_with_faces(self) -> bool:
        """``f(d_i s) == d_i f(s)`` whenever ``s``, ``d_i s`` and ``f(s)`` are nondegenerate
        and ``f(d_i s)`` is nondegenerate."""
        for k in range(1, self.source.max_dim + 1):
            img = self.images[k]
            for i in range(k + 1):
                d = self.source.faces[k][:, i]
                ok = (img >= 0) & (d >= 0)
                lhs = self.images[k - 1][d[ok]]
                rhs = self.target.faces[k][img[ok], i]
                ok2 = lhs >= 0
                if not np.array_equal(lhs[ok2], rhs[ok2]):
                    return False
                if ((lhs < 0) & (rhs >= 0)).any():
                    return False
        return True


def projection_p(A: Atlas, K: int = DEFAULT_MAX_DIM, budget: int | None = None) -> SimplicialMap:
    """``NA -> N^wA``: a chain goes to its tuple of points."""
    strong = strong_nerve(A, K, budget)
    weak = weak_nerve(A, K, budget)
    images = []
    for k in range(K + 1):
        V = strong.vertices[k]
        lookup = weak.vertex_lookup(k)
        img = np.array([lookup.get(tuple(r), -1) for r in V.tolist()], dtype=np.int64)
        if k:
            rep = (V[:, 1:] == V[:, :-1]).any(axis=1)
            if (img[~rep] < 0).any():
                raise GpdAtlasError("a strong simplex lies over no weak simplex")
            img[rep] = -1
        images.append(img)
    return SimplicialMap(strong, weak, tuple(images))


def induced_nerve_map(f: AtlasMorphism, K: int = DEFAULT_MAX_DIM, budget: int | None = None) -> SimplicialMap:
    """``f_*: NA -> NB``, evaluated on class representatives."""
    NA = strong_nerve_data(f.source, K, budget)
    NB = strong_nerve_data(f.target, K, budget)
    A, B = f.source, f.target
    lookup_b = {o: k for k, o in enumerate(NB.irr.origin)}
    images = []
    for k in range(K + 1):
        reps = NA.reps[k]
        img = np.full(reps.size, -1, dtype=np.int64)
        for s, flat in enumerate(reps.tolist()):
            a_base, objs, vals = NA.chain(k, flat)
            if k == 0:
                img[s] = NB.point_simplex(int(f.x_map[objs[0]]))
                continue
            a = NA.original_index(a_base)
            if a is None:
                continue  # chains of added singletons are all identities
            g = A.local[a]
            arrows = [g.arrow(x, y, v) for x, y, v in zip(objs, objs[1:], vals)]
            b = int(f.phi_map[a])
            gb = B.local[b]
            im = f.g_map[a][arrows]
            start = int(gb.src[im[0]])
            kb = lookup_b[(b, gb.component_index(start))]
            img[s] = NB.classify_objects(kb, [start] + gb.tgt[im].tolist(), gb.val[im].tolist())
        images.append(img)
    return SimplicialMap(NA.sset, NB.sset, tuple(images))


def find_section(A: Atlas, K: int = 2, budget: int | None = None) -> dict | None:
    """A simplicial section of ``p`` up to dimension ``min(K, 2)``, or ``None``.

    Exhaustive backtracking: every weak edge picks a strong edge over it and
    every weak triangle needs a strong triangle with exactly those faces.
    The result maps weak edge ids to strong edge ids.
    """
    K = min(K, 2)
    P = projection_p(A, K, budget)
    strong, weak = P.source, P.target
    if K < 1:
        return {}
    over: dict[int, list[int]] = {e: [] for e in range(weak.count(1))}
    for s, w in enumerate(P.images[1].tolist()):
        if w >= 0:
            over[w].append(s)
    edges = sorted(over, key=lambda e: (len(over[e]), e))
    if any(not over[e] for e in edges):
        return None
    tri_by_edge: dict[int, list[int]] = {e: [] for e in over}
    allowed: dict[int, set[tuple[int, int, int]]] = {}
    if K >= 2:
        for t in range(weak.count(2)):
            fs = weak.faces[2][t]
            for e in fs:
                if e >= 0:
                    tri_by_edge[int(e)].append(t)
            allowed[t] = set()
        for s, t in enumerate(P.images[2].tolist()):
            if t >= 0:
                allowed[t].add(tuple(int(x) for x in strong.faces[2][s]))
    choice: dict[int, int] = {}

    def consistent(e: int) -> bool:
        for t in tri_by_edge[e]:
            fs = weak.faces[2][t]
            if any(x >= 0 and int(x) not in choice for x in fs):
                continue
            want = tuple(choice[int(x)] if x >= 0 else -1 for x in fs)
            if want not in allowed[t]:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(edges):
            return True
        e = edges[i]
        for s in over[e]:
            choice[e] = s
            if consistent(e) and search(i + 1):
                return True
        del choice[e]
        return False

    return dict(choice) if search(0) else None


# -------------------------------------------------------------- cover nerve

def cover_nerve(A: Atlas, K: int = DEFAULT_MAX_DIM) -> SimplicialSetTrunc:
    """Nerve of the cover of ``X`` by local frames (components), as an ordered complex."""
    frames = sorted({c.objects for g in A.local for c in g.comps})
    sets = [set(f) for f in frames]
    faces, labels = [], []
    prev: dict[tuple[int, ...], int] = {}
    current = [((i,), sets[i]) for i in range(len(frames))]
    for k in range(K + 1):
        simp = sorted(s for s, _ in current)
        index = {s: i for i, s in enumerate(simp)}
        if k == 0:
            F = np.zeros((len(simp), 0), dtype=np.int64)
        else:
            F = np.array([[prev[s[:i] + s[i + 1:]] for i in range(k + 1)] for s in simp], dtype=np.int64).reshape(len(simp), k + 1)
        faces.append(F)
        labels.append(tuple("{" + "|".join(",".join(A.points[x] for x in frames[j]) for j in s) + "}" for s in simp))
        prev = index
        nxt = []
        for s, inter in current:
            for j in range(s[-1] + 1, len(frames)):
                common = inter & sets[j]
                if common:
                    nxt.append((s + (j,), common))
        current = nxt
    return SimplicialSetTrunc(K, tuple(faces), tuple(labels), None, kind="cover")


def kan_fillers(S: SimplicialSetTrunc, d2: int, d0: int) -> list[int]:
    """2-simplices ``t`` with ``d_2 t = d2`` and ``d_0 t = d0``."""
    if S.max_dim < 2:
        raise GpdAtlasError("need the 2-skeleton")
    F = S.faces[2]
    return np.flatnonzero((F[:, 2] == d2) & (F[:, 0] == d0)).tolist()
