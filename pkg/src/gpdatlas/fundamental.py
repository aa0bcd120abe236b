"""Path components, global arrows and the three fundamental group engines.

* ``pi1_strong``: vertex group of the colimit groupoid, presented by global
  arrows (classes of local arrows of ``i(r(A))``) with one relator per
  composable local pair.
* ``pi1_weak``: edge-path group of the Vietoris complex of the local frames.
* ``pi1_via_nerve``: edge-path group of the 2-truncated strong nerve.

All spanning trees are grown breadth-first from the base point, visiting
neighbours in increasing order, so presentations are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _kernels
from .algebra.presentations import (
    AbelianInvariants,
    GroupPresentation,
    Word,
    abelianization,
    exponent_columns,
    map_word,
    tietze_reduce,
)
from .algebra.smith import invariant_factors
from .atlas.model import Atlas, predicates
from .errors import BasePointNotFound, ComplexTooLarge, GpdAtlasError, TreeMismatch
from .nerve import base_atlas, maximal_frames, resolve_budget, strong_nerve_data

TIETZE_BUDGET = 100_000
ALL_PAIRS_LIMIT = 20_000


def resolve_point(A: Atlas, x: int | str) -> int:
    if isinstance(x, str):
        try:
            return A.point_of(x)
        except (KeyError, ValueError, GpdAtlasError) as exc:
            raise BasePointNotFound(f"no point labelled {x!r}") from exc
    x = int(x)
    if not 0 <= x < A.num_points:
        raise BasePointNotFound(f"point {x} is not in the atlas")
    return x


# ------------------------------------------------------------------- pi_0

@dataclass(frozen=True)
class ComponentPartition:
    blocks: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.blocks)

    @property
    def representatives(self) -> tuple[int, ...]:
        return tuple(b[0] for b in self.blocks)

    def block_of(self, x: int) -> tuple[int, ...]:
        for b in self.blocks:
            if x in b:
                return b
        raise BasePointNotFound(f"point {x} is not in the atlas")

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "components": [
                {"representative": self.labels[b[0]], "size": len(b), "points": [self.labels[x] for x in b]}
                for b in self.blocks
            ],
        }


def pi0(A: Atlas) -> ComponentPartition:
    """Points joined by a chain of local frames lie in one block."""
    us, vs = [], []
    for g in A.local:
        for c in g.comps:
            if c.n > 1:
                objs = np.array(c.objects, dtype=np.int64)
                us.append(np.full(c.n - 1, objs[0]))
                vs.append(objs[1:])
    u = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
    labels = _kernels.union_find(A.num_points, u, v)
    blocks: dict[int, list[int]] = {}
    for x, r in enumerate(labels.tolist()):
        blocks.setdefault(r, []).append(x)
    return ComponentPartition(tuple(tuple(b) for _, b in sorted(blocks.items())), A.points)


# ---------------------------------------------------------- global arrows

class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


@dataclass(frozen=True)
class GlobalArrow:
    id: int
    source: int
    target: int
    index: int  # index of the regularized irreducible atlas holding the representative
    arrow: int  # arrow id of the representative in that local groupoid
    is_identity: bool
    label: str


@dataclass(frozen=True, eq=False)
class _ArrowClasses:
    base: Atlas
    offsets: np.ndarray
    class_of: np.ndarray  # flat local arrow id -> class id
    arrows: tuple[GlobalArrow, ...]


def _arrow_classes(A: Atlas) -> _ArrowClasses:
    cache = A.__dict__.setdefault("_arrow_cache", {})
    if "classes" in cache:
        return cache["classes"]
    reg, irr = base_atlas(A)
    B = irr.atlas
    sizes = [g.num_arrows for g in B.local]
    off = np.zeros(len(sizes) + 1, dtype=np.int64)
    off[1:] = np.cumsum(sizes)
    total = int(off[-1])
    ds = _DisjointSet(total)
    for a, b in sorted(B.relation):
        F = B.functors[(a, b)].tolist()
        oa, ob = int(off[a]), int(off[b])
        for i, j in enumerate(F):
            ds.union(oa + i, ob + j)
    roots = [ds.find(i) for i in range(total)]
    order: dict[int, int] = {}
    for r in roots:
        if r not in order:
            order[r] = len(order)
    class_of = np.array([order[r] for r in roots], dtype=np.int64)
    index_of_flat = np.searchsorted(off, np.arange(total), side="right") - 1
    ident = np.zeros(len(order), dtype=bool)
    for a, g in enumerate(B.local):
        ids = np.flatnonzero(g.src == g.tgt)
        ids = ids[g.val[ids] == 0]
        ident[class_of[off[a] + ids]] = True
    origin_labels = [reg.atlas.index_labels[o[0]] for o in irr.origin]
    arrows = []
    for r, cid in sorted(order.items(), key=lambda t: t[1]):
        a = int(index_of_flat[r])
        i = r - int(off[a])
        g = B.local[a]
        s, t, v = int(g.src[i]), int(g.tgt[i]), int(g.val[i])
        grp = g.comps[0].group
        lab = f"{A.points[s]}-{origin_labels[a]}:{grp.labels[v]}->{A.points[t]}"
        arrows.append(GlobalArrow(cid, s, t, a, i, bool(ident[cid]), lab))
    out = _ArrowClasses(B, off, class_of, tuple(arrows))
    cache["classes"] = out
    return out


def global_arrows(A: Atlas) -> list[GlobalArrow]:
    """Classes of local arrows under ``g ~ phi(g)``, computed on ``i(r(A))``."""
    return list(_arrow_classes(A).arrows)


# --------------------------------------------------------- presentations

@dataclass(frozen=True)
class Pi1Result:
    """A fundamental group presentation at a base point.

    ``raw`` is the presentation before simplification, ``edges[k]`` the
    ``(source, target)`` of raw generator ``k`` and ``tree`` the raw
    generators set to 1.  ``images[k]`` is raw generator ``k`` as a word
    in ``presentation``.
    """

    engine: str
    base: int
    presentation: GroupPresentation
    raw: GroupPresentation = field(repr=False)
    edges: tuple[tuple[int, int], ...] = field(repr=False)
    tree: tuple[int, ...] = field(repr=False)
    images: tuple[Word, ...] = field(repr=False)
    survivors: tuple[int, ...] = field(repr=False)

    @property
    def abelianization(self) -> AbelianInvariants:
        return abelianization(self.presentation)

    def describe(self) -> str:
        return self.presentation.describe()

    def to_dict(self) -> dict:
        return {
            "engine": self.engine,
            "presentation": self.presentation.to_dict(),
            "description": self.describe(),
            "abelianization": self.abelianization.to_dict(),
            "raw_generators": self.raw.generator_count,
            "raw_relators": len(self.raw.relators),
            "tree_size": len(self.tree),
        }


def _bfs_tree(base: int, out_edges: dict[int, list[tuple[int, int]]]) -> list[int]:
    """Edges reaching new vertices, from ``out_edges[v] = [(neighbour, edge id), ...]``."""
    seen = {base}
    queue = deque([base])
    tree = []
    while queue:
        v = queue.popleft()
        for w, e in sorted(out_edges.get(v, ())):
            if w not in seen:
                seen.add(w)
                tree.append(e)
                queue.append(w)
    return tree


def _finish(engine, base, n_gens, relators, names, edges, tree) -> Pi1Result:
    relators = set(relators) | {(k + 1,) for k in tree}
    raw = GroupPresentation.build(n_gens, sorted(relators), names)
    red = tietze_reduce(raw, TIETZE_BUDGET)
    return Pi1Result(engine, base, red.presentation, raw, tuple(edges), tuple(tree), red.images, red.survivors)


def pi1_strong(A: Atlas, x: int | str, relations: str = "auto") -> Pi1Result:
    """Vertex group at ``x`` of the colimit groupoid of ``i(r(A))``.

    ``relations`` selects which composable pairs ``(f, g)`` contribute the
    relator ``[f][g][g o f]^-1``: ``all`` pairs, or ``star`` pairs whose
    first arrow starts at the first object of its local groupoid (these
    already generate all others).  ``auto`` picks ``all`` for small locals.
    """
    x = resolve_point(A, x)
    data = _arrow_classes(A)
    block = set(pi0(A).block_of(x))
    gens: dict[int, int] = {}
    edges, names = [], []
    for c in data.arrows:
        if c.source in block and not c.is_identity:
            gens[c.id] = len(gens)
            edges.append((c.source, c.target))
            names.append(c.label)
    out_edges: dict[int, list[tuple[int, int]]] = {}
    for cid, k in gens.items():
        s, t = edges[k]
        out_edges.setdefault(s, []).append((t, k))
    tree = _bfs_tree(x, out_edges)
    letter = np.zeros(len(data.arrows), dtype=np.int64)  # 0 marks identity classes
    for cid, k in gens.items():
        letter[cid] = k + 1
    relators: set[tuple[int, ...]] = set()
    B = data.base
    for a, g in enumerate(B.local):
        comp = g.comps[0]
        if comp.objects[0] not in block:
            continue
        n, m = comp.n, comp.m
        mode = relations
        if mode == "auto":
            mode = "all" if n ** 3 * m ** 2 <= ALL_PAIRS_LIMIT else "star"
        ps = np.arange(n) if mode == "all" else np.zeros(1, dtype=np.int64)
        p, q, r, v, w = np.meshgrid(ps, np.arange(n), np.arange(n), np.arange(m), np.arange(m), indexing="ij")
        p, q, r, v, w = (z.reshape(-1) for z in (p, q, r, v, w))
        f = p * n * m + q * m + v
        h = q * n * m + r * m + w
        hf = p * n * m + r * m + comp.group.mul[w, v]
        off = int(data.offsets[a])
        lf = letter[data.class_of[off + f]]
        lh = letter[data.class_of[off + h]]
        lhf = letter[data.class_of[off + hf]]
        rows = np.stack([lf, lh, -lhf], axis=1)
        for row in np.unique(rows, axis=0).tolist():
            word = tuple(z for z in row if z)
            if word:
                relators.add(word)
    return _finish("strong", x, len(gens), relators, names, edges, tree)


def vietoris_edges(A: Atlas, block: set[int] | None = None) -> list[tuple[int, int]]:
    edges = set()
    for f in maximal_frames(A):
        if block is not None and f[0] not in block:
            continue
        edges.update(combinations(f, 2))
    return sorted(edges)


def pi1_weak(
    A: Atlas, x: int | str, tree: Sequence[tuple[int, int]] | None = None, budget: int | None = None
) -> Pi1Result:
    """Edge-path group of the Vietoris complex at ``x``.

    One generator per edge ``{u < v}`` lying in a local frame, one relator
    per triangle in a frame.  ``tree`` may prescribe the spanning tree as
    point pairs; ``TreeMismatch`` is raised if it is not one.
    """
    x = resolve_point(A, x)
    block = set(pi0(A).block_of(x))
    frames = [f for f in maximal_frames(A) if f[0] in block]
    budget = resolve_budget(budget)
    tri_count = sum(len(f) * (len(f) - 1) * (len(f) - 2) // 6 for f in frames)
    if tri_count > budget:
        raise ComplexTooLarge(f"weak fundamental group needs {tri_count} triangles (budget {budget})")
    edges = vietoris_edges(A, block)
    eid = {e: k for k, e in enumerate(edges)}
    if tree is None:
        out_edges: dict[int, list[tuple[int, int]]] = {}
        for k, (u, v) in enumerate(edges):
            out_edges.setdefault(u, []).append((v, k))
            out_edges.setdefault(v, []).append((u, k))
        tree_ids = _bfs_tree(x, out_edges)
    else:
        tree_ids = _check_tree(tree, eid, block)

    def letter(u: int, v: int) -> int:
        k = eid[(min(u, v), max(u, v))]
        return k + 1 if u < v else -(k + 1)

    relators = set()
    for f in frames:
        for a, b, c in combinations(f, 3):
            word = tuple(z for z in (letter(a, b), letter(b, c), -letter(a, c)) if z)
            if word:
                relators.add(word)
    names = [f"{A.points[u]}~{A.points[v]}" for u, v in edges]
    return _finish("weak", x, len(edges), relators, names, edges, tree_ids)


def _check_tree(tree, eid, block) -> list[int]:
    ids = []
    parent = {v: v for v in block}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in tree:
        key = (min(u, v), max(u, v))
        if key not in eid:
            raise TreeMismatch(f"tree edge {key} is not an edge of the Vietoris complex")
        ru, rv = find(key[0]), find(key[1])
        if ru == rv:
            raise TreeMismatch(f"tree edge {key} closes a cycle")
        parent[ru] = rv
        ids.append(eid[key])
    if len(ids) != len(block) - 1:
        raise TreeMismatch("prescribed tree does not span the component")
    return ids


def pi1_via_nerve(A: Atlas, x: int | str, K: int = 2, budget: int | None = None) -> Pi1Result:
    """Edge-path group of the strong nerve: 1-simplices modulo ``d2 * d0 = d1``."""
    if K < 2:
        raise GpdAtlasError("the edge-path group needs the 2-skeleton (K >= 2)")
    x = resolve_point(A, x)
    data = strong_nerve_data(A, 2, budget)
    S = data.sset
    block = set(pi0(A).block_of(x))
    point_of_vertex = S.vertices[0][:, 0]
    gens: dict[int, int] = {}
    edges, names = [], []
    for e in range(S.count(1)):
        d0, d1 = S.faces[1][e]
        s, t = int(point_of_vertex[d1]), int(point_of_vertex[d0])
        if s in block:
            gens[e] = len(gens)
            edges.append((s, t))
            names.append(S.labels[1][e])
    out_edges: dict[int, list[tuple[int, int]]] = {}
    for e, k in gens.items():
        out_edges.setdefault(edges[k][0], []).append((edges[k][1], k))
    tree = _bfs_tree(x, out_edges)

    def letter(e: int) -> int:
        return 0 if e < 0 else gens[e] + 1

    relators = set()
    for t in range(S.count(2)):
        d0, d1, d2 = (int(z) for z in S.faces[2][t])
        if int(S.vertices[2][t, 0]) not in block:
            continue
        word = tuple(z for z in (letter(d2), letter(d0), -letter(d1)) if z)
        if word:
            relators.add(word)
    return _finish("nerve", x, len(gens), relators, names, edges, tree)


# ------------------------------------------------------------- the map p

@dataclass(frozen=True)
class PMap:
    """``p: pi1(A, x) -> pi1^w(A, x)`` on simplified presentations."""

    strong: Pi1Result
    weak: Pi1Result
    images: tuple[Word, ...]
    matrix: tuple[tuple[int, ...], ...]  # abelianized: rows = strong generators
    abelian_surjective: bool
    abelian_iso: bool
    well_defined: bool

    def to_dict(self) -> dict:
        sp, wp = self.strong.presentation, self.weak.presentation
        return {
            "strong": self.strong.to_dict(),
            "weak": self.weak.to_dict(),
            "generator_images": [
                {"generator": sp.generator_names[k], "image": wp.word_str(w)} for k, w in enumerate(self.images)
            ],
            "abelianized_matrix": [list(r) for r in self.matrix],
            "abelian_surjective": self.abelian_surjective,
            "abelian_iso": self.abelian_iso,
            "well_defined": self.well_defined,
        }


def _weak_letter_of(edge_index: dict[tuple[int, int], int], s: int, t: int) -> Word:
    if s == t:
        return ()
    k = edge_index[(min(s, t), max(s, t))]
    return (k + 1,) if s < t else (-(k + 1),)


def _in_row_lattice(rows: list[list[int]], vec: list[int], ncols: int) -> bool:
    base = invariant_factors(rows) if rows else ()
    both = invariant_factors(rows + [vec])
    return base == both and sum(1 for d in both if d) == sum(1 for d in base if d)


def p_induced(A: Atlas, x: int | str) -> PMap:
    """Images of the strong generators, with the weak tree forced to be the image of the strong one."""
    strong = pi1_strong(A, x)
    tree_pairs = [strong.edges[k] for k in strong.tree]
    weak = pi1_weak(A, strong.base, tree=tree_pairs)
    edge_index = {e: k for k, e in enumerate(weak.edges)}
    raw_to_weak = [
        map_word(_weak_letter_of(edge_index, s, t), weak.images) for (s, t) in strong.edges
    ]
    images = tuple(raw_to_weak[g] for g in strong.survivors)
    nw = weak.presentation.generator_count
    matrix = []
    for w in images:
        row = [0] * nw
        for z in w:
            row[abs(z) - 1] += 1 if z > 0 else -1
        matrix.append(row)
    rel_rows = [[col.get(i, 0) for i in range(nw)] for col in exponent_columns(weak.presentation)]
    stacked = matrix + rel_rows
    d = invariant_factors(stacked) if stacked and nw else ()
    surjective = nw == 0 or (len([z for z in d if z]) == nw and all(z == 1 for z in d if z))
    iso = surjective and strong.abelianization == weak.abelianization
    well_defined = True
    for r in strong.raw.relators:
        vec = [0] * nw
        for z in r:
            for y in raw_to_weak[abs(z) - 1]:
                vec[abs(y) - 1] += (1 if y > 0 else -1) * (1 if z > 0 else -1)
        if any(vec) and not _in_row_lattice(rel_rows, vec, nw):
            well_defined = False
            break
    return PMap(strong, weak, images, tuple(tuple(r) for r in matrix), surjective, iso, well_defined)


@dataclass(frozen=True)
class HypothesisReport:
    infimum: bool
    all_locals_simply_connected: bool
    filtered_variant: bool
    witnesses: dict

    @property
    def passes(self) -> bool:
        return self.all_locals_simply_connected and (self.infimum or self.filtered_variant)

    def to_dict(self) -> dict:
        return {
            "infimum": self.infimum,
            "all_locals_simply_connected": self.all_locals_simply_connected,
            "filtered_variant": self.filtered_variant,
            "witnesses": {k: [str(w) for w in v] for k, v in self.witnesses.items()},
        }


def check_p_iso_hypotheses(A: Atlas) -> HypothesisReport:
    rep = predicates(A, strong_dim=0)
    wit = {k: v for k, v in rep.witnesses.items() if k in ("infimum", "filtered")}
    simply = True
    for a, g in enumerate(A.local):
        bad = [c for c in g.comps if c.m > 1]
        if bad:
            simply = False
            wit["all_locals_simply_connected"] = (A.index_labels[a], A.points[bad[0].objects[0]])
            break
    if "filtered" in wit:
        wit["filtered_variant"] = wit.pop("filtered")
    return HypothesisReport(rep["infimum"], simply, rep["filtered"], wit)


# ------------------------------------------------- colimit groupoid check

def colimit_embedding_check(A: Atlas, x: int | str, K: int = 2) -> dict | None:
    """Check that strong nerve simplices at ``x``'s component stay distinct in the colimit groupoid.

    Elements of the colimit groupoid are compared as reduced words, which is
    only sound when the simplified presentation is free; otherwise ``None``
    is returned.  Dimension 1 also compares the number of nondegenerate
    1-simplices with the number of non-identity global arrows.
    """
    res = pi1_strong(A, x)
    if res.presentation.relators:
        return None
    K = min(K, 2)
    data = strong_nerve_data(A, K)
    classes = _arrow_classes(A)
    if data.base is not classes.base:
        raise GpdAtlasError("nerve and arrow classes were computed on different bases")
    block = set(pi0(A).block_of(res.base))
    raw_of_class: dict[int, int] = {}
    k = 0
    for c in classes.arrows:
        if c.source in block and not c.is_identity:
            raw_of_class[c.id] = k
            k += 1

    def element(cid: int) -> tuple:
        c = classes.arrows[cid]
        word = res.images[raw_of_class[cid]] if cid in raw_of_class else ()
        return (c.source, c.target, word)

    out = {"free": True}
    for dim in range(1, K + 1):
        seen: dict[tuple, int] = {}
        collisions = 0
        count = 0
        for s, flat in enumerate(data.reps[dim].tolist()):
            a, objs, vals = data.chain(dim, flat)
            if objs[0] not in block:
                continue
            count += 1
            g = data.base.local[a]
            off = int(classes.offsets[a])
            key = tuple(
                element(int(classes.class_of[off + g.arrow(u, w, v)]))
                for u, w, v in zip(objs, objs[1:], vals)
            )
            if key in seen:
                collisions += 1
            seen[key] = s
        out[f"dim{dim}"] = {"simplices": count, "collisions": collisions}
    out["dim1"]["global_arrows"] = len(raw_of_class)
    out["injective"] = all(out[f"dim{d}"]["collisions"] == 0 for d in range(1, K + 1))
    out["arrow_count_match"] = out["dim1"]["simplices"] == len(raw_of_class)
    return out
