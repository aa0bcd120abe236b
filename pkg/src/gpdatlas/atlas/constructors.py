"""Constructors for the standard families of groupoid atlases."""

from __future__ import annotations

import itertools
from typing import Hashable, Iterable, Sequence

import numpy as np

from ..algebra.groups import (
    DEFAULT_CLOSURE_CAP,
    FiniteGroup,
    general_linear_group,
    subgroup_closure,
)
from ..errors import EmptyComplex, GpdAtlasError
from ..groupoid import (
    Groupoid,
    action_inclusion,
    functor_from_data,
    left_multiplication_groupoid,
    restriction_embedding,
    tree_groupoid,
)
from .model import Atlas

RELATIONS = ("inclusion", "discrete", "intersection_closure")


def _global_action_atlas(
    G: FiniteGroup, subgroups: Sequence[tuple[int, ...]], labels: Sequence[str], relation: str
) -> Atlas:
    local = tuple(left_multiplication_groupoid(G, H) for H in subgroups)
    rel = set()
    functors = {}
    if relation != "discrete":
        sets = [set(H) for H in subgroups]
        for a, b in itertools.permutations(range(len(subgroups)), 2):
            if sets[a] <= sets[b]:
                rel.add((a, b))
                functors[(a, b)] = action_inclusion(local[a], local[b])
    return Atlas(tuple(G.labels), tuple(labels), local, frozenset(rel), functors)


def _default_subgroup_label(G: FiniteGroup, gens: Sequence[int]) -> str:
    if not gens:
        return "<1>"
    return "<" + ",".join(G.labels[g] for g in gens) + ">"


def from_global_action(
    G: FiniteGroup,
    subgroup_gens: Sequence[Iterable[int]],
    relation: str = "inclusion",
    labels: Sequence[str] | None = None,
) -> Atlas:
    """The global action ``A(G, H)``: subgroups acting on ``G`` by left multiplication.

    ``relation`` is ``inclusion`` (a <= b iff H_a is contained in H_b),
    ``discrete`` (reflexive only) or ``intersection_closure`` (the family is
    first closed under pairwise intersection, then ordered by inclusion).
    """
    if relation not in RELATIONS:
        raise GpdAtlasError(f"relation must be one of {RELATIONS}")
    gens = [sorted({int(g) for g in gs}) for gs in subgroup_gens]
    subgroups = [subgroup_closure(G, gs) for gs in gens]
    if labels is None:
        labels = [_default_subgroup_label(G, gs) for gs in gens]
    labels = list(labels)
    if relation == "intersection_closure":
        family = list(subgroups)
        seen = set(family)
        frontier = list(family)
        while frontier:
            nxt = []
            for H in frontier:
                for K in list(family):
                    I = tuple(sorted(set(H) & set(K)))
                    if I not in seen:
                        seen.add(I)
                        family.append(I)
                        nxt.append(I)
                        labels.append("{" + ",".join(G.labels[g] for g in I) + "}")
            frontier = nxt
        subgroups = family
        relation = "inclusion"
    return _global_action_atlas(G, subgroups, labels, relation)


def closed_subsets(n: int) -> list[tuple[tuple[int, int], ...]]:
    """Subsets of ``{(i, j): i != j}`` closed under ``(i,j),(j,k) -> (i,k)`` for ``i != k``."""
    lam = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for mask in range(1 << len(lam)):
        s = {lam[k] for k in range(len(lam)) if mask >> k & 1}
        if all((i, k) in s for (i, j) in s for (j2, k) in s if j == j2 and i != k):
            out.append(tuple(sorted(s)))
    out.sort(key=lambda s: (len(s), s))
    return out


def elementary_generators(G: FiniteGroup, n: int, m: int, pairs: Iterable[tuple[int, int]]) -> list[int]:
    gens = []
    for i, j in pairs:
        for r in range(1, m):
            mat = np.eye(n, dtype=np.int64)
            mat[i, j] = r
            gens.append(G.index_of(tuple(int(v) for v in mat.reshape(-1))))
    return gens


def gl_atlas(n: int, m: int, cap: int = DEFAULT_CLOSURE_CAP) -> Atlas:
    """The general linear global action on ``GL(n, Z/m)``.

    Indices are the closed subsets of ``{(i, j): i != j}`` ordered by
    inclusion; the subset ``a`` acts through the subgroup generated by the
    elementary matrices ``E_ij(r)`` with ``(i, j)`` in ``a``.
    """
    if n < 2 or m < 2:
        raise GpdAtlasError("gl_atlas needs n >= 2 and m >= 2")
    G = general_linear_group(n, m, cap=cap)
    sets = closed_subsets(n)
    subgroups = [subgroup_closure(G, elementary_generators(G, n, m, s)) for s in sets]
    labels = ["{" + ",".join(f"{i + 1}{j + 1}" for i, j in s) + "}" for s in sets]
    local = tuple(left_multiplication_groupoid(G, H) for H in subgroups)
    rel = set()
    functors = {}
    for a, b in itertools.permutations(range(len(sets)), 2):
        if set(sets[a]) <= set(sets[b]):
            rel.add((a, b))
            functors[(a, b)] = action_inclusion(local[a], local[b])
    points = tuple(_matrix_label(e, n) for e in G.elements)
    atlas = Atlas(points, tuple(labels), local, frozenset(rel), functors)
    object.__setattr__(atlas, "group", G)
    return atlas


def _matrix_label(flat: Sequence[int], n: int) -> str:
    return "[" + ";".join(" ".join(str(v) for v in flat[r * n:(r + 1) * n]) for r in range(n)) + "]"


def simplices_of(facets: Iterable[Iterable[Hashable]]) -> tuple[list, list[tuple[int, ...]]]:
    """Vertices and all nonempty faces (as sorted position tuples) of a complex."""
    facets = [tuple(f) for f in facets]
    if not facets or any(len(f) == 0 for f in facets):
        raise EmptyComplex("a simplicial complex needs at least one nonempty facet")
    verts = sorted({v for f in facets for v in f}, key=lambda v: (str(type(v)), v))
    pos = {v: k for k, v in enumerate(verts)}
    simplices = set()
    for f in facets:
        fp = sorted({pos[v] for v in f})
        for r in range(1, len(fp) + 1):
            simplices.update(itertools.combinations(fp, r))
    return verts, sorted(simplices, key=lambda s: (len(s), s))


def from_simplicial_complex(facets: Iterable[Iterable[Hashable]]) -> Atlas:
    """``a(K)``: a tree groupoid on every simplex, ordered by inclusion."""
    verts, simplices = simplices_of(facets)
    local = tuple(tree_groupoid(s) for s in simplices)
    index = {s: k for k, s in enumerate(simplices)}
    rel = set()
    functors = {}
    for s in simplices:
        for r in range(1, len(s)):
            for t in itertools.combinations(s, r):
                a, b = index[t], index[s]
                rel.add((a, b))
                functors[(a, b)] = restriction_embedding(local[a], local[b])
    labels = tuple("{" + ",".join(str(verts[v]) for v in s) + "}" for s in simplices)
    return Atlas(tuple(str(v) for v in verts), labels, local, frozenset(rel), functors)


def sphere(n: int) -> Atlas:
    """The n-sphere: ``a`` of the boundary of the (n+1)-simplex."""
    if n < 0:
        raise GpdAtlasError("sphere dimension must be nonnegative")
    return from_simplicial_complex(itertools.combinations(range(n + 2), n + 1))


def from_single_groupoid(gpd: Groupoid, points: Sequence[str] | None = None, label: str = "G") -> Atlas:
    """``a(G)``: one index carrying the whole groupoid."""
    n = int(gpd.objects.max()) + 1 if gpd.num_objects else 0
    if points is None:
        points = tuple(str(x) for x in range(n))
    return Atlas(tuple(points), (label,), (gpd,))


def explicit_atlas(
    points: Sequence[str],
    local: Sequence[Groupoid],
    labels: Sequence[str],
    relation: Iterable[tuple[int, int]] = (),
    functor_data: dict | None = None,
) -> Atlas:
    """Atlas from explicit groupoids.

    ``functor_data[(a, b)]`` is either a ready arrow map or a dict with
    optional keys ``rho`` (component index -> list of images) and ``twist``
    (object -> group element) passed to ``functor_from_data``.  Pairs
    without data get the default (trivial homomorphism, no twist).
    """
    functor_data = functor_data or {}
    rel = {(int(a), int(b)) for a, b in relation if a != b}
    functors = {}
    for a, b in sorted(rel):
        data = functor_data.get((a, b), {})
        if isinstance(data, np.ndarray):
            functors[(a, b)] = data
            continue
        inter = local[a].object_set() & local[b].object_set()
        functors[(a, b)] = functor_from_data(
            local[a], local[b], inter, rho=data.get("rho"), twist=data.get("twist")
        )
    return Atlas(tuple(points), tuple(labels), tuple(local), frozenset(rel), functors)
