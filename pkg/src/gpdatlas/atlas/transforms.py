"""Irreducibilization, regularization and removal of paired indices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GpdAtlasError, NotIrreducible
from ..groupoid import Groupoid, restriction_embedding, tree_groupoid
from .model import Atlas, initial_element, require_irreducible, transitive_closure
from .morphisms import AtlasMorphism


def _inverse_embedding(emb: np.ndarray, size: int) -> np.ndarray:
    inv = np.full(size, -1, dtype=np.int64)
    inv[emb] = np.arange(emb.size)
    return inv


@dataclass(frozen=True, eq=False)
class Irreducibilization:
    atlas: Atlas
    canonical: AtlasMorphism
    origin: tuple[tuple[int, int], ...]  # (index of A, component number) per new index


def irreducibilize(A: Atlas) -> Irreducibilization:
    """``i(A)``: every component of every local groupoid becomes its own index."""
    origin: list[tuple[int, int]] = []
    local: list[Groupoid] = []
    labels: list[str] = []
    embeds: list[np.ndarray] = []
    for a, g in enumerate(A.local):
        for ci, c in enumerate(g.comps):
            sub = Groupoid((c,))
            origin.append((a, ci))
            local.append(sub)
            embeds.append(restriction_embedding(sub, g))
            if len(g.comps) == 1:
                labels.append(A.index_labels[a])
            else:
                labels.append(f"{A.index_labels[a]}[{A.points[c.objects[0]]}]")
    inverse = [_inverse_embedding(e, A.local[origin[k][0]].num_arrows) for k, e in enumerate(embeds)]
    by_index: dict[int, list[int]] = {}
    for k, (a, _) in enumerate(origin):
        by_index.setdefault(a, []).append(k)
    rel = set()
    functors = {}
    for a, b in A.relation:
        phi = A.functors[(a, b)]
        for k in by_index.get(a, []):
            X = set(local[k].objects.tolist())
            for l in by_index.get(b, []):
                if X <= set(local[l].objects.tolist()):
                    rel.add((k, l))
                    functors[(k, l)] = inverse[l][phi[embeds[k]]]
    iA = Atlas(A.points, tuple(labels), tuple(local), frozenset(rel), functors)
    canonical = AtlasMorphism(
        iA, A,
        np.arange(A.num_points),
        np.array([a for a, _ in origin], dtype=np.int64),
        tuple(embeds),
    )
    return Irreducibilization(iA, canonical, tuple(origin))


def factor_through_irreducible(g: AtlasMorphism, irr: Irreducibilization) -> AtlasMorphism:
    """The unique ``h: B -> iA`` with ``canonical o h = g`` for irreducible ``B``."""
    B = g.source
    require_irreducible(B)
    A = g.target
    if irr.canonical.target is not A:
        raise GpdAtlasError("irreducibilization of a different atlas")
    lookup = {o: k for k, o in enumerate(irr.origin)}
    phi = np.empty(B.num_indices, dtype=np.int64)
    maps = []
    for b in range(B.num_indices):
        a = int(g.phi_map[b])
        x = int(g.x_map[B.local[b].objects[0]])
        k = lookup[(a, A.local[a].component_index(x))]
        phi[b] = k
        inv = _inverse_embedding(irr.canonical.g_map[k], A.local[a].num_arrows)
        maps.append(inv[g.g_map[b]])
    return AtlasMorphism(B, irr.atlas, g.x_map.copy(), phi, tuple(maps))


@dataclass(frozen=True, eq=False)
class Regularization:
    atlas: Atlas
    inclusion: AtlasMorphism
    point_index: tuple[int, ...]  # the new index alpha_x per point x


def regularize(A: Atlas) -> Regularization:
    """``r(A)``: adjoin a singleton index below every index containing each point."""
    n0 = A.num_indices
    local = list(A.local)
    labels = list(A.index_labels)
    rel = set(A.relation)
    functors = dict(A.functors)
    point_index = []
    for x in range(A.num_points):
        k = len(local)
        point_index.append(k)
        local.append(tree_groupoid([x]))
        labels.append(f"*{A.points[x]}")
        for a in A.phi_x(x):
            rel.add((k, a))
            functors[(k, a)] = np.array([A.local[a].identity(x)], dtype=np.int64)
    rA = Atlas(A.points, tuple(labels), tuple(local), frozenset(rel), functors)
    inclusion = AtlasMorphism(
        A, rA,
        np.arange(A.num_points),
        np.arange(n0),
        tuple(np.arange(g.num_arrows) for g in A.local),
    )
    return Regularization(rA, inclusion, tuple(point_index))


def regular_retraction(A: Atlas, reg: Regularization) -> AtlasMorphism:
    """For good ``A``, the morphism ``rA -> A`` sending ``alpha_x`` to the initial index of ``phi_x``."""
    rA = reg.atlas
    phi = list(range(A.num_indices))
    maps = [np.arange(g.num_arrows) for g in A.local]
    for x, k in enumerate(reg.point_index):
        a0 = initial_element(A, A.phi_x(x))
        if a0 is None:
            raise GpdAtlasError(f"point {A.points[x]} has no initial index; the atlas is not good")
        phi.append(a0)
        maps.append(np.array([A.local[a0].identity(x)], dtype=np.int64))
    return AtlasMorphism(rA, A, np.arange(A.num_points), np.array(phi), tuple(maps))


@dataclass(frozen=True, eq=False)
class Dedupe:
    atlas: Atlas
    closed: Atlas  # the input with its relation transitively closed
    inclusion: AtlasMorphism  # atlas -> closed
    retraction: AtlasMorphism  # closed -> atlas
    selected: tuple[int, ...]


def dedupe_paired_indices(A: Atlas) -> Dedupe:
    """Keep one index per class of mutually related indices.

    The kept index is the one with the smallest label.  The relation of the
    result is a partial order and the two returned morphisms witness the
    equivalence.
    """
    if not all(g.is_connected() for g in A.local):
        raise NotIrreducible("dedupe_paired_indices needs an irreducible atlas")
    C = transitive_closure(A)
    n = C.num_indices
    cls = list(range(n))
    for a in range(n):
        for b in range(n):
            if C.leq(a, b) and C.leq(b, a):
                cls[a] = min(cls[a], b, key=lambda i: (C.index_labels[i], i))
    selected = sorted(set(cls))
    pos = {a: k for k, a in enumerate(selected)}
    rel = {(pos[a], pos[b]) for a, b in C.relation if a in pos and b in pos}
    functors = {(pos[a], pos[b]): C.functors[(a, b)] for a, b in C.relation if a in pos and b in pos}
    B = Atlas(
        C.points,
        tuple(C.index_labels[a] for a in selected),
        tuple(C.local[a] for a in selected),
        frozenset(rel),
        functors,
    )
    inclusion = AtlasMorphism(
        B, C, np.arange(C.num_points), np.array(selected, dtype=np.int64),
        tuple(np.arange(g.num_arrows) for g in B.local),
    )
    retraction = AtlasMorphism(
        C, B, np.arange(C.num_points), np.array([pos[cls[a]] for a in range(n)], dtype=np.int64),
        tuple(C.functor(a, cls[a]) for a in range(n)),
    )
    return Dedupe(B, C, inclusion, retraction, tuple(selected))
