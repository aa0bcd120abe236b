"""Atlas morphisms, corestrictions and equivalence-chain witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import GpdAtlasError
from ..groupoid import compose_maps, functor_violation
from .model import Atlas, ValidationReport, Violation


@dataclass(frozen=True, eq=False)
class AtlasMorphism:
    """A morphism of groupoid atlases.

    ``x_map[x]`` is the image point, ``phi_map[a]`` the image index, and
    ``g_map[a]`` the functor ``local[a] -> target.local[phi_map[a]]`` as an
    arrow map.
    """

    source: Atlas
    target: Atlas
    x_map: np.ndarray
    phi_map: np.ndarray
    g_map: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "x_map", np.asarray(self.x_map, dtype=np.int64))
        object.__setattr__(self, "phi_map", np.asarray(self.phi_map, dtype=np.int64))
        object.__setattr__(self, "g_map", tuple(np.asarray(g, dtype=np.int64) for g in self.g_map))

    def __repr__(self):
        return f"AtlasMorphism({self.source!r} -> {self.target!r})"


def identity_morphism(A: Atlas) -> AtlasMorphism:
    return AtlasMorphism(
        A, A,
        np.arange(A.num_points),
        np.arange(A.num_indices),
        tuple(np.arange(g.num_arrows) for g in A.local),
    )


def compose(g: AtlasMorphism, f: AtlasMorphism) -> AtlasMorphism:
    """``g o f``."""
    if f.target is not g.source:
        raise GpdAtlasError("morphisms are not composable")
    return AtlasMorphism(
        f.source,
        g.target,
        g.x_map[f.x_map],
        g.phi_map[f.phi_map],
        tuple(compose_maps(g.g_map[int(f.phi_map[a])], f.g_map[a]) for a in range(f.source.num_indices)),
    )


def validate_morphism(f: AtlasMorphism) -> ValidationReport:
    """Check the three clauses of a morphism, with witnesses."""
    A, B = f.source, f.target
    out: list[Violation] = []
    if f.x_map.shape != (A.num_points,) or (f.x_map.size and not (0 <= f.x_map.min() and f.x_map.max() < B.num_points)):
        out.append(Violation("x_map", (), "point map has the wrong shape or range"))
        return ValidationReport(tuple(out))
    if f.phi_map.shape != (A.num_indices,) or (f.phi_map.size and not (0 <= f.phi_map.min() and f.phi_map.max() < B.num_indices)):
        out.append(Violation("phi_map", (), "index map has the wrong shape or range"))
        return ValidationReport(tuple(out))
    for a, b in sorted(A.relation):
        if not B.leq(int(f.phi_map[a]), int(f.phi_map[b])):
            out.append(Violation("monotone", (A.index_labels[a], A.index_labels[b]), "index map does not preserve the relation"))
    for a in range(A.num_indices):
        ga, gb = A.local[a], B.local[int(f.phi_map[a])]
        F = f.g_map[a]
        if F.shape != (ga.num_arrows,) or (F < 0).any():
            out.append(Violation("functor", (A.index_labels[a],), "local functor is not total"))
            continue
        w = functor_violation(F, ga, gb, obj_map=f.x_map)
        if w is not None:
            out.append(Violation("functor", (A.index_labels[a],) + tuple(w), "local map is not a functor over the point map"))
    if out:
        return ValidationReport(tuple(out))
    for a, b in sorted(A.relation):
        phi = A.functor(a, b)
        dom = np.flatnonzero(phi >= 0)
        lhs = f.g_map[b][phi[dom]]
        fa, fb = int(f.phi_map[a]), int(f.phi_map[b])
        images = f.g_map[a][dom]
        psi = B.functor(fa, fb)
        rhs = psi[images]
        bad = np.flatnonzero(lhs != rhs)
        if bad.size:
            out.append(Violation(
                "natural", (A.index_labels[a], A.index_labels[b], int(dom[bad[0]])), "naturality square does not commute",
            ))
    return ValidationReport(tuple(out))


def is_morphism(f: AtlasMorphism) -> bool:
    return validate_morphism(f).valid


def is_corestriction(f: AtlasMorphism, f2: AtlasMorphism) -> bool:
    """``f <| f2``: indices of ``f`` lie below those of ``f2`` and the triangles commute."""
    if f.source is not f2.source or f.target is not f2.target:
        return False
    B = f.target
    for a in range(f.source.num_indices):
        p, q = int(f.phi_map[a]), int(f2.phi_map[a])
        if not B.leq(p, q):
            return False
        psi = B.functor(p, q)
        img = psi[f.g_map[a]]
        if (img < 0).any() or not np.array_equal(img, f2.g_map[a]):
            return False
    return True


def corestriction_chain_ok(chain: Sequence[AtlasMorphism]) -> bool:
    """Each neighbouring pair of the chain is related by a corestriction in one direction."""
    return all(is_corestriction(f, g) or is_corestriction(g, f) for f, g in zip(chain, chain[1:]))


def same_morphism(f: AtlasMorphism, g: AtlasMorphism) -> bool:
    return (
        f.source is g.source
        and f.target is g.target
        and np.array_equal(f.x_map, g.x_map)
        and np.array_equal(f.phi_map, g.phi_map)
        and all(np.array_equal(a, b) for a, b in zip(f.g_map, g.g_map))
    )


def constant_morphism(A: Atlas, B: Atlas, point: int = 0) -> AtlasMorphism:
    """Everything to one point of ``B``, through the first index containing it."""
    b = B.phi_x(point)[0]
    ident = B.local[b].identity(point)
    return AtlasMorphism(
        A, B,
        np.full(A.num_points, point),
        np.full(A.num_indices, b),
        tuple(np.full(g.num_arrows, ident) for g in A.local),
    )
