"""Integer homology of truncated simplicial sets and the j-map analysis.

Chains are normalized: the basis of ``C_k`` is the set of nondegenerate
``k``-simplices and degenerate faces contribute zero.  With simplices up to
dimension ``K`` the groups ``H_0 .. H_{K-1}`` are determined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .algebra.groups import FiniteGroup
from .algebra.presentations import AbelianInvariants, direct_sum, invariants_from_factors
from .algebra.smith import sparse_invariant_factors
from .atlas.constructors import from_single_groupoid
from .atlas.model import Atlas, require_irreducible, transitive_closure
from .errors import ComplexTooLarge, GpdAtlasError, NormalizationFailure, PhiNotDiscrete
from .groupoid import one_object_groupoid
from .nerve import (
    DEFAULT_MAX_DIM,
    SimplicialSetTrunc,
    chain_identifications,
    resolve_budget,
    strong_nerve,
    weak_nerve,
)


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """``boundaries[k]`` is ``d_k: C_k -> C_{k-1}`` as sparse columns (``boundaries[0]`` is empty)."""

    ranks: tuple[int, ...]
    boundaries: tuple[tuple[dict[int, int], ...], ...] = field(repr=False)

    @property
    def max_dim(self) -> int:
        return len(self.ranks) - 1

    def dense(self, k: int) -> list[list[int]]:
        rows = self.ranks[k - 1]
        out = [[0] * self.ranks[k] for _ in range(rows)]
        for j, col in enumerate(self.boundaries[k]):
            for i, x in col.items():
                out[i][j] = x
        return out

    def composite_is_zero(self, k: int) -> bool:
        """``d_{k-1} o d_k == 0``."""
        prev = self.boundaries[k - 1]
        for col in self.boundaries[k]:
            acc: dict[int, int] = {}
            for i, x in col.items():
                for r, y in prev[i].items():
                    acc[r] = acc.get(r, 0) + x * y
            if any(acc.values()):
                return False
        return True


def chain_complex(S: SimplicialSetTrunc) -> ChainComplex:
    bounds: list[tuple[dict[int, int], ...]] = [()]
    for k in range(1, S.max_dim + 1):
        cols = []
        for row in S.faces[k].tolist():
            col: dict[int, int] = {}
            for i, f in enumerate(row):
                if f >= 0:
                    col[f] = col.get(f, 0) + (-1) ** i
            cols.append({r: x for r, x in col.items() if x})
        bounds.append(tuple(cols))
    C = ChainComplex(S.counts, tuple(bounds))
    for k in range(2, C.max_dim + 1):
        if not C.composite_is_zero(k):
            raise NormalizationFailure(f"d{k - 1} o d{k} is not zero")
    return C


@dataclass(frozen=True)
class HomologyResult:
    groups: tuple[AbelianInvariants, ...]  # H_0 .. H_{valid_up_to}
    valid_up_to: int
    chain_ranks: tuple[int, ...]

    def __getitem__(self, n: int) -> AbelianInvariants:
        if not 0 <= n <= self.valid_up_to:
            raise GpdAtlasError(f"H_{n} is not determined by a {self.valid_up_to + 1}-truncated complex")
        return self.groups[n]

    def to_dict(self) -> dict:
        return {
            "valid_up_to": self.valid_up_to,
            "chain_ranks": list(self.chain_ranks),
            "groups": [{"dim": n, **g.to_dict(), "text": str(g)} for n, g in enumerate(self.groups)],
        }


def homology_of(S: SimplicialSetTrunc) -> HomologyResult:
    if S.max_dim < 1:
        raise GpdAtlasError("homology needs simplices up to dimension at least 1")
    C = chain_complex(S)
    factors = [()] + [sparse_invariant_factors(C.ranks[k - 1], C.boundaries[k]) for k in range(1, C.max_dim + 1)]
    groups = []
    for n in range(C.max_dim):
        rank_out = len(factors[n])  # rank of d_n
        incoming = factors[n + 1]
        free = C.ranks[n] - rank_out - len(incoming)
        groups.append(invariants_from_factors(free + len(incoming), incoming))
    return HomologyResult(tuple(groups), C.max_dim - 1, C.ranks)


def homology(A: Atlas, K: int = DEFAULT_MAX_DIM, budget: int | None = None, nerve: str = "strong") -> HomologyResult:
    """``H_n(A)`` for ``n <= K - 1`` from the strong (default) or weak nerve truncated at ``K``."""
    if K < 1:
        raise GpdAtlasError("homology needs K >= 1")
    S = strong_nerve(A, K, budget) if nerve == "strong" else weak_nerve(A, K, budget)
    return homology_of(S)


_GROUP_CACHE: dict[tuple, HomologyResult] = {}


def group_homology(G: FiniteGroup, K: int, budget: int | None = None) -> HomologyResult:
    """Homology of ``G`` through the nerve of its one-object groupoid (truncated at ``K``)."""
    key = (G.mul.tobytes(), G.order, K)
    if key not in _GROUP_CACHE:
        _GROUP_CACHE[key] = homology(from_single_groupoid(one_object_groupoid(G, 0), ["*"]), K, budget)
    return _GROUP_CACHE[key]


def groupoid_homology(components_groups: list[FiniteGroup], K: int, budget: int | None = None) -> list[AbelianInvariants]:
    """Direct sum over components of the homology of their vertex groups."""
    per = [group_homology(G, K, budget) for G in components_groups]
    return [direct_sum(h.groups[n] for h in per) for n in range(K)]


# ------------------------------------------------------------------- j-map

@dataclass(frozen=True)
class JMapDim:
    dim: int
    source_rank: int
    target_rank: int
    rank: int
    kernel_rank: int
    classes: int
    cyclic_classes: int
    cycle_rank: int  # sum over classes of (edges - vertices + components)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class JMapReport:
    dims: tuple[JMapDim, ...]
    cycle_witnesses: tuple[tuple[int, str], ...]  # (dim, label) of classes whose graph has a cycle

    @property
    def injective(self) -> bool:
        return all(d.kernel_rank == 0 for d in self.dims)

    @property
    def acyclic(self) -> bool:
        return all(d.cyclic_classes == 0 for d in self.dims)

    @property
    def equivalence_holds(self) -> bool:
        """Kernel rank zero exactly when no class graph has a cycle, dimension by dimension."""
        return all((d.kernel_rank == 0) == (d.cyclic_classes == 0) for d in self.dims)

    def to_dict(self) -> dict:
        return {
            "dims": [d.to_dict() for d in self.dims],
            "injective": self.injective,
            "acyclic": self.acyclic,
            "equivalence_holds": self.equivalence_holds,
            "cycle_witnesses": [{"dim": k, "simplex": s} for k, s in self.cycle_witnesses],
        }


def _chain_label(B: Atlas, a: int, key: int, k: int) -> str:
    from .nerve import _decode

    comp = B.local[a].comps[0]
    p, v = _decode(np.array([key]), comp.n, comp.m, k)
    objs = [B.points[comp.objects[i]] for i in p[0]]
    out = objs[0]
    for x, val in zip(objs[1:], v[0].tolist()):
        out += f"-{B.index_labels[a]}:{comp.group.labels[val]}->{x}"
    return out


def j_map_analysis(A: Atlas, K: int = 2, budget: int | None = None) -> JMapReport:
    """The map ``j(s, a<b) = (s, a) - (phi(s), b)`` on local chains, against cycles of the class graphs.

    Works on the transitive closure of an irreducible atlas with all local
    ``k``-chains (degenerate ones included) as bases.  Each strong class
    ``[s]`` gives a graph whose vertices are its members and whose edges
    are the pairs ``a < b``; ``j`` is the sum of their incidence maps.
    """
    require_irreducible(A)
    B = transitive_closure(A)
    budget = resolve_budget(budget)
    shapes = [(g.comps[0].n, g.comps[0].m) for g in B.local]
    dims = []
    witnesses = []
    for k in range(K + 1):
        sizes = [n * (n * m) ** k for n, m in shapes]
        total = sum(sizes)
        if total > budget:
            raise ComplexTooLarge(f"local chains of dimension {k} number {total} (budget {budget})")
        off = np.zeros(len(sizes) + 1, dtype=np.int64)
        off[1:] = np.cumsum(sizes)
        u, v, _ = chain_identifications(B, k, off)
        # rank of j by Smith normal form of the incidence columns
        cols = [{int(a): 1, int(b): -1} for a, b in zip(u.tolist(), v.tolist())]
        rank = len(sparse_invariant_factors(total, cols))
        # cycles per class by union-find
        roots = _kernels.union_find(total, u, v)
        members = np.bincount(roots, minlength=total)
        edges = np.bincount(roots[u], minlength=total) if u.size else np.zeros(total, dtype=np.int64)
        is_root = np.flatnonzero(members)
        excess = edges[is_root] - members[is_root] + 1
        cyclic = is_root[excess > 0]
        for r in cyclic[:3].tolist():
            a = int(np.searchsorted(off, r, side="right") - 1)
            witnesses.append((k, _chain_label(B, a, r - int(off[a]), k)))
        dims.append(JMapDim(
            k, int(u.size), total, rank, int(u.size) - rank,
            int(is_root.size), int(cyclic.size), int(excess.sum()),
        ))
    return JMapReport(tuple(dims), tuple(witnesses))


# ------------------------------------------------------- discrete phi check

@dataclass(frozen=True)
class LocalComparison:
    atlas_homology: HomologyResult
    local_sums: tuple[AbelianInvariants, ...]
    equal_dims: dict
    torsion_h1_equal: bool
    free_surplus_h1: int

    @property
    def holds(self) -> bool:
        return all(self.equal_dims.values()) and self.torsion_h1_equal and self.free_surplus_h1 >= 0

    def to_dict(self) -> dict:
        return {
            "atlas": self.atlas_homology.to_dict(),
            "local_sums": [{"dim": n, **g.to_dict(), "text": str(g)} for n, g in enumerate(self.local_sums)],
            "equal_dims": {str(k): v for k, v in self.equal_dims.items()},
            "torsion_h1_equal": self.torsion_h1_equal,
            "free_surplus_h1": self.free_surplus_h1,
            "holds": self.holds,
        }


def local_homology_comparison(A: Atlas, K: int = DEFAULT_MAX_DIM, budget: int | None = None) -> LocalComparison:
    """Compare ``H_n(A)`` with the direct sum of the local homologies (discrete index relation only)."""
    if not A.is_discrete_relation():
        raise PhiNotDiscrete("the index relation is not discrete")
    H = homology(A, K, budget)
    groups = [c.group for g in A.local for c in g.comps]
    sums = tuple(groupoid_homology(groups, K, budget)[: K])
    equal = {n: H.groups[n] == sums[n] for n in range(2, K)}
    torsion_ok = K < 2 or H.groups[1].torsion == sums[1].torsion
    surplus = H.groups[1].free_rank - sums[1].free_rank if K >= 2 else 0
    return LocalComparison(H, sums, equal, torsion_ok, surplus)
