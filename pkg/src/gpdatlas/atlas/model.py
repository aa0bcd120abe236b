"""The groupoid atlas data model, validation and structural predicates."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import GpdAtlasError, InvalidAtlas, NotIrreducible
from ..groupoid import Groupoid, compose_maps, functor_violation


@dataclass(frozen=True, eq=False)
class Atlas:
    """A groupoid atlas on the points ``0..len(points)-1``.

    ``relation`` holds the pairs ``(a, b)`` with ``a <= b`` and ``a != b``;
    reflexivity is implicit.  ``functors[(a, b)]`` is the structural functor
    as an arrow map over ``local[a]``, defined (``>= 0``) exactly on the
    components of ``local[a]`` inside ``X_a & X_b``.
    """

    points: tuple[str, ...]
    index_labels: tuple[str, ...]
    local: tuple[Groupoid, ...]
    relation: frozenset[tuple[int, int]] = frozenset()
    functors: Mapping[tuple[int, int], np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.index_labels) != len(self.local):
            raise GpdAtlasError("one label per local groupoid is required")
        rel = frozenset((int(a), int(b)) for a, b in self.relation if a != b)
        object.__setattr__(self, "relation", rel)
        object.__setattr__(self, "functors", dict(self.functors))
        frames = tuple(frozenset(g.objects.tolist()) for g in self.local)
        object.__setattr__(self, "_frames", frames)
        up: list[list[int]] = [[] for _ in self.local]
        down: list[list[int]] = [[] for _ in self.local]
        for a, b in sorted(rel):
            up[a].append(b)
            down[b].append(a)
        object.__setattr__(self, "_up", tuple(tuple(u) for u in up))
        object.__setattr__(self, "_down", tuple(tuple(d) for d in down))
        phi_x: list[list[int]] = [[] for _ in self.points]
        for a, fr in enumerate(frames):
            for x in fr:
                if 0 <= x < len(self.points):
                    phi_x[x].append(a)
        object.__setattr__(self, "_phi_x", tuple(tuple(p) for p in phi_x))

    def __repr__(self):
        return (
            f"Atlas(points={self.num_points}, indices={self.num_indices}, "
            f"relations={len(self.relation)})"
        )

    @property
    def num_points(self) -> int:
        return len(self.points)

    @property
    def num_indices(self) -> int:
        return len(self.local)

    def X(self, a: int) -> frozenset[int]:
        return self._frames[a]

    def leq(self, a: int, b: int) -> bool:
        return a == b or (a, b) in self.relation

    def up(self, a: int) -> tuple[int, ...]:
        """Indices strictly above ``a`` in the relation."""
        return self._up[a]

    def down(self, a: int) -> tuple[int, ...]:
        return self._down[a]

    def phi_x(self, x: int) -> tuple[int, ...]:
        return self._phi_x[x]

    def phi_of(self, s: Iterable[int]) -> tuple[int, ...]:
        """Indices whose object set contains ``s``."""
        s = list(s)
        if not s:
            return tuple(range(self.num_indices))
        out = set(self._phi_x[s[0]])
        for x in s[1:]:
            out &= set(self._phi_x[x])
        return tuple(sorted(out))

    def functor(self, a: int, b: int) -> np.ndarray:
        if a == b:
            return np.arange(self.local[a].num_arrows, dtype=np.int64)
        return self.functors[(a, b)]

    def index_of(self, label: str) -> int:
        return self.index_labels.index(label)

    def point_of(self, label: str) -> int:
        return self.points.index(label)

    def is_discrete_relation(self) -> bool:
        return not self.relation

    def with_relation(self, relation, functors) -> "Atlas":
        return Atlas(self.points, self.index_labels, self.local, frozenset(relation), functors)


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Violation:
    clause: str
    witness: tuple
    message: str

    def to_dict(self) -> dict:
        return {"clause": self.clause, "witness": [str(w) for w in self.witness], "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid

    def clauses(self) -> set[str]:
        return {v.clause for v in self.violations}

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": [v.to_dict() for v in self.violations]}


def _component_union_violation(A: Atlas, a: int, b: int) -> int | None:
    """An object of a component of ``local[a]`` that ``X_b`` splits, else ``None``."""
    g = A.local[a]
    xb = A.X(b)
    for c in g.comps:
        inside = [x in xb for x in c.objects]
        if any(inside) and not all(inside):
            return c.objects[inside.index(False)]
    return None


def validate_atlas(A: Atlas, check_coherence: bool = True) -> ValidationReport:
    """Check every clause of the groupoid atlas definition, with witnesses."""
    out: list[Violation] = []
    n = A.num_points
    for a, g in enumerate(A.local):
        if g.num_objects == 0:
            out.append(Violation("nonempty", (A.index_labels[a],), "local groupoid has no objects"))
        bad = [x for x in g.objects.tolist() if not 0 <= x < n]
        if bad:
            out.append(Violation("objects", (A.index_labels[a], bad[0]), "object outside the underlying set"))
    for x in range(n):
        if not A.phi_x(x):
            out.append(Violation("covered", (A.points[x],), "point lies in no local groupoid"))
    for a, b in sorted(A.relation):
        if not (0 <= a < A.num_indices and 0 <= b < A.num_indices):
            out.append(Violation("relation", (a, b), "relation refers to an unknown index"))
            continue
        la, lb = A.index_labels[a], A.index_labels[b]
        x = _component_union_violation(A, a, b)
        if x is not None:
            out.append(Violation(
                "union_of_components", (la, lb, A.points[x]),
                "X_a & X_b is not a union of components of the smaller local groupoid",
            ))
            continue
        F = A.functors.get((a, b))
        if F is None:
            out.append(Violation("functor_missing", (la, lb), "no structural functor"))
            continue
        F = np.asarray(F)
        ga = A.local[a]
        if F.shape != (ga.num_arrows,):
            out.append(Violation("functor_domain", (la, lb), "arrow map has the wrong length"))
            continue
        inter = A.X(a) & A.X(b)
        want = np.isin(ga.src, list(inter)) if inter else np.zeros(ga.num_arrows, dtype=bool)
        if not np.array_equal(F >= 0, want):
            k = int(np.flatnonzero((F >= 0) != want)[0])
            out.append(Violation("functor_domain", (la, lb, k), "functor not defined exactly on X_a & X_b"))
            continue
        w = functor_violation(F, ga, A.local[b])
        if w is not None:
            out.append(Violation("functor", (la, lb) + tuple(w), "structural map is not an identity-on-objects functor"))
    if check_coherence and not out:
        for a, b in sorted(A.relation):
            for c in A.up(a):
                if c == b or not A.leq(c, b):
                    continue
                common = A.X(a) & A.X(b) & A.X(c)
                if not common:
                    continue
                ga = A.local[a]
                sel = np.flatnonzero(np.isin(ga.src, list(common)) & np.isin(ga.tgt, list(common)))
                lhs = compose_maps(A.functor(c, b), A.functor(a, c)[sel])
                rhs = A.functor(a, b)[sel]
                bad = np.flatnonzero(lhs != rhs)
                if bad.size:
                    out.append(Violation(
                        "coherence",
                        (A.index_labels[a], A.index_labels[c], A.index_labels[b], int(sel[bad[0]])),
                        "structural functors do not compose",
                    ))
    return ValidationReport(tuple(out))


def require_valid(A: Atlas) -> Atlas:
    rep = validate_atlas(A)
    if not rep.valid:
        v = rep.violations[0]
        raise InvalidAtlas(f"{v.clause}: {v.message} {v.witness}", report=rep)
    return A


# ---------------------------------------------------------------- predicates

@dataclass(frozen=True)
class PredicateReport:
    values: dict
    witnesses: dict

    def __getitem__(self, key: str) -> bool:
        return self.values[key]

    def to_dict(self) -> dict:
        return {
            k: {"value": v, **({"witness": [str(w) for w in self.witnesses[k]]} if k in self.witnesses else {})}
            for k, v in self.values.items()
        }


def initial_element(A: Atlas, candidates: Sequence[int]) -> int | None:
    """The smallest index ``a`` among ``candidates`` with ``a <= b`` for every candidate."""
    cand = list(candidates)
    for a in sorted(cand):
        if all(A.leq(a, b) for b in cand):
            return a
    return None


def is_filtered(A: Atlas, candidates: Sequence[int]) -> tuple | None:
    """A pair without a common lower bound inside ``candidates``, else ``None``."""
    cand = list(candidates)
    if not cand:
        return ("empty",)
    for a, b in combinations(cand, 2):
        if not any(A.leq(c, a) and A.leq(c, b) for c in cand):
            return (a, b)
    return None


def frame_index_sets(A: Atlas) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All distinct sets ``phi_s`` for local frames ``s``, each with a witness frame.

    For frames inside one component ``C`` the sets ``phi_s`` are exactly the
    nonempty intersections of subfamilies of ``{phi_x : x in C}``, so the
    family is closed under pairwise intersection instead of enumerating
    subsets of ``C``.
    """
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    done_components: set[tuple[int, ...]] = set()
    for g in A.local:
        for c in g.comps:
            if c.objects in done_components:
                continue
            done_components.add(c.objects)
            family: dict[frozenset[int], tuple[int, ...]] = {}
            for x in c.objects:
                family.setdefault(frozenset(A.phi_x(x)), (x,))
            frontier = list(family.items())
            while frontier:
                nxt = []
                base = list(family.items())
                for s1, w1 in frontier:
                    for s2, w2 in base:
                        s = s1 & s2
                        if s not in family:
                            family[s] = tuple(sorted(set(w1) | set(w2)))
                            nxt.append((s, family[s]))
                frontier = nxt
            for s, w in family.items():
                key = tuple(sorted(s))
                if key not in seen or len(w) < len(seen[key]):
                    seen[key] = w
    return sorted((k, w) for k, w in seen.items())


def is_irreducible(A: Atlas) -> bool:
    return all(g.is_connected() for g in A.local)


def require_irreducible(A: Atlas) -> None:
    for a, g in enumerate(A.local):
        if not g.is_connected():
            raise NotIrreducible(f"local groupoid {A.index_labels[a]} is not connected")


def predicates(A: Atlas, strong_dim: int = 2, budget: int | None = None) -> PredicateReport:
    """Structural predicates of an atlas, with witnesses for failures.

    ``infimum_strong`` is evaluated over strong nerve simplices up to
    ``strong_dim``.
    """
    values: dict[str, bool] = {}
    wit: dict[str, tuple] = {}

    uncovered = [x for x in range(A.num_points) if not A.phi_x(x)]
    values["covered"] = not uncovered
    if uncovered:
        wit["covered"] = (A.points[uncovered[0]],)

    disconnected = [a for a, g in enumerate(A.local) if not g.is_connected()]
    values["irreducible"] = not disconnected
    if disconnected:
        wit["irreducible"] = (A.index_labels[disconnected[0]],)

    good, regular = True, True
    for x in range(A.num_points):
        a0 = initial_element(A, A.phi_x(x))
        if a0 is None:
            if good:
                wit["good"] = (A.points[x],) + tuple(A.index_labels[a] for a in A.phi_x(x))
            good = False
            continue
        g = A.local[a0]
        if regular and not (g.num_objects == 1 and g.num_arrows == 1):
            wit["regular"] = (A.points[x], A.index_labels[a0])
            regular = False
    values["good"] = good
    values["regular"] = good and regular
    if not good:
        wit["regular"] = wit["good"]

    infimum, filtered = True, True
    for phis, frame in frame_index_sets(A):
        if infimum and initial_element(A, phis) is None:
            infimum = False
            wit["infimum"] = tuple(A.points[x] for x in frame)
        if filtered and is_filtered(A, phis) is not None:
            filtered = False
            wit["filtered"] = tuple(A.points[x] for x in frame)
    values["infimum"] = infimum
    values["filtered"] = filtered

    from ..nerve import strong_index_sets  # local import: nerve depends on atlas

    strong = True
    for phis, label in strong_index_sets(A, strong_dim, budget=budget):
        if initial_element(A, phis) is None:
            strong = False
            wit["infimum_strong"] = (label,)
            break
    values["infimum_strong"] = strong
    return PredicateReport(values, wit)


def transitive_closure(A: Atlas) -> Atlas:
    """Close the relation of an irreducible atlas under composition.

    Pairs ``a <= b`` with disjoint object sets carry no data and are
    dropped.  Raises ``InvalidAtlas`` if two chains from ``a`` to ``b``
    induce different functors.
    """
    require_irreducible(A)
    functors = {}
    rel = set()
    for a, b in A.relation:
        if A.X(a) & A.X(b):
            rel.add((a, b))
            functors[(a, b)] = np.asarray(A.functors[(a, b)])
    changed = True
    while changed:
        changed = False
        for a, b in sorted(rel):
            for c in sorted(x for (y, x) in rel if y == b):
                if c == a:
                    continue
                comp = compose_maps(functors[(b, c)], functors[(a, b)])
                if (a, c) in rel:
                    if not np.array_equal(functors[(a, c)], comp):
                        raise InvalidAtlas(
                            f"chains {A.index_labels[a]} <= {A.index_labels[c]} induce different functors"
                        )
                else:
                    rel.add((a, c))
                    functors[(a, c)] = comp
                    changed = True
    return A.with_relation(rel, functors)
