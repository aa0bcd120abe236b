"""Named example atlases and seeded random generators.

Every example is built fresh on each call, so callers may cache nerves on
the returned atlas without affecting anybody else.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra.groups import (
    FiniteGroup,
    cyclic_group,
    dihedral_group,
    group_from_permutations,
    subgroup_closure,
    symmetric_group,
)
from .atlas.constructors import (
    explicit_atlas,
    from_global_action,
    from_simplicial_complex,
    from_single_groupoid,
    gl_atlas,
    sphere,
)
from .atlas.model import Atlas
from .groupoid import action_groupoid, groupoid_from_components, one_object_groupoid, tree_groupoid

# a 6-vertex triangulation of the real projective plane
RP2_FACETS = (
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
    (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
)


def d3_atlas(relation: str = "discrete") -> Atlas:
    G = symmetric_group(3)
    r, s = G.labels.index("r"), G.labels.index("s")
    return from_global_action(G, [[r], [s]], relation=relation)


def rombitos() -> Atlas:
    """Two trees on ``{a, b, c}`` and ``{a, b, d}`` with a discrete index relation."""
    return explicit_atlas(list("abcd"), [tree_groupoid([0, 1, 2]), tree_groupoid([0, 1, 3])], ["T1", "T2"])


def two_trees(n: int = 3) -> Atlas:
    """Two copies of the tree on ``n`` points, unrelated."""
    pts = [str(i) for i in range(n)]
    return explicit_atlas(pts, [tree_groupoid(range(n)), tree_groupoid(range(n))], ["T1", "T2"])


def group_point(G: FiniteGroup, label: str = "G") -> Atlas:
    return from_single_groupoid(one_object_groupoid(G, 0), ["*"], label=label)


def disjoint_groups(groups: list[FiniteGroup]) -> Atlas:
    """One one-object local per group, on distinct points, unrelated."""
    local = [one_object_groupoid(G, k) for k, G in enumerate(groups)]
    return explicit_atlas([f"p{k}" for k in range(len(groups))], local, [f"G{k}" for k in range(len(groups))])


def swap_action() -> Atlas:
    """``Z/2`` swapping two of three points: one free orbit and one fixed point."""
    G = cyclic_group(2)
    table = [[0, 1, 2], [1, 0, 2]]
    return from_single_groupoid(action_groupoid(G, 3, table), ["0", "1", "2"], label="Z2")


def non_faithful() -> Atlas:
    """``Z/4`` on two points below ``Z/2`` on the same points, related by reduction mod 2."""
    a = groupoid_from_components([((0, 1), cyclic_group(4))])
    b = groupoid_from_components([((0, 1), cyclic_group(2))])
    return explicit_atlas(["p", "q"], [a, b], ["Z4", "Z2"], [(0, 1)], {(0, 1): {"rho": {0: [0, 1, 0, 1]}}})


def _cyclic_subgroups(n: int, gens: list[int], relation: str) -> Atlas:
    return from_global_action(cyclic_group(n), [[g] for g in gens], relation=relation)


def s3_reflections() -> Atlas:
    G = symmetric_group(3)
    refl = [G.labels.index(w) for w in ("s", "sr", "rs")]
    return from_global_action(G, [[x] for x in refl], relation="discrete")


CORPUS: dict[str, tuple[Callable[[], Atlas], str]] = {
    "d3_discrete": (lambda: d3_atlas("discrete"), "D3 with <r>, <s>, discrete relation"),
    "d3_inclusion": (lambda: d3_atlas("inclusion"), "D3 with <r>, <s>, inclusion relation"),
    "d3_intersection": (lambda: d3_atlas("intersection_closure"), "D3 with <r>, <s> and their intersection"),
    "rombitos": (rombitos, "two trees sharing an edge"),
    "sphere1": (lambda: sphere(1), "boundary of the 2-simplex"),
    "sphere2": (lambda: sphere(2), "boundary of the 3-simplex"),
    "simplex2": (lambda: from_simplicial_complex([(0, 1, 2)]), "the full 2-simplex"),
    "cycle4": (lambda: from_simplicial_complex([(0, 1), (1, 2), (2, 3), (0, 3)]), "a 4-cycle"),
    "rp2": (lambda: from_simplicial_complex(RP2_FACETS), "6-vertex projective plane"),
    "point": (lambda: from_simplicial_complex([(0,)]), "a single point"),
    "interval": (lambda: from_single_groupoid(tree_groupoid([0, 1]), ["0", "1"], label="I"), "the 2-object tree"),
    "a_z2": (lambda: group_point(cyclic_group(2), "Z2"), "Z/2 as a one-object groupoid"),
    "a_z3": (lambda: group_point(cyclic_group(3), "Z3"), "Z/3 as a one-object groupoid"),
    "a_s3": (lambda: group_point(symmetric_group(3), "S3"), "S3 as a one-object groupoid"),
    "two_z2": (lambda: disjoint_groups([cyclic_group(2), cyclic_group(2)]), "two unrelated Z/2 points"),
    "two_trees": (two_trees, "two unrelated trees on three points"),
    "swap_action": (swap_action, "Z/2 swapping two of three points"),
    "non_faithful": (non_faithful, "Z/4 below Z/2 by reduction"),
    "z4_z2": (lambda: _cyclic_subgroups(4, [2], "inclusion"), "Z/4 with its subgroup of order 2"),
    "z6_z2_z3": (lambda: _cyclic_subgroups(6, [3, 2], "intersection_closure"), "Z/6 with subgroups of order 2 and 3"),
    "z6_z2_z3_discrete": (lambda: _cyclic_subgroups(6, [3, 2], "discrete"), "Z/6 with subgroups of order 2 and 3, unrelated"),
    "s3_reflections": (s3_reflections, "S3 with its three reflection subgroups"),
    "gl22": (lambda: gl_atlas(2, 2), "general linear action on GL(2, Z/2)"),
    "gl23": (lambda: gl_atlas(2, 3), "general linear action on GL(2, Z/3)"),
}


def corpus_names() -> list[str]:
    return list(CORPUS)


def build(name: str) -> Atlas:
    try:
        return CORPUS[name][0]()
    except KeyError:
        raise KeyError(f"unknown corpus atlas {name!r}; known: {', '.join(CORPUS)}") from None


def corpus() -> list[tuple[str, Atlas]]:
    return [(name, build(name)) for name in CORPUS]


# ------------------------------------------------------------------ random

CYCLIC_ORDERS = (1, 2, 3, 4, 6)


@dataclass(frozen=True)
class RandomAtlasInfo:
    seed: int
    kind: str


def random_irreducible_atlas(
    seed: int, max_indices: int = 4, max_points: int = 5, discrete: bool = False
) -> Atlas:
    """Connected cyclic-group locals on random subsets, glued by reductions.

    Index ``a`` holds ``Z/n_a`` on ``S_a``.  A pair ``a <= b`` may be added
    when ``S_a`` lies in ``S_b`` and ``n_b`` divides ``n_a``; the functor
    reduces a gauge-corrected coordinate modulo ``n_b``, which makes every
    composite of structural functors agree.
    """
    rng = np.random.default_rng(seed)
    npts = int(rng.integers(1, max_points + 1))
    nidx = int(rng.integers(1, max_indices + 1))
    sets: list[tuple[int, ...]] = []
    for k in range(nidx):
        if sets and rng.random() < 0.5:
            parent = sets[int(rng.integers(len(sets)))]
            pool = list(parent) if rng.random() < 0.5 else list(range(npts))
        else:
            pool = list(range(npts))
        size = int(rng.integers(1, len(pool) + 1))
        sets.append(tuple(sorted(rng.choice(pool, size=size, replace=False).tolist())))
    covered = sorted(set().union(*sets))
    relabel = {x: k for k, x in enumerate(covered)}
    sets = [tuple(relabel[x] for x in s) for s in sets]
    orders = [int(rng.choice(CYCLIC_ORDERS)) for _ in range(nidx)]
    gauge = [{x: int(rng.integers(orders[a])) for x in sets[a]} for a in range(nidx)]
    local = [groupoid_from_components([(sets[a], cyclic_group(orders[a]))]) for a in range(nidx)]
    rel, data = [], {}
    if not discrete:
        for a, b in itertools.permutations(range(nidx), 2):
            if set(sets[a]) <= set(sets[b]) and orders[a] % orders[b] == 0 and rng.random() < 0.6:
                nb = orders[b]
                rho = [v % nb for v in range(orders[a])]
                twist = {x: (gauge[b][x] - gauge[a][x]) % nb for x in sets[a]}
                rel.append((a, b))
                data[(a, b)] = {"rho": {0: rho}, "twist": twist}
    return explicit_atlas(
        [f"p{k}" for k in range(len(covered))], local, [f"a{k}" for k in range(nidx)], rel, data,
    )


def _random_group(rng: np.random.Generator, max_order: int) -> FiniteGroup:
    choices = [
        lambda: cyclic_group(int(rng.integers(1, max_order + 1))),
        lambda: dihedral_group(int(rng.integers(3, max_order // 2 + 1))),
        lambda: symmetric_group(3),
        lambda: symmetric_group(4),
        lambda: group_from_permutations(4, [[1, 0, 2, 3], [0, 1, 3, 2]]),  # Klein four
        lambda: group_from_permutations(4, [[1, 2, 0, 3], [1, 0, 3, 2]]),  # A4
    ]
    while True:
        G = choices[int(rng.integers(len(choices)))]()
        if G.order <= max_order:
            return G


def random_global_action(seed: int, max_order: int = 24, max_subgroups: int = 3) -> tuple[Atlas, FiniteGroup, list[tuple[int, ...]]]:
    """``A(G, H)`` for a random small group and random cyclic or 2-generated subgroups.

    Returns the atlas, the group and the generator sets used.
    """
    rng = np.random.default_rng(seed)
    G = _random_group(rng, max_order)
    count = int(rng.integers(1, max_subgroups + 1))
    gens = []
    for _ in range(count):
        k = int(rng.integers(0, 3))
        gens.append(tuple(sorted({int(g) for g in rng.integers(0, G.order, size=k)})))
    relation = ("discrete", "inclusion", "intersection_closure")[int(rng.integers(3))]
    return from_global_action(G, gens, relation=relation), G, gens


def random_atlas(seed: int) -> Atlas:
    """Even seeds give irreducible gauge atlases, odd seeds small global actions."""
    if seed % 2 == 0:
        return random_irreducible_atlas(seed)
    return random_global_action(seed, max_order=12)[0]


DISCRETE_CORPUS = (
    "d3_discrete", "rombitos", "point", "interval", "a_z2", "a_z3", "a_s3",
    "two_z2", "two_trees", "swap_action", "z6_z2_z3_discrete", "s3_reflections",
)


def discrete_corpus(count: int = 20, seed: int = 1000) -> list[tuple[str, Atlas]]:
    """Atlases with a discrete index relation: the named ones, then seeded random ones."""
    out = [(name, build(name)) for name in DISCRETE_CORPUS]
    k = 0
    while len(out) < count:
        out.append((f"random_discrete_{seed + k}", random_irreducible_atlas(seed + k, discrete=True)))
        k += 1
    return out[:count]
