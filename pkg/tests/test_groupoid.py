from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpdatlas.algebra.groups import cyclic_group, subgroup_closure, symmetric_group, trivial_group
from gpdatlas.errors import EmptyObjectSet, NotAnAction, ObjectNotFound
from gpdatlas.groupoid import (
    action_groupoid,
    components,
    discrete_groupoid,
    full_subgroupoid,
    functor_violation,
    groupoid_from_components,
    left_multiplication_groupoid,
    tree_groupoid,
    vertex_group,
)


def orbits_by_search(table: np.ndarray) -> list[set[int]]:
    """Orbits of an action table by plain graph search (independent of the groupoid code)."""
    n = table.shape[1]
    seen, out = set(), []
    for x in range(n):
        if x in seen:
            continue
        orbit, stack = {x}, [x]
        while stack:
            y = stack.pop()
            for z in table[:, y].tolist():
                if z not in orbit:
                    orbit.add(z)
                    stack.append(z)
        seen |= orbit
        out.append(orbit)
    return out


def check_groupoid_axioms(gpd) -> None:
    arrows = range(gpd.num_arrows)
    for f in arrows:
        x, y = int(gpd.src[f]), int(gpd.tgt[f])
        assert gpd.compose(gpd.identity(y), f) == f == gpd.compose(f, gpd.identity(x))
        assert gpd.compose(gpd.inverse(f), f) == gpd.identity(x)
    for f, g, h in itertools.product(arrows, repeat=3):
        if gpd.tgt[f] == gpd.src[g] and gpd.tgt[g] == gpd.src[h]:
            assert gpd.compose(h, gpd.compose(g, f)) == gpd.compose(gpd.compose(h, g), f)


class TestActionGroupoid:
    def test_rotation_subgroup_on_d3(self, d3_group):
        G = d3_group
        gpd = left_multiplication_groupoid(G, subgroup_closure(G, [G.labels.index("r")]))
        assert (gpd.num_objects, gpd.num_arrows, len(gpd.comps)) == (6, 18, 2)
        assert all(len(c.objects) == 3 for c in gpd.comps)
        # the action is free, so every vertex group is trivial
        assert all(vertex_group(gpd, x).order == 1 for x in range(6))

    def test_reflection_subgroup_on_d3(self, d3_group):
        G = d3_group
        gpd = left_multiplication_groupoid(G, subgroup_closure(G, [G.labels.index("s")]))
        assert (gpd.num_objects, gpd.num_arrows, len(gpd.comps)) == (6, 12, 3)

    def test_trivial_group_gives_discrete(self):
        gpd = action_groupoid(trivial_group(), 4, [[0, 1, 2, 3]])
        assert gpd.is_discrete() and len(gpd.comps) == 4

    def test_z2_on_a_point(self):
        gpd = action_groupoid(cyclic_group(2), 1, [[0], [0]])
        assert vertex_group(gpd, 0).order == 2

    def test_rejects_non_action(self):
        # the nontrivial element of Z/3 would have to act with order dividing 3
        with pytest.raises(NotAnAction):
            action_groupoid(cyclic_group(3), 2, [[0, 1], [1, 0], [0, 1]])
        with pytest.raises(NotAnAction):
            action_groupoid(cyclic_group(2), 2, [[1, 0], [0, 1]])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_components_match_orbit_search(self, seed):
        rng = np.random.default_rng(seed)
        G = symmetric_group(4)
        gens = rng.integers(0, G.order, size=int(rng.integers(0, 3))).tolist()
        H = subgroup_closure(G, gens)
        gpd = left_multiplication_groupoid(G, H)
        table = G.mul[np.array(H), :]
        expected = sorted(sorted(o) for o in orbits_by_search(table))
        assert sorted(list(c.objects) for c in gpd.comps) == expected
        assert gpd.num_arrows == len(H) * G.order

    def test_axioms_exhaustively(self, d3_group):
        G = d3_group
        check_groupoid_axioms(left_multiplication_groupoid(G, subgroup_closure(G, [G.labels.index("s")])))
        check_groupoid_axioms(groupoid_from_components([((0, 2), cyclic_group(3)), ((1,), cyclic_group(2))]))


class TestTreesAndComponents:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_tree_arrow_count(self, n):
        gpd = tree_groupoid(range(n))
        assert gpd.num_arrows == n * n
        assert len(components(gpd)) == 1
        assert vertex_group(gpd, 0).order == 1

    def test_empty_tree_rejected(self):
        with pytest.raises(EmptyObjectSet):
            tree_groupoid([])

    def test_discrete_components(self):
        assert len(components(discrete_groupoid(range(4)))) == 4

    def test_hom_sets_have_equal_size(self):
        gpd = groupoid_from_components([((0, 1, 3), cyclic_group(4)), ((2, 5), symmetric_group(3))])
        for c in gpd.comps:
            for x, y in itertools.product(c.objects, repeat=2):
                assert len(gpd.hom(x, y)) == len(gpd.hom(x, x))

    def test_full_subgroupoid(self):
        I = tree_groupoid([0, 1])
        sub = full_subgroupoid(I, [1])
        assert sub.num_objects == 1 and sub.num_arrows == 1
        assert full_subgroupoid(I, [0, 1]).num_arrows == I.num_arrows
        assert full_subgroupoid(I, []).num_arrows == 0
        gpd = groupoid_from_components([((0, 1, 2), cyclic_group(2)), ((3,), trivial_group())])
        restricted = full_subgroupoid(gpd, gpd.comps[0].objects)
        assert len(components(restricted)) == 1

    def test_missing_object(self):
        with pytest.raises(ObjectNotFound):
            vertex_group(tree_groupoid([0, 1]), 7)


class TestFunctors:
    def test_identity_is_functor(self):
        gpd = groupoid_from_components([((0, 1), cyclic_group(4))])
        assert functor_violation(np.arange(gpd.num_arrows), gpd, gpd) is None

    def test_non_homomorphism_detected(self):
        gpd = groupoid_from_components([((0,), cyclic_group(3))])
        F = np.array([0, 0, 1])  # 1 -> 0, 2 -> 1 is not a homomorphism
        assert functor_violation(F, gpd, gpd) is not None
