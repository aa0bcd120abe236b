from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from gpdatlas.algebra.groups import (
    cyclic_group,
    general_linear_group,
    subgroup_closure,
    symmetric_group,
)
from gpdatlas.algebra.presentations import AbelianInvariants, abelianization, direct_sum
from gpdatlas.atlas.constructors import from_global_action, gl_atlas
from gpdatlas.corpus import CORPUS, build, random_atlas, random_global_action
from gpdatlas.errors import BasePointNotFound, GpdAtlasError, TreeMismatch
from gpdatlas.fundamental import (
    check_p_iso_hypotheses,
    colimit_embedding_check,
    global_arrows,
    p_induced,
    pi0,
    pi1_strong,
    pi1_via_nerve,
    pi1_weak,
    resolve_point,
    vietoris_edges,
)
from gpdatlas.nerve import maximal_frames

CONNECTED = [n for n in CORPUS if n not in ("two_z2", "swap_action", "z4_z2", "gl23")]


def frame_graph_components(A) -> int:
    """Oracle: connected components of the graph joining any two points that share a local frame."""
    G = nx.Graph()
    G.add_nodes_from(range(A.num_points))
    for f in maximal_frames(A):
        G.add_edges_from((f[0], y) for y in f[1:])
    return nx.number_connected_components(G)


def det_mod(flat, n, m) -> int:
    M = np.array(flat, dtype=np.int64).reshape(n, n)
    return int(round(np.linalg.det(M))) % m


# ------------------------------------------------------------------ pi0

def test_pi0_d3_connected(d3):
    assert pi0(d3).count == 1


@pytest.mark.parametrize("G", [cyclic_group(5), symmetric_group(3), symmetric_group(4)], ids=["Z5", "S3", "S4"])
def test_pi0_trivial_subgroup_gives_one_component_per_element(G):
    A = from_global_action(G, [[]])
    assert pi0(A).count == G.order


@pytest.mark.parametrize("m", [2, 3, 5])
def test_pi0_gl_matches_determinant_oracle(m):
    A = gl_atlas(2, m)
    G = general_linear_group(2, m)
    dets = {det_mod(G.elements[g], 2, m) for g in range(G.order)}
    assert pi0(A).count == len(dets)


@pytest.mark.parametrize("name", list(CORPUS))
def test_pi0_matches_frame_graph(name):
    A = build(name)
    assert pi0(A).count == frame_graph_components(A)


@pytest.mark.parametrize("seed", range(40))
def test_pi0_random_matches_frame_graph(seed):
    A = random_atlas(seed)
    assert pi0(A).count == frame_graph_components(A)


@pytest.mark.parametrize("seed", range(25))
def test_pi0_global_action_coset_formula(seed):
    A, G, gens = random_global_action(seed)
    union = sorted({g for gs in gens for g in gs})
    assert pi0(A).count == G.order // len(subgroup_closure(G, union))


def test_component_partition_helpers(rombitos):
    part = pi0(rombitos)
    assert part.representatives == (0,)
    assert part.block_of(3) == (0, 1, 2, 3)
    assert part.to_dict()["components"][0]["size"] == 4
    with pytest.raises(BasePointNotFound):
        part.block_of(9)


# --------------------------------------------------------- global arrows

@pytest.mark.parametrize("name", ["a_z2", "a_z3", "a_s3", "interval"])
def test_single_groupoid_has_one_class_per_arrow(name):
    A = build(name)
    assert len(global_arrows(A)) == A.local[0].num_arrows


def test_rombitos_has_two_distinct_edges_between_shared_points(rombitos):
    ab = [g for g in global_arrows(rombitos) if (g.source, g.target) == (0, 1) and not g.is_identity]
    assert len(ab) == 2


def test_identity_classes_one_per_point(rombitos, d3):
    for A in (rombitos, d3):
        ids = [g for g in global_arrows(A) if g.is_identity]
        assert sorted(g.source for g in ids) == list(range(A.num_points))
        assert all(g.source == g.target for g in ids)


# ----------------------------------------------------------- base points

def test_resolve_point(rombitos):
    assert resolve_point(rombitos, "c") == 2
    assert resolve_point(rombitos, 3) == 3
    for bad in ("z", 4, -1):
        with pytest.raises(BasePointNotFound):
            resolve_point(rombitos, bad)


@pytest.mark.parametrize("engine", [pi1_strong, pi1_weak, pi1_via_nerve])
def test_missing_base_point(engine, rombitos):
    with pytest.raises(BasePointNotFound):
        engine(rombitos, "nowhere")


# ------------------------------------------------------------ pi1 values

def test_d3_weak_is_free_of_rank_two(d3):
    res = pi1_weak(d3, 0)
    assert res.presentation.free_rank_detected() == 2
    assert res.describe() == "free of rank 2 (detected)"


def test_rombitos_strong_free_rank_one_weak_trivial(rombitos):
    assert pi1_strong(rombitos, "a").presentation.free_rank_detected() == 1
    assert pi1_weak(rombitos, "a").presentation.free_rank_detected() == 0


def test_two_trees_strong_free_rank_two():
    assert pi1_strong(build("two_trees"), 0).presentation.free_rank_detected() == 2


@pytest.mark.parametrize("name,expected", [
    ("a_z2", AbelianInvariants(0, (2,))),
    ("a_z3", AbelianInvariants(0, (3,))),
    ("a_s3", AbelianInvariants(0, (2,))),
])
def test_one_object_groupoid_strong_is_the_vertex_group(name, expected):
    A = build(name)
    assert pi1_strong(A, 0).abelianization == expected
    assert pi1_via_nerve(A, 0).abelianization == expected
    # a single connected local frame has a contractible Vietoris complex
    assert pi1_weak(A, 0).presentation.free_rank_detected() == 0


def test_a_s3_strong_maps_onto_s3():
    """Sending each generator to its arrow's group element kills every relator and hits all of S3."""
    res = pi1_strong(build("a_s3"), 0)
    S3 = symmetric_group(3)
    gens = res.presentation.generator_names
    assign = [S3.labels.index(name.split(":")[1].split("->")[0]) for name in gens]

    def evaluate(word):
        acc = S3.identity
        for z in word:
            g = assign[abs(z) - 1]
            acc = S3.mul[acc, g if z > 0 else S3.inv[g]]
        return acc

    assert all(evaluate(r) == S3.identity for r in res.presentation.relators)
    assert len(subgroup_closure(S3, assign)) == 6


def test_point_is_trivial():
    A = build("point")
    assert pi1_via_nerve(A, 0).abelianization.is_trivial()
    assert pi1_strong(A, 0).presentation.generator_count == 0


def test_nerve_engine_needs_two_skeleton(circle):
    with pytest.raises(GpdAtlasError):
        pi1_via_nerve(circle, 0, K=1)


@pytest.mark.parametrize("name", CONNECTED)
def test_strong_and_nerve_engines_agree_on_abelianization(name):
    A = build(name)
    assert pi1_strong(A, 0).abelianization == pi1_via_nerve(A, 0).abelianization


@pytest.mark.parametrize("name", ["two_z2", "swap_action", "z4_z2"])
def test_disconnected_engines_agree_at_every_representative(name):
    A = build(name)
    for x in pi0(A).representatives:
        assert pi1_strong(A, x).abelianization == pi1_via_nerve(A, x).abelianization


@pytest.mark.parametrize("seed", range(20))
def test_engines_agree_on_random_atlases(seed):
    A = random_atlas(seed)
    for x in pi0(A).representatives:
        assert pi1_strong(A, x).abelianization == pi1_via_nerve(A, x).abelianization


def test_base_point_independence_within_a_component(circle):
    ref = pi1_strong(circle, 0).abelianization
    for x in range(circle.num_points):
        assert pi1_strong(circle, x).abelianization == ref
        assert pi1_weak(circle, x).abelianization == ref


def test_raw_presentation_abelianizes_like_the_reduced_one(d3):
    res = pi1_strong(d3, 0)
    assert abelianization(res.raw) == res.abelianization
    assert len(res.images) == res.raw.generator_count
    for k in res.tree:
        assert res.images[k] == ()


def test_star_relations_give_the_same_group(d3):
    full = pi1_strong(d3, 0, relations="all")
    star = pi1_strong(d3, 0, relations="star")
    assert full.abelianization == star.abelianization
    assert star.presentation.free_rank_detected() == 2


def test_to_dict_is_plain(d3):
    d = pi1_weak(d3, 0).to_dict()
    assert d["engine"] == "weak"
    assert d["abelianization"]["free_rank"] == 2


# --------------------------------------------------------- prescribed tree

def test_weak_accepts_a_valid_tree(circle):
    edges = vietoris_edges(circle)
    res = pi1_weak(circle, 0, tree=edges[:2])
    assert res.presentation.free_rank_detected() == 1


@pytest.mark.parametrize("tree", [
    [(0, 1)],                  # does not span
    [(0, 1), (1, 2), (0, 2)],  # closes a cycle
    [(0, 5), (1, 2)],          # not an edge
])
def test_weak_rejects_bad_trees(circle, tree):
    with pytest.raises(TreeMismatch):
        pi1_weak(circle, 0, tree=tree)


# ----------------------------------------------------------------- the map p

@pytest.mark.parametrize("name", ["sphere1", "sphere2", "cycle4", "rp2", "simplex2", "d3_intersection", "gl22"])
def test_p_is_an_isomorphism_under_the_hypotheses(name):
    A = build(name)
    hyp = check_p_iso_hypotheses(A)
    assert hyp.passes
    P = p_induced(A, 0)
    assert P.well_defined
    assert P.abelian_iso


def test_p_kills_the_rombitos_loop(rombitos):
    P = p_induced(rombitos, 0)
    assert P.well_defined
    assert P.images == ((),)
    assert P.strong.abelianization == AbelianInvariants(1)
    assert not P.abelian_iso


def test_p_kills_torsion_of_a_group_point():
    P = p_induced(build("a_z2"), 0)
    assert P.weak.abelianization.is_trivial()
    assert P.abelian_surjective and not P.abelian_iso


def test_p_on_d3_sends_generators_to_generators(d3):
    P = p_induced(d3, 0)
    assert sorted(map(abs, (z for w in P.images for z in w))) == [1, 2]
    assert all(len(w) == 1 for w in P.images)
    assert P.abelian_iso


@pytest.mark.parametrize("seed", range(12))
def test_p_is_well_defined_and_abelian_surjective_on_random_atlases(seed):
    A = random_atlas(seed)
    for x in pi0(A).representatives:
        P = p_induced(A, x)
        assert P.well_defined
        assert P.abelian_surjective


def test_p_to_dict(d3):
    d = p_induced(d3, 0).to_dict()
    assert len(d["generator_images"]) == 2
    assert d["abelian_iso"] is True


# ------------------------------------------------------------- hypotheses

@pytest.mark.parametrize("name", ["sphere1", "sphere2", "rp2", "cycle4", "point"])
def test_complex_atlases_meet_the_hypotheses(name):
    hyp = check_p_iso_hypotheses(build(name))
    assert hyp.infimum and hyp.all_locals_simply_connected


def test_rombitos_fails_infimum(rombitos):
    hyp = check_p_iso_hypotheses(rombitos)
    assert hyp.all_locals_simply_connected
    assert not hyp.infimum
    assert not hyp.passes
    assert "infimum" in hyp.to_dict()["witnesses"]


def test_group_point_is_not_simply_connected():
    hyp = check_p_iso_hypotheses(build("a_z2"))
    assert not hyp.all_locals_simply_connected


# --------------------------------------------------------- colimit embedding

@pytest.mark.parametrize("name", ["sphere1", "rombitos", "d3_discrete", "two_trees", "cycle4"])
def test_colimit_embedding_on_free_examples(name):
    out = colimit_embedding_check(build(name), 0)
    assert out is not None and out["free"]
    assert out["injective"]
    assert out["arrow_count_match"]


def test_colimit_embedding_skips_non_free():
    assert colimit_embedding_check(build("a_z2"), 0) is None


def test_direct_sum_over_components_for_disconnected():
    A = build("two_z2")
    parts = [pi1_strong(A, x).abelianization for x in pi0(A).representatives]
    assert direct_sum(parts) == AbelianInvariants(0, (2, 2))
