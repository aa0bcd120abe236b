from __future__ import annotations

import pytest
import sympy
from sympy.matrices.normalforms import invariant_factors

from gpdatlas.algebra.groups import cyclic_group, symmetric_group
from gpdatlas.algebra.presentations import AbelianInvariants, direct_sum
from gpdatlas.atlas.constructors import explicit_atlas, from_simplicial_complex
from gpdatlas.atlas.model import is_irreducible
from gpdatlas.atlas.transforms import dedupe_paired_indices, irreducibilize, regularize
from gpdatlas.corpus import CORPUS, build, random_atlas, random_irreducible_atlas
from gpdatlas.errors import ComplexTooLarge, GpdAtlasError, NotIrreducible, PhiNotDiscrete
from gpdatlas.fundamental import pi0, pi1_strong
from gpdatlas.groupoid import groupoid_from_components
from gpdatlas.homology import (
    chain_complex,
    group_homology,
    groupoid_homology,
    homology,
    homology_of,
    j_map_analysis,
    local_homology_comparison,
)
from gpdatlas.nerve import strong_nerve, weak_nerve

SMALL = [n for n in CORPUS if n not in ("gl23",)]


def dense_homology_oracle(C) -> list[AbelianInvariants]:
    """Homology from sympy's invariant factors of the dense boundary matrices."""
    factors = {}
    for k in range(1, C.max_dim + 1):
        if C.ranks[k] == 0 or C.ranks[k - 1] == 0:
            factors[k] = []
            continue
        M = sympy.Matrix(C.dense(k))
        factors[k] = [abs(int(d)) for d in invariant_factors(M, domain=sympy.ZZ) if d != 0]
    factors[0] = []
    out = []
    for n in range(C.max_dim):
        cycles = C.ranks[n] - len(factors[n])
        tors = tuple(d for d in factors[n + 1] if d > 1)
        out.append(AbelianInvariants(cycles - len(factors[n + 1]), tors))
    return out


Z = AbelianInvariants(1)
ZERO = AbelianInvariants(0)


def Zmod(n: int) -> AbelianInvariants:
    return AbelianInvariants(0, (n,))


# ------------------------------------------------------------ chain complex

def test_point_chain_complex():
    C = chain_complex(strong_nerve(build("point"), 3))
    assert C.ranks == (1, 0, 0, 0)


def test_z2_bar_complex_matrices():
    """The normalized bar complex of Z/2 has one basis element per degree and d_k = 1 + (-1)^k."""
    C = chain_complex(strong_nerve(build("a_z2"), 5))
    assert C.ranks == (1, 1, 1, 1, 1, 1)
    for k in range(1, 6):
        assert C.dense(k) == [[1 + (-1) ** k]]


def test_circle_bases(circle):
    assert chain_complex(strong_nerve(circle, 2)).ranks == (3, 6, 6)


@pytest.mark.parametrize("name", SMALL)
def test_boundary_squares_to_zero(name):
    C = chain_complex(strong_nerve(build(name), 3))
    for k in range(2, C.max_dim + 1):
        assert C.composite_is_zero(k)


def oracle_sized_nerve(A, cap: int = 80):
    """The deepest truncation (at most 3) whose top chain group stays small enough for dense SNF."""
    S = strong_nerve(A, 3)
    return S if S.counts[3] <= cap else strong_nerve(A, 2)


@pytest.mark.parametrize("name", SMALL)
def test_homology_matches_dense_oracle(name):
    S = oracle_sized_nerve(build(name))
    assert list(homology_of(S).groups) == dense_homology_oracle(chain_complex(S))


@pytest.mark.parametrize("seed", range(20))
def test_random_homology_matches_dense_oracle(seed):
    S = oracle_sized_nerve(random_atlas(seed))
    assert list(homology_of(S).groups) == dense_homology_oracle(chain_complex(S))


# --------------------------------------------------------------- examples

@pytest.mark.parametrize("name,K,expected", [
    ("rombitos", 4, [Z, Z, ZERO, ZERO]),
    ("sphere1", 3, [Z, Z, ZERO]),
    ("sphere2", 4, [Z, ZERO, Z, ZERO]),
    ("rp2", 3, [Z, Zmod(2), ZERO]),
    ("simplex2", 3, [Z, ZERO, ZERO]),
    ("a_z2", 5, [Z, Zmod(2), ZERO, Zmod(2), ZERO]),
    ("a_z3", 4, [Z, Zmod(3), ZERO, Zmod(3)]),
    ("two_z2", 4, [AbelianInvariants(2), AbelianInvariants(0, (2, 2)), ZERO, AbelianInvariants(0, (2, 2))]),
])
def test_known_homology(name, K, expected):
    H = homology(build(name), K)
    assert H.valid_up_to == K - 1
    assert list(H.groups) == expected


def test_beyond_validity_bound_is_an_error():
    H = homology(build("sphere1"), 3)
    assert H[1] == Z
    with pytest.raises(GpdAtlasError):
        H[3]


def test_bad_truncation():
    with pytest.raises(GpdAtlasError):
        homology(build("point"), 0)


def test_budget_propagates():
    with pytest.raises(ComplexTooLarge):
        homology(build("a_s3"), 6, budget=50)


def test_weak_nerve_homology_of_d3(d3):
    H = homology(d3, 3, nerve="weak")
    assert H[0] == Z and H[1] == AbelianInvariants(2)


def test_to_dict(circle):
    d = homology(circle, 3).to_dict()
    assert d["valid_up_to"] == 2
    assert [g["text"] for g in d["groups"]] == ["Z", "Z", "0"]


# --------------------------------------------------------------- invariants

@pytest.mark.parametrize("name", SMALL)
def test_h0_counts_components(name):
    A = build(name)
    assert homology(A, 2)[0] == AbelianInvariants(pi0(A).count)


@pytest.mark.parametrize("name", SMALL)
def test_h1_is_abelianized_pi1(name):
    A = build(name)
    per = [pi1_strong(A, x).abelianization for x in pi0(A).representatives]
    assert homology(A, 2)[1] == direct_sum(per)


@pytest.mark.parametrize("name", SMALL)
def test_equivalent_atlases_have_equal_homology(name):
    A = build(name)
    ref = homology(A, 3).groups
    assert homology(regularize(A).atlas, 3).groups == ref
    irr = irreducibilize(A).atlas
    assert homology(irr, 3).groups == ref
    assert homology(dedupe_paired_indices(irr).atlas, 3).groups == ref


@pytest.mark.parametrize("G", [cyclic_group(2), cyclic_group(4), symmetric_group(3)], ids=["Z2", "Z4", "S3"])
def test_group_homology_low_degrees(G):
    H = group_homology(G, 3)
    ab = {2: Zmod(2), 4: Zmod(4), 6: Zmod(2)}[G.order]
    assert H[0] == Z and H[1] == ab


def test_single_index_is_sum_of_vertex_groups():
    both = groupoid_from_components([((0,), cyclic_group(2)), ((1, 2), cyclic_group(1))])
    A = explicit_atlas(["x", "y", "z"], [both], ["G"])
    expected = groupoid_homology([cyclic_group(2), cyclic_group(1)], 4)
    assert list(homology(A, 4).groups) == expected


# -------------------------------------------------------------------- j-map

def test_j_on_circle_is_injective_despite_cycles(circle):
    rep = j_map_analysis(circle, 2)
    assert rep.injective
    assert rep.equivalence_holds


def test_j_on_a_chain_of_three_is_not_injective():
    A = from_simplicial_complex([(0, 1, 2)])
    rep = j_map_analysis(A, 2)
    assert not rep.injective
    assert not rep.acyclic
    assert rep.equivalence_holds
    assert rep.cycle_witnesses


def test_j_on_discrete_relation_has_empty_source(rombitos):
    rep = j_map_analysis(rombitos, 2)
    assert all(d.source_rank == 0 for d in rep.dims)
    assert rep.injective


def test_j_requires_irreducible():
    A = build("d3_intersection")
    assert not is_irreducible(A)
    with pytest.raises(NotIrreducible):
        j_map_analysis(A)


@pytest.mark.parametrize("seed", range(30))
def test_j_kernel_matches_class_cycles_on_random_irreducible(seed):
    rep = j_map_analysis(random_irreducible_atlas(seed), 2)
    assert rep.equivalence_holds


def test_j_kernel_rank_is_cycle_rank():
    """Incidence maps of graphs have kernel rank equal to the cycle rank."""
    for seed in range(15):
        for d in j_map_analysis(random_irreducible_atlas(seed), 2).dims:
            assert d.kernel_rank == d.cycle_rank


# -------------------------------------------------------- discrete relation

def test_local_comparison_two_z2():
    rep = local_homology_comparison(build("two_z2"), 4)
    assert rep.local_sums[3] == AbelianInvariants(0, (2, 2))
    assert rep.holds


def test_local_comparison_rombitos(rombitos):
    rep = local_homology_comparison(rombitos, 4)
    assert rep.free_surplus_h1 == 1
    assert rep.holds


def test_local_comparison_single_local():
    rep = local_homology_comparison(build("a_s3"), 4)
    assert rep.free_surplus_h1 == 0 and rep.holds


def test_local_comparison_needs_discrete_relation():
    with pytest.raises(PhiNotDiscrete):
        local_homology_comparison(build("d3_intersection"), 3)
