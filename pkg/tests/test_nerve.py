from __future__ import annotations

import itertools
import json

import numpy as np
import pytest

from gpdatlas.atlas import constant_morphism, identity_morphism, irreducibilize, predicates, regularize
from gpdatlas.corpus import build, corpus, random_atlas
from gpdatlas.errors import ComplexTooLarge, SpecError
from gpdatlas.homology import chain_complex
from gpdatlas.nerve import (
    cover_nerve,
    find_section,
    induced_nerve_map,
    kan_fillers,
    nerve_counts,
    projection_p,
    simplicial_set_from_dict,
    strong_nerve,
    strong_nerve_data,
    weak_nerve,
)


# ------------------------------------------------------------------ oracles

def weak_oracle_counts(A, K):
    """Nondegenerate weak simplices by listing tuples inside every local frame."""
    frames = {c.objects for g in A.local for c in g.comps}
    counts = []
    for k in range(K + 1):
        tuples = set()
        for fr in frames:
            for t in itertools.product(fr, repeat=k + 1):
                if all(t[i] != t[i + 1] for i in range(k)):
                    tuples.add(t)
        counts.append(len(tuples))
    return tuple(counts)


def strong_oracle_counts(A, K):
    """Nondegenerate strong simplices by an explicit quotient on the regularized atlas.

    Nodes are ``(index, chain of composable arrow ids)``; a chain is glued to
    its image under every structural functor that is defined on it.  A class
    is degenerate when one of its members contains an identity arrow.
    """
    R = regularize(A).atlas
    counts = []
    for k in range(K + 1):
        parent: dict = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

        chains = {}
        for a, g in enumerate(R.local):
            if k == 0:
                out = [(int(x),) for x in g.objects.tolist()]
            else:
                out = [(f,) for f in range(g.num_arrows)]
                for _ in range(k - 1):
                    out = [c + (h,) for c in out for h in g.arrows_from(int(g.tgt[c[-1]]))]
            chains[a] = out
            for c in out:
                find((a, c))
        for a, b in R.relation:
            F = R.functor(a, b)
            Xb = R.X(b)
            for c in chains[a]:
                if k == 0:
                    if c[0] in Xb:
                        union((a, c), (b, c))
                elif all(F[f] >= 0 for f in c):
                    union((a, c), (b, tuple(int(F[f]) for f in c)))
        degenerate = set()
        for a, g in enumerate(R.local):
            if k == 0:
                continue
            for c in chains[a]:
                if any(g.is_identity(f) for f in c):
                    degenerate.add(find((a, c)))
        roots = {find(x) for x in list(parent)}
        counts.append(len(roots - degenerate))
    return tuple(counts)


SMALL = ["d3_discrete", "d3_inclusion", "rombitos", "sphere1", "simplex2", "interval", "a_z2", "a_z3",
         "two_z2", "swap_action", "non_faithful", "z4_z2", "z6_z2_z3", "s3_reflections", "gl22", "cycle4"]


class TestWeakNerve:
    def test_d3_counts(self, d3):
        S = weak_nerve(d3, 3)
        assert S.counts == weak_oracle_counts(d3, 3) == (6, 18, 30, 54)

    @pytest.mark.parametrize("m", [1, 2, 4])
    def test_connected_groupoid_is_full_simplex(self, m):
        from gpdatlas.atlas import from_single_groupoid
        from gpdatlas.groupoid import tree_groupoid

        A = from_single_groupoid(tree_groupoid(range(m)))
        assert weak_nerve(A, 3).counts == tuple(m * (m - 1) ** k for k in range(4))

    def test_point(self):
        assert weak_nerve(build("point"), 3).counts == (1, 0, 0, 0)

    @pytest.mark.parametrize("name", SMALL)
    def test_against_oracle(self, name):
        A = build(name)
        assert weak_nerve(A, 3).counts == weak_oracle_counts(A, 3)


class TestStrongNerve:
    @pytest.mark.parametrize("name", SMALL)
    def test_against_quotient_oracle(self, name):
        A = build(name)
        K = 2 if name == "gl22" else 3
        assert strong_nerve(A, K).counts == strong_oracle_counts(A, K)

    def test_a_z2(self):
        assert strong_nerve(build("a_z2"), 5).counts == (1,) * 6

    def test_rombitos_counts(self, rombitos):
        assert strong_nerve(rombitos, 4).counts == (4, 12, 24, 48, 96)

    def test_circle_equals_weak(self, circle):
        # NA_n = N^wA_n = {0,1}^(n+1) u {0,2}^(n+1) u {1,2}^(n+1), nondegenerate part
        S, W = strong_nerve(circle, 3), weak_nerve(circle, 3)
        assert S.counts == W.counts == (3, 6, 6, 6)
        assert nerve_counts(S)["counts"] == [3, 6, 6, 6]

    @pytest.mark.parametrize("name, A", corpus())
    def test_simplicial_identities(self, name, A):
        K = 2 if name.startswith("gl") else 3
        data = strong_nerve_data(A, K)
        assert data.sset.simplicial_identity_violations() == []
        assert data.well_defined_faces()
        assert weak_nerve(A, K).simplicial_identity_violations() == []

    @pytest.mark.parametrize("seed", range(30))
    def test_random_identities(self, seed):
        A = random_atlas(seed)
        data = strong_nerve_data(A, 3)
        assert data.sset.simplicial_identity_violations() == []
        assert data.well_defined_faces()

    @pytest.mark.parametrize("name", SMALL)
    def test_irreducibilization_invariance(self, name):
        A = build(name)
        assert strong_nerve(A, 3).counts == strong_nerve(irreducibilize(A).atlas, 3).counts

    def test_budget(self, d3):
        with pytest.raises(ComplexTooLarge):
            strong_nerve(d3, 3, budget=20)
        with pytest.raises(ComplexTooLarge):
            weak_nerve(d3, 3, budget=20)

    def test_budget_env(self, monkeypatch, d3):
        monkeypatch.setenv("GPDATLAS_BUDGET", "10")
        with pytest.raises(ComplexTooLarge):
            strong_nerve(build("d3_discrete"), 2)

    def test_d3_horn_has_no_filler(self, d3, d3_group):
        """The horn 1 -> r (in <r>) followed by r -> sr (in <s>) has no 2-simplex filling it."""
        G = d3_group
        r, s = G.labels.index("r"), G.labels.index("s")
        sr = G.m(s, r)
        data = strong_nerve_data(d3, 2)
        f = list(d3.local[0].hom(0, r))
        h = list(d3.local[1].hom(r, sr))
        assert len(f) == len(h) == 1
        e1 = data.classify_arrows(0, f)
        e2 = data.classify_arrows(1, h)
        assert e1 >= 0 and e2 >= 0
        assert kan_fillers(data.sset, e1, e2) == []
        # a horn inside one local groupoid does fill
        f2 = list(d3.local[0].hom(r, G.m(r, r)))
        assert kan_fillers(data.sset, e1, data.classify_arrows(0, f2)) != []


class TestProjection:
    @pytest.mark.parametrize("name", SMALL)
    def test_surjective_and_faces(self, name):
        P = projection_p(build(name), 2)
        assert all(P.is_surjective(k) for k in range(3))
        assert P.commutes_with_faces()

    @pytest.mark.parametrize("name", ["sphere1", "sphere2", "simplex2", "rp2", "cycle4", "interval"])
    def test_bijective_under_hypotheses(self, name):
        A = build(name)
        p = predicates(A, strong_dim=0)
        assert p["infimum"] and all(g.is_simply_connected() for g in A.local)
        P = projection_p(A, 3)
        assert all(P.is_bijective(k) for k in range(4))

    def test_rombitos(self, rombitos):
        P = projection_p(rombitos, 2)
        assert P.is_bijective(0)
        assert not P.is_injective(1)
        assert find_section(rombitos, 2) is None

    def test_section_exists_for_circle(self, circle):
        assert find_section(circle, 2) is not None


class TestInducedMaps:
    def test_identity(self, rombitos):
        m = induced_nerve_map(identity_morphism(rombitos), 3)
        assert all(np.array_equal(img, np.arange(img.size)) for img in m.images)

    @pytest.mark.parametrize("name", ["sphere1", "simplex2", "gl22", "z4_z2"])
    def test_regularization_inclusion_bijective(self, name):
        A = build(name)
        m = induced_nerve_map(regularize(A).inclusion, 3 if name != "gl22" else 2)
        assert all(m.is_bijective(k) for k in range(len(m.images)))
        assert m.commutes_with_faces()

    def test_constant_collapses(self, circle):
        m = induced_nerve_map(constant_morphism(circle, circle, 0), 3)
        assert (m.images[0] == m.images[0][0]).all()
        assert all((img == -1).all() for img in m.images[1:])


class TestExport:
    @pytest.mark.parametrize("name", ["rombitos", "a_z2", "d3_discrete", "rp2"])
    def test_json_round_trip(self, name):
        S = strong_nerve(build(name), 3)
        T = simplicial_set_from_dict(json.loads(S.to_json()))
        assert T.counts == S.counts
        C1, C2 = chain_complex(S), chain_complex(T)
        assert C1.ranks == C2.ranks and C1.boundaries == C2.boundaries

    def test_dot_one_skeleton(self, circle):
        dot = strong_nerve(circle, 2).to_dot()
        assert dot.startswith("digraph") and dot.count(" -> v") == 6

    @pytest.mark.parametrize(
        "doc",
        [{"kind": "other"}, {"kind": "simplicial_set", "version": "v0"},
         {"kind": "simplicial_set", "version": "v1", "max_dim": 1, "dims": [{"dim": 0, "count": 1}]},
         {"kind": "simplicial_set", "version": "v1", "max_dim": 1,
          "dims": [{"dim": 0, "count": 1}, {"dim": 1, "count": 1, "faces": [[0, 5]]}]}],
    )
    def test_bad_documents(self, doc):
        with pytest.raises(SpecError):
            simplicial_set_from_dict(doc)

    def test_cover_nerve_d3(self, d3):
        # the five orbits: two of <r>, three of <s>; each <r>-orbit meets each <s>-orbit once
        N = cover_nerve(d3, 2)
        assert N.counts[:2] == (5, 6)
