"""Dual certificates from geometry: simplex and multiway-cut embeddings."""

from fractions import Fraction as F

import pytest

from steiner_gaps.constructions import closed_form_cost
from steiner_gaps.embeddings import (SimplexEmbedding,
                                     canonical_simplex_embedding,
                                     ckr_canonical_for_dual, ckr_gap_formula,
                                     ckr_labeling_embedding, ckr_objective,
                                     embedding_from_json, embedding_to_json,
                                     scale_embedding, se_errors, se_objective,
                                     verify_se)
from steiner_gaps.graphs import Graph, SteinerInstance
from steiner_gaps.instances import gen_multiway_dual, gen_simplex_instance
from steiner_gaps.oracles import exact_multiway_cut, multiway_cut_edges


@pytest.mark.parametrize("d,s", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_canonical_embedding_certifies_2sd(d, s):
    inst = gen_simplex_instance(d, s)
    emb = canonical_simplex_embedding(inst)
    assert verify_se(inst, emb, above=True)
    assert se_objective(inst, emb) == 2 * s * d


def test_canonical_embedding_fails_strict_variant():
    # Top-layer points sum to s+1, so the equality-on-all-vertices variant
    # rejects the canonical embedding while the above-variant accepts it.
    inst = gen_simplex_instance(2, 2)
    emb = canonical_simplex_embedding(inst)
    errs = se_errors(inst, emb, above=False)
    assert errs and any("coordinate sum" in e for e in errs)


def test_se_errors_catch_each_violation():
    inst = SteinerInstance(Graph(2, {(0, 1): F(1)}), (0, 1), "pair")
    good = SimplexEmbedding(y={0: (F(1), F(0)), 1: (F(1, 2), F(1, 2))},
                            size=F(1))
    assert verify_se(inst, good, above=False)

    missing = SimplexEmbedding(y={0: (F(1), F(0))}, size=F(1))
    assert "cover" in se_errors(inst, missing, above=False)[0]

    neg = SimplexEmbedding(y={0: (F(2), F(-1)), 1: (F(0), F(1))}, size=F(1))
    assert any("negative" in e for e in se_errors(inst, neg, above=False))

    stretched = SimplexEmbedding(y={0: (F(1), F(0)), 1: (F(0), F(1))}, size=F(1))
    assert any("stretch" in e for e in se_errors(inst, stretched, above=False))

    wrong_dim = SimplexEmbedding(y={0: (F(1),), 1: (F(1),)}, size=F(1))
    assert any("coordinates" in e for e in se_errors(inst, wrong_dim, above=False))


def test_scale_embedding_preserves_feasibility():
    inst = gen_simplex_instance(2, 2)
    emb = canonical_simplex_embedding(inst)
    half = scale_embedding(emb, F(1, 2))
    assert verify_se(inst, half, above=True)
    assert se_objective(inst, half) == F(1, 2) * se_objective(inst, emb)
    assert half.size == F(1)


def test_ckr_objective_of_integral_labeling_is_cut_cost():
    inst = gen_multiway_dual(4, 2)
    res = exact_multiway_cut(inst)
    x = ckr_labeling_embedding(inst, res.witness)
    assert ckr_objective(inst, x) == res.optimum == 16
    cut = multiway_cut_edges(inst, res.witness)
    assert sum(inst.graph.cost(*e) for e in cut) == 16


def test_ckr_objective_validation():
    inst = gen_multiway_dual(4, 2)
    good = ckr_labeling_embedding(inst, exact_multiway_cut(inst).witness)
    with pytest.raises(ValueError):
        ckr_objective(inst, {v: vec for v, vec in good.items() if v != 0})
    bad = dict(good)
    bad[next(iter(inst.steiner_vertices))] = (F(1, 2), F(1, 2), F(1, 2))
    with pytest.raises(ValueError):
        ckr_objective(inst, bad)
    bad2 = dict(good)
    r0 = inst.required[0]
    bad2[r0] = (F(0), F(1), F(0))
    with pytest.raises(ValueError):
        ckr_objective(inst, bad2)
    two = SteinerInstance(Graph(2, {(0, 1): F(1)}), (0, 1), "pair")
    with pytest.raises(ValueError):
        ckr_objective(two, {0: (F(1), F(0), F(0)), 1: (F(0), F(1), F(0))})


@pytest.mark.parametrize("s,delta,value", [(4, 2, F(15)), (7, 3, F(26)),
                                           (9, 3, F(333, 10))])
def test_ckr_canonical_matches_closed_form(s, delta, value):
    inst, x = ckr_canonical_for_dual(s, delta)
    obj = ckr_objective(inst, x)
    assert obj == value
    assert obj == closed_form_cost(2, s, delta)
    q = 2 * s - 3 * delta + 1
    assert F(4 * s) / obj == ckr_gap_formula(q)


def test_ckr_gap_formula_residues():
    assert ckr_gap_formula(3) == F(16, 15)
    assert ckr_gap_formula(6) == F(14, 13)
    assert ckr_gap_formula(10) == F(40, 37)
    assert ckr_gap_formula(8) == F(256, 237)
    with pytest.raises(ValueError):
        ckr_gap_formula(0)
    # q = 8 comes from (s, delta) = (8, 3); cross-check against the cost.
    assert F(32) / closed_form_cost(2, 8, 3) == ckr_gap_formula(8)


def test_embedding_json_round_trip():
    inst = gen_simplex_instance(2, 2)
    emb = scale_embedding(canonical_simplex_embedding(inst), F(1, 3))
    back = embedding_from_json(embedding_to_json(emb))
    assert back.size == emb.size
    assert back.y == dict(emb.y)
