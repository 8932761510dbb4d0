"""Exact reference solvers: Steiner tree, multiway cut, set cover."""

import random
from fractions import Fraction as F

import pytest

from steiner_gaps.graphs import Graph, SteinerInstance, tree_edges_valid
from steiner_gaps.instances import (gen_multiway_dual, gen_simplex_instance,
                                    gen_simplified_simplex_instance)
from steiner_gaps.oracles import (SizeLimitExceeded, exact_multiway_cut,
                                  exact_set_cover, exact_steiner_tree,
                                  mst_two_approx, multiway_cut_edges,
                                  steiner_tree_by_subsets)


def random_instance(rng, n, p=0.5, rcount=3):
    while True:
        edges = {}
        for v in range(n):
            for w in range(v + 1, n):
                if rng.random() < p:
                    edges[(v, w)] = F(rng.randint(1, 9))
        g = Graph(n, edges)
        req = tuple(rng.sample(range(n), rcount))
        if g.connects(req):
            return SteinerInstance(g, req, f"rand{n}")


def test_steiner_tree_pinned_values():
    assert exact_steiner_tree(gen_simplex_instance(2, 2)).optimum == 8
    assert exact_steiner_tree(gen_simplex_instance(2, 3)).optimum == 12
    assert exact_steiner_tree(gen_simplified_simplex_instance(2, 4, 2)).optimum == 16
    assert exact_steiner_tree(gen_multiway_dual(4, 2)).optimum == 15


def test_steiner_witness_is_valid_tree():
    inst = gen_simplex_instance(2, 2)
    res = exact_steiner_tree(inst)
    assert tree_edges_valid(inst.graph, res.witness, inst.required)
    assert inst.graph.total_cost(res.witness) == res.optimum
    # Non-required leaves are pruned away.
    degree = {}
    for v, w in res.witness:
        degree[v] = degree.get(v, 0) + 1
        degree[w] = degree.get(w, 0) + 1
    req = set(inst.required)
    for v, dval in degree.items():
        assert dval > 1 or v in req


def test_dp_and_subset_solvers_agree():
    rng = random.Random(7)
    for trial in range(25):
        n = rng.randint(4, 8)
        inst = random_instance(rng, n, p=0.6, rcount=rng.randint(2, min(4, n)))
        a = exact_steiner_tree(inst)
        b = steiner_tree_by_subsets(inst)
        assert a.optimum == b.optimum, (trial, inst.name)
        assert tree_edges_valid(inst.graph, a.witness, inst.required)
        assert tree_edges_valid(inst.graph, b.witness, inst.required)


def test_mst_heuristic_within_factor_two():
    rng = random.Random(99)
    for _ in range(15):
        inst = random_instance(rng, rng.randint(4, 9), p=0.7)
        opt = exact_steiner_tree(inst)
        approx = mst_two_approx(inst)
        assert tree_edges_valid(inst.graph, approx.witness, inst.required)
        assert opt.optimum <= approx.optimum <= 2 * opt.optimum


def test_single_terminal_and_disconnected():
    g = Graph(3, {(0, 1): F(1)})
    assert exact_steiner_tree(SteinerInstance(g, (0,), "one")).optimum == 0
    with pytest.raises(ValueError):
        exact_steiner_tree(SteinerInstance(g, (0, 2), "disc"))


def test_steiner_size_guard():
    # 11 terminals and 21 Steiner vertices exceed both strategies.
    n = 32
    edges = {(v, v + 1): F(1) for v in range(n - 1)}
    inst = SteinerInstance(Graph(n, edges), tuple(range(11)), "big")
    with pytest.raises(SizeLimitExceeded):
        exact_steiner_tree(inst)


def test_multiway_cut_triangle():
    # Unit triangle on three terminals: every edge joins two different
    # terminal classes, so the whole edge set is the unique multiway cut.
    g = Graph(3, {(0, 1): F(1), (1, 2): F(1), (0, 2): F(1)})
    inst = SteinerInstance(g, (0, 1, 2), "triangle")
    res = exact_multiway_cut(inst)
    assert res.optimum == 3
    cut = multiway_cut_edges(inst, res.witness)
    assert len(cut) == 3


def test_multiway_cut_dual_instance():
    inst = gen_multiway_dual(4, 2)
    res = exact_multiway_cut(inst)
    assert res.optimum == 16
    # The witness labels every vertex with a terminal class.
    assert set(res.witness) == set(inst.graph.vertices())
    assert sorted(set(res.witness.values())) == [0, 1, 2]
    cut = multiway_cut_edges(inst, res.witness)
    assert sum(inst.graph.cost(*e) for e in cut) == 16
    # Removing the cut separates the three terminals pairwise.
    rest = [e for e in inst.graph.edges() if e not in set(cut)]
    comp_of = {}
    for i, comp in enumerate(inst.graph.components(rest)):
        for v in comp:
            comp_of[v] = i
    r = inst.required
    assert len({comp_of[t] for t in r}) == 3


def test_multiway_cut_guards():
    g = Graph(4, {(0, 1): F(1), (1, 2): F(1), (2, 3): F(1)})
    with pytest.raises(SizeLimitExceeded):
        exact_multiway_cut(SteinerInstance(g, (0, 1), "two"))
    big = gen_simplex_instance(2, 3)  # 19 Steiner vertices > 12
    with pytest.raises(SizeLimitExceeded):
        exact_multiway_cut(big)


def test_set_cover():
    family = [{1, 2}, {2, 3}, {3, 4}, {1, 4}]
    res = exact_set_cover(family)
    assert res.optimum == 2
    covered = set().union(*(family[i] for i in res.witness))
    assert covered == {1, 2, 3, 4}
    assert exact_set_cover([]).optimum == 0
    # Empty member sets are skipped over, not an error.
    assert exact_set_cover([set(), {1}, set()]).optimum == 1
    with pytest.raises(SizeLimitExceeded):
        exact_set_cover([{i} for i in range(25)])
