"""Exact max-flow, balance-flow construction, and the cut-condition check."""

import random
from fractions import Fraction as F

import pytest

from steiner_gaps.flows import (construct_bidirected_balance_flow, divergence,
                                gale_condition_violation, max_flow,
                                min_cut_value)
from steiner_gaps.graphs import Graph


def test_max_flow_classic_diamond():
    caps = {(0, 1): F(3), (0, 2): F(2), (1, 3): F(2), (2, 3): F(3),
            (1, 2): F(1)}
    value, flow, cut = max_flow(4, caps, 0, 3)
    assert value == 5
    assert divergence(4, flow) == [F(5), F(0), F(0), F(-5)]
    # The cut is the source side of a minimum cut: crossing arcs saturated.
    crossing = [(v, w) for (v, w) in caps if v in cut and w not in cut]
    assert sum(caps[a] for a in crossing) == 5
    for a in crossing:
        assert flow.get(a, F(0)) == caps[a]


def test_max_flow_disconnected_and_zero():
    value, flow, cut = max_flow(4, {(0, 1): F(5)}, 0, 3)
    assert value == 0 and not flow
    assert 0 in cut and 3 not in cut


def test_max_flow_fractional_capacities():
    caps = {(0, 1): F(1, 3), (1, 2): F(1, 2)}
    value, _, _ = max_flow(3, caps, 0, 2)
    assert value == F(1, 3)


def test_max_flow_rejects_negative_capacity():
    with pytest.raises(ValueError):
        max_flow(2, {(0, 1): F(-1)}, 0, 1)


def test_min_cut_value_matches_flow():
    caps = {(0, 1): F(3), (1, 2): F(1), (0, 2): F(1)}
    value, cut = min_cut_value(3, caps, 0, 2)
    assert value == 2
    assert 0 in cut and 2 not in cut


def test_balance_flow_path():
    g = Graph(3, {(0, 1): F(1), (1, 2): F(1)})
    u = {(0, 1): F(1), (1, 2): F(1)}
    flow, witness = construct_bidirected_balance_flow(g, u, {0: F(1), 2: F(-1)})
    assert witness is None
    assert divergence(3, flow) == [F(1), F(0), F(-1)]
    # At most one orientation of each edge carries flow.
    for v, w in g.edges():
        assert not (flow.get((v, w)) and flow.get((w, v)))


def test_balance_flow_infeasible_witness():
    g = Graph(3, {(0, 1): F(1), (1, 2): F(1)})
    u = {(0, 1): F(1, 2), (1, 2): F(1)}
    b = {0: F(1), 2: F(-1)}
    flow, witness = construct_bidirected_balance_flow(g, u, b)
    assert flow is None
    # The witness violates the cut condition: u(delta(X)) < b(X).
    boundary = sum(u[e] for e in g.edges()
                   if (e[0] in witness) != (e[1] in witness))
    bx = sum(b.get(v, F(0)) for v in witness)
    assert boundary < bx
    assert gale_condition_violation(g, u, b) is not None


def test_balance_flow_requires_zero_sum():
    g = Graph(2, {(0, 1): F(1)})
    with pytest.raises(ValueError):
        construct_bidirected_balance_flow(g, {(0, 1): F(1)}, {0: F(1)})


def test_balance_flow_agrees_with_brute_force_on_random_graphs():
    rng = random.Random(2024)
    for _ in range(60):
        n = rng.randint(3, 7)
        edges = {}
        for v in range(n):
            for w in range(v + 1, n):
                if rng.random() < 0.6:
                    edges[(v, w)] = F(rng.randint(0, 4), rng.randint(1, 3))
        if not edges:
            continue
        g = Graph(n, edges)
        u = {e: c for e, c in edges.items()}
        raw = [F(rng.randint(-3, 3)) for _ in range(n - 1)]
        b = {v: raw[v] for v in range(n - 1)}
        b[n - 1] = -sum(raw, F(0))
        flow, witness = construct_bidirected_balance_flow(g, u, b)
        violation = gale_condition_violation(g, u, b)
        if flow is not None:
            assert violation is None
            assert divergence(n, flow) == [b.get(v, F(0)) for v in range(n)]
            for v, w in g.edges():
                assert flow.get((v, w), F(0)) + flow.get((w, v), F(0)) <= u[(v, w)]
        else:
            assert violation is not None
            assert witness is not None
