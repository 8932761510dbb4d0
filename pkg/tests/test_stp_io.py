"""Text round trips: STP instance files, JSON sidecars, solution JSON."""

from fractions import Fraction as F

import pytest

from steiner_gaps.graphs import Graph, SteinerInstance
from steiner_gaps.instances import (gen_goemans_instance, gen_level_restricted,
                                    gen_multiway_dual, gen_simplex_instance,
                                    gen_simplified_simplex_instance,
                                    gen_split_simplified_graph, split_groups)
from steiner_gaps.oracles import exact_steiner_tree
from steiner_gaps.setcover import gen_sci, triangle_cover
from steiner_gaps.solutions import (steiner_tree_to_solution,
                                    translate_mbcr_to_ster,
                                    translate_mbfr_to_mbcr,
                                    translate_mcfr_to_mbfr, tree_solution,
                                    verify)
from steiner_gaps.stp_io import (StpParseError, instance_metadata,
                                 instances_equal, metadata_json,
                                 parse_instance, parse_stp, read_instance,
                                 serialize_graph, serialize_instance,
                                 solution_from_json, solution_to_json,
                                 write_instance)

FAMILIES = [
    gen_simplex_instance(2, 2),
    gen_simplex_instance(2, 3),
    gen_simplified_simplex_instance(2, 4, 2),
    gen_level_restricted(2, 2, 2),
    gen_goemans_instance(2),
    gen_multiway_dual(4, 2),
    gen_sci(triangle_cover(), 1),
    gen_sci(triangle_cover(), 1, extended=True),
]


@pytest.mark.parametrize("inst", FAMILIES, ids=lambda i: i.name)
def test_file_round_trip(inst, tmp_path):
    stp, sidecar = write_instance(inst, tmp_path / "inst.stp")
    assert stp.exists() and sidecar.exists()
    assert sidecar.name == "inst.stp.json"
    again = read_instance(stp)
    assert instances_equal(inst, again)


def test_text_round_trip_without_sidecar_loses_labels_only():
    inst = gen_simplex_instance(2, 2)
    again = parse_instance(serialize_instance(inst))
    g, h = inst.graph, again.graph
    assert (g.n, g.m) == (h.n, h.m)
    assert g.edges() == h.edges()
    assert all(g.cost(*e) == h.cost(*e) for e in g.edges())
    assert inst.required == again.required
    assert again.name == inst.name and again.params == {}
    assert not instances_equal(inst, again)  # labels were dropped


def test_rational_costs_use_er_lines():
    g = Graph(3, {(0, 1): F(1, 3), (1, 2): F(5, 2), (0, 2): F(2)})
    inst = SteinerInstance(g, (0, 2), "frac", {})
    text = serialize_instance(inst)
    assert "ER 1 2 1 3" in text and "ER 2 3 5 2" in text and "E 1 3 2" in text
    n, edges, terms, name = parse_stp(text)
    assert n == 3 and terms == [0, 2] and name == "frac"
    assert edges[(0, 1)] == F(1, 3) and edges[(1, 2)] == F(5, 2)


def test_parse_errors():
    good = serialize_instance(gen_simplex_instance(2, 2))
    with pytest.raises(StpParseError, match="Nodes"):
        parse_stp("SECTION Terminals\nTerminals 0\nEND\nEOF\n")
    with pytest.raises(StpParseError, match="declared Edges"):
        parse_stp(good.replace("Edges 15", "Edges 14"))
    with pytest.raises(StpParseError, match="declared Terminals"):
        parse_stp(good.replace("Terminals 3", "Terminals 4"))
    tiny = ("SECTION Graph\nNodes 2\nEdges 1\n{edge}\nEND\n"
            "SECTION Terminals\nTerminals 1\nT 1\nEND\nEOF\n")
    with pytest.raises(StpParseError, match="unknown Graph line"):
        parse_stp(tiny.format(edge="Q 1 2 1"))
    with pytest.raises(StpParseError, match="expected 'E u v cost'"):
        parse_stp(tiny.format(edge="E 1 2"))
    with pytest.raises(StpParseError, match="expected 'ER u v num den'"):
        parse_stp(tiny.format(edge="ER 1 2 1"))
    with pytest.raises(StpParseError, match="no terminals"):
        parse_instance("SECTION Graph\nNodes 2\nEdges 1\nE 1 2 1\nEND\n"
                       "SECTION Terminals\nTerminals 0\nEND\nEOF\n")
    # unrecognized sections are skipped, not fatal
    parse_stp(good.replace("EOF", "SECTION Extra\nX 1\nEND\n\nEOF"))


def test_metadata_round_trips_nested_tuples():
    inst = gen_goemans_instance(2)  # labels like ("b", 1, 2)
    meta = instance_metadata(inst)
    again = parse_instance(serialize_instance(inst), meta)
    assert again.graph.labels == inst.graph.labels
    assert again.params == inst.params
    assert instances_equal(inst, again)


def test_split_graph_serializes_with_groups():
    g = gen_split_simplified_graph(2, 4, 2)
    groups = split_groups(g)
    terminals = [gr[0] for gr in groups]
    text = serialize_graph(g, terminals, "split-242")
    meta = metadata_json("split-242", {"d": 2, "s": 4, "delta": 2},
                         g.labels, groups=groups)
    inst = parse_instance(text, meta)
    assert inst.graph.labels == g.labels
    assert inst.name == "split-242"
    import json
    assert json.loads(meta)["groups"] == [list(gr) for gr in groups]


def test_solution_json_round_trips_every_kind():
    inst = gen_simplex_instance(2, 2)
    tree = exact_steiner_tree(inst).witness
    for kind in ("bcr", "mcfr", "mbfr", "mbcr", "ster"):
        sol = steiner_tree_to_solution(inst, tree, kind)
        again = solution_from_json(solution_to_json(sol))
        assert type(again) is type(sol)
        assert again == sol
        assert verify(inst, again, plus=True)


def test_translated_solutions_round_trip():
    inst = gen_simplex_instance(2, 2)
    tree = exact_steiner_tree(inst).witness
    mcfr = steiner_tree_to_solution(inst, tree, "mcfr")
    mbfr = translate_mcfr_to_mbfr(inst, mcfr)
    mbcr = translate_mbfr_to_mbcr(inst, mbfr)
    ster = translate_mbcr_to_ster(inst, mbcr)
    for sol in (mcfr, mbfr, mbcr, ster):
        assert solution_from_json(solution_to_json(sol)) == sol


def test_tree_solution_json_round_trip():
    inst = gen_simplex_instance(2, 2)
    t = tree_solution(inst, exact_steiner_tree(inst).witness)
    again = solution_from_json(solution_to_json(t))
    assert again == t and again.cost == 8


def test_unknown_solution_kind_rejected():
    with pytest.raises(ValueError, match="unknown solution kind"):
        solution_from_json('{"kind": "mystery", "u": {}}')
