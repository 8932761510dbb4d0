"""Acceptance gate: eleven guarantees, one printed PASS/FAIL line each.

Each test checks one shipped guarantee end to end and prints
``ACCEPTANCE <n>: PASS`` or ``ACCEPTANCE <n>: FAIL: <reason>`` so the gate
can be read off a plain ``pytest tests/test_acceptance.py`` run even under
output capture.
"""

import functools
import random
import sys
import time
from fractions import Fraction as F

import pytest

from steiner_gaps.constructions import (closed_form_cost, gap_lower_bound,
                                        goemans_fractional,
                                        simplified_simplex_solution)
from steiner_gaps.embeddings import (canonical_simplex_embedding,
                                     ckr_canonical_for_dual, ckr_gap_formula,
                                     ckr_objective, se_objective, verify_se)
from steiner_gaps.flows import (construct_bidirected_balance_flow, divergence,
                                gale_condition_violation)
from steiner_gaps.formulations import (FORMULATIONS, add_valid_constraints,
                                       compile_formulation, compile_mcfr,
                                       solve_bcr_lazy, solve_symmetrized)
from steiner_gaps.geometry import (all_subsets, count_radius,
                                   count_radius_level, count_simplex,
                                   enumerate_simplex, level, point_to_subset,
                                   subset_to_point)
from steiner_gaps.graphs import Graph, SteinerInstance, edge_key
from steiner_gaps.instances import (coordinate_swap_permutation,
                                    gen_goemans_instance, gen_multiway_dual,
                                    gen_simplex_instance,
                                    gen_simplified_simplex_instance)
from steiner_gaps.lp import solve_exact, verify_certificate
from steiner_gaps.oracles import (exact_multiway_cut, exact_set_cover,
                                  exact_steiner_tree)
from steiner_gaps.reports import table_gap, truncate5
from steiner_gaps.setcover import (gen_sci, gen_skutella_family,
                                   sci_fractional_objective,
                                   sci_fractional_solution, sci_gap_bound,
                                   sci_gap_limit, sci_opt_formula,
                                   triangle_cover)
from steiner_gaps.solutions import (decompose_three_terminal,
                                    result_to_solution,
                                    translate_mbcr_to_mbfr,
                                    translate_mbcr_to_ster,
                                    translate_mbfr_to_mbcr,
                                    translate_mbfr_to_mcfr,
                                    translate_mcfr_to_mbfr,
                                    translate_ster_to_mbcr, verify)


def _announce(line: str) -> None:
    print(line)
    if sys.stdout is not sys.__stdout__:  # bypass pytest capture as well
        print(line, file=sys.__stdout__, flush=True)


def criterion(label):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException as exc:
                reason = f"{type(exc).__name__}: {exc}"[:300]
                _announce(f"ACCEPTANCE {label}: FAIL: {reason}")
                raise
            _announce(f"ACCEPTANCE {label}: PASS")
        return wrapper
    return deco


# ---------------------------------------------------------------------------
# 1-2  published gap tables
# ---------------------------------------------------------------------------

@criterion(1)
def test_criterion_1_main_table():
    printed = {1: "1.00000", 2: "1.06666", 3: "1.09459"}
    for d in (1, 2, 3):
        start = time.perf_counter()
        gap = table_gap("main", d, exact=True)
        elapsed = time.perf_counter() - start
        assert isinstance(gap, F), f"d={d}: not exact"
        assert truncate5(gap) == printed[d], \
            f"d={d}: {truncate5(gap)} != {printed[d]}"
        assert elapsed <= 60, f"d={d} took {elapsed:.1f}s > 60s"
    approx = table_gap("main", 4, exact=False)
    assert approx is not None and abs(float(approx) - 1.12116) <= 2e-5, \
        f"d=4 float {approx} not within 2e-5 of 1.12116"


@pytest.mark.slow
@criterion("1 (optional exact d=4)")
def test_criterion_1_exact_d4():
    start = time.perf_counter()
    gap = table_gap("main", 4, exact=True)
    elapsed = time.perf_counter() - start
    assert isinstance(gap, F) and truncate5(gap) == "1.12116", \
        f"exact d=4 gap {gap} truncates to {truncate5(gap)}"
    assert elapsed <= 1800, f"exact d=4 took {elapsed:.0f}s > 30min"


@criterion(2)
def test_criterion_2_level_restricted_table():
    gap2 = table_gap("level2", 2, exact=True)
    assert truncate5(gap2) == "1.06666", truncate5(gap2)
    gap3 = table_gap("level2", 3, exact=True)
    assert truncate5(gap3) == "1.09090", truncate5(gap3)
    assert gap3 == F(12, 11), f"d=3 gap {gap3} != 12/11"
    assert gap_lower_bound(3, 4) == F(12, 11)


# ---------------------------------------------------------------------------
# 3  spanning-tree optimum of the plus relaxation, with dual certificate
# ---------------------------------------------------------------------------

@criterion(3)
def test_criterion_3_plus_optimum_is_2sd():
    for d, s in ((2, 2), (2, 3), (3, 2), (3, 3)):
        inst = gen_simplex_instance(d, s)
        perms = [coordinate_swap_permutation(inst.graph, i, i + 1)
                 for i in range(d - 1)]
        compiled = compile_formulation(inst, "mcfr", plus=True)
        res = solve_symmetrized(compiled, perms)
        assert res.status == "optimal" and res.objective == 2 * s * d, \
            f"(d,s)=({d},{s}): {res.status} {res.objective} != {2 * s * d}"
        emb = canonical_simplex_embedding(inst)
        assert verify_se(inst, emb, above=True), f"(d,s)=({d},{s}): embedding"
        assert se_objective(inst, emb) == 2 * s * d, \
            f"(d,s)=({d},{s}): dual objective mismatch"


# ---------------------------------------------------------------------------
# 4-5  seeded random suites (shared solve cache reused by criterion 11)
# ---------------------------------------------------------------------------

def _random_instance(rng, nmax=8, rmin=2, rmax=4, cost_lo=0, cost_hi=10):
    n = rng.randint(4, nmax)
    edges = {}
    for v in range(1, n):
        w = rng.randrange(v)
        edges[(w, v)] = F(rng.randint(cost_lo, cost_hi))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        e = edge_key(a, b)
        if e not in edges:
            edges[e] = F(rng.randint(cost_lo, cost_hi))
    k = rng.randint(rmin, min(rmax, n))
    required = tuple(rng.sample(range(n), k))
    return SteinerInstance(Graph(n, edges), required, f"rnd{n}")


_SUITE: dict = {}


def _formulation_suite():
    """Solve all five formulations (base and plus) on the 20 seeded
    instances once; criteria 4 and 11 both read the records."""
    if "error" in _SUITE:
        raise _SUITE["error"]
    if "records" not in _SUITE:
        try:
            rng = random.Random(20260823)
            records = []
            start = time.perf_counter()
            for i in range(20):
                inst = _random_instance(rng)
                values = {}
                solutions = {}
                for kind in FORMULATIONS:
                    for plus in (False, True):
                        c = compile_formulation(inst, kind, plus=plus)
                        r = solve_exact(c.lp)
                        assert r.status == "optimal", (i, kind, plus, r.status)
                        assert verify_certificate(c.lp, r), (i, kind, plus)
                        values[(kind, plus)] = r.objective
                        if not plus and kind in ("mcfr", "mbcr"):
                            solutions[kind] = result_to_solution(c, r.values)
                root_values = set()
                for root in inst.required:
                    r = solve_exact(
                        compile_formulation(inst, "mcfr", root=root).lp)
                    root_values.add(r.objective)
                c = compile_formulation(inst, "mcfr")
                added = add_valid_constraints(c, 1)
                assert added > 0, i
                strengthened = solve_exact(c.lp).objective
                records.append({
                    "inst": inst, "values": values,
                    "mcfr": solutions["mcfr"], "mbcr": solutions["mbcr"],
                    "root_values": root_values, "group1": strengthened,
                })
            _SUITE["records"] = records
            _SUITE["elapsed"] = time.perf_counter() - start
        except BaseException as exc:
            _SUITE["error"] = exc
            raise
    return _SUITE["records"], _SUITE["elapsed"]


@criterion(4)
def test_criterion_4_formulation_equivalence():
    records, elapsed = _formulation_suite()
    assert len(records) == 20
    for i, rec in enumerate(records):
        base = {rec["values"][(k, False)] for k in FORMULATIONS}
        plus = {rec["values"][(k, True)] for k in FORMULATIONS}
        assert len(base) == 1, f"inst {i}: base optima differ: {base}"
        assert len(plus) == 1, f"inst {i}: plus optima differ: {plus}"
        assert rec["root_values"] == base, \
            f"inst {i}: root choice changed the optimum"
        assert rec["group1"] == next(iter(base)), \
            f"inst {i}: group-1 rows changed the optimum"
    assert elapsed <= 300, f"suite took {elapsed:.0f}s > 5min"


def _random_three_terminal(rng, nmax=10, cost_lo=1, cost_hi=10):
    n = rng.randint(5, nmax)
    edges = {}
    for v in range(1, n):
        w = rng.randrange(v)
        edges[(w, v)] = F(rng.randint(cost_lo, cost_hi))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        e = edge_key(a, b)
        if e not in edges:
            edges[e] = F(rng.randint(cost_lo, cost_hi))
    required = tuple(rng.sample(range(n), 3))
    return SteinerInstance(Graph(n, edges), required, f"rnd{n}")


@criterion(5)
def test_criterion_5_three_terminal_exactness():
    rng = random.Random(31337)
    for i in range(20):
        inst = _random_three_terminal(rng)
        c = compile_mcfr(inst, plus=True)
        r = solve_exact(c.lp)
        assert r.status == "optimal" and verify_certificate(c.lp, r), i
        opt = exact_steiner_tree(inst).optimum
        assert r.objective == opt, \
            f"inst {i}: plus optimum {r.objective} != tree optimum {opt}"
        sol = result_to_solution(c, r.values)
        dec = decompose_three_terminal(inst, sol)
        assert dec.exact, f"inst {i}: decomposition not exact ({dec.note})"
        assert dec.total_weight() == 1, i
        combined = dec.combined_u()
        for e in inst.graph.edges():
            assert combined.get(e, F(0)) == sol.u.get(e, F(0)), \
                f"inst {i}: combined u differs on edge {e}"


# ---------------------------------------------------------------------------
# 6-7  constructed fractional solutions
# ---------------------------------------------------------------------------

PARAM_SETS = [(2, 4, 2), (2, 7, 3), (2, 9, 3), (2, 11, 4), (2, 13, 5),
              (3, 4, 2), (4, 4, 2), (5, 4, 2)]


@criterion(6)
def test_criterion_6_constructed_solutions():
    start = time.perf_counter()
    for d, s, delta in PARAM_SETS:
        inst = gen_simplified_simplex_instance(d, s, delta)
        sol = simplified_simplex_solution(d, s, delta)
        assert verify(inst, sol), f"(d,s,delta)=({d},{s},{delta}): infeasible"
        cost = sol.objective(inst)
        want = closed_form_cost(d, s, delta)
        assert cost == want, f"({d},{s},{delta}): {cost} != {want}"
        gap = F(2 * s * d) / cost
        if s == 3 * delta - 2:
            formula = F(6 * d) / (5 * d + 1 + F(d - 1, s))
            assert gap == formula == gap_lower_bound(d, s), \
                f"({d},{s},{delta}): gap {gap} != formula {formula}"
    elapsed = time.perf_counter() - start
    assert elapsed <= 120, f"suite took {elapsed:.0f}s > 2min"


@criterion(7)
def test_criterion_7_goemans_suite():
    for d in range(1, 6):
        inst = gen_goemans_instance(d)
        sol = goemans_fractional(d)
        assert verify(inst, sol), f"d={d}: fractional solution infeasible"
        cost = sol.objective(inst)
        assert cost == F(7 * d + 1, 2), f"d={d}: cost {cost}"
        if d <= 3:
            opt = exact_steiner_tree(inst).optimum
            assert opt == 4 * d, f"d={d}: tree optimum {opt} != {4 * d}"
            assert opt / cost == F(8 * d, 7 * d + 1), f"d={d}: gap mismatch"


# ---------------------------------------------------------------------------
# 8  counting formulas and the stars-and-bars bijection
# ---------------------------------------------------------------------------

@criterion(8)
def test_criterion_8_counting_and_bijection():
    start = time.perf_counter()
    for d in range(1, 5):
        for s in range(1, 7):
            points = enumerate_simplex(d, s)
            assert count_simplex(d, s) == len(points), (d, s)
            for k in range(s // 2, s + 1):
                capped = [v for v in points if max(v) <= k]
                assert count_radius(d, s, k) == len(capped), (d, s, k)
                for lvl in range(d + 1):
                    brute = sum(1 for v in capped if level(v) == lvl)
                    assert count_radius_level(d, s, k, lvl) == brute, \
                        (d, s, k, lvl)
    for d in range(1, 4):
        for s in range(1, 6):
            points = enumerate_simplex(d, s)
            images = {point_to_subset(v) for v in points}
            assert len(images) == len(points), (d, s)
            for v in points:
                assert subset_to_point(d, s, point_to_subset(v)) == v, (d, s, v)
            for sub in all_subsets(d, s):
                assert point_to_subset(subset_to_point(d, s, sub)) == sub, \
                    (d, s, sub)
    elapsed = time.perf_counter() - start
    assert elapsed <= 30, f"took {elapsed:.1f}s > 30s"


# ---------------------------------------------------------------------------
# 9-10  multiway-cut duality and the set-cover families
# ---------------------------------------------------------------------------

@criterion(9)
def test_criterion_9_multiway_cut_duality():
    for s, delta in ((4, 2), (7, 3), (9, 3)):
        inst, emb = ckr_canonical_for_dual(s, delta)
        value = ckr_objective(inst, emb)
        want = closed_form_cost(2, s, delta)
        assert value == want, f"(s,delta)=({s},{delta}): {value} != {want}"
        q = 2 * s - 3 * delta + 1
        assert F(4 * s) / value == ckr_gap_formula(q), \
            f"(s,delta)=({s},{delta}): formula mismatch at q={q}"
    cut = exact_multiway_cut(gen_multiway_dual(4, 2))
    assert cut.optimum == 16, f"multiway cut {cut.optimum} != 16"


@criterion(10)
def test_criterion_10_set_cover_suite():
    cases = [(triangle_cover(), 1), (triangle_cover(), 2),
             (gen_skutella_family(3), 1)]
    for cover, p in cases:
        size = int(exact_set_cover(cover.sets).optimum)
        formula = sci_opt_formula(cover, p, size)
        opt = exact_steiner_tree(gen_sci(cover, p)).optimum
        assert opt == formula, f"p={p}: tree {opt} != formula {formula}"
        inst, sol = sci_fractional_solution(cover, p)
        assert verify(inst, sol, plus=True), f"p={p}: fractional infeasible"
        assert sol.objective(inst) == sci_fractional_objective(cover, p), \
            f"p={p}: objective mismatch"
    fam = gen_skutella_family(3)
    assert sci_gap_bound(fam, 1) == F(8, 7)
    assert sci_gap_limit(fam) == F(36, 31)


# ---------------------------------------------------------------------------
# 11  standing property suites on every touched instance
# ---------------------------------------------------------------------------

def _check_translation_cycle(inst, mcfr):
    mbfr = translate_mcfr_to_mbfr(inst, mcfr)
    assert verify(inst, mbfr), inst.name
    mbcr = translate_mbfr_to_mbcr(inst, mbfr)
    assert verify(inst, mbcr), inst.name
    ster = translate_mbcr_to_ster(inst, mbcr)
    assert verify(inst, ster), inst.name
    back_mbcr = translate_ster_to_mbcr(inst, ster)
    assert verify(inst, back_mbcr), inst.name
    assert back_mbcr.b == mbcr.b, inst.name
    back_mbfr = translate_mbcr_to_mbfr(inst, back_mbcr)
    assert verify(inst, back_mbfr), inst.name
    back_mcfr = translate_mbfr_to_mcfr(inst, back_mbfr)
    assert verify(inst, back_mcfr), inst.name
    for sol in (mbfr, mbcr, ster, back_mbcr, back_mbfr, back_mcfr):
        assert sol.u == mcfr.u, inst.name
        assert sol.objective(inst) == mcfr.objective(inst), inst.name


def _check_gale_iff(inst, mbcr):
    g = inst.graph
    nonzero_r = None
    for r in inst.required:
        br = {v: mbcr.b[v] + (2 if v == r else 0) for v in g.vertices()}
        flow, witness = construct_bidirected_balance_flow(g, mbcr.u, br)
        violation = gale_condition_violation(g, mbcr.u, br)
        assert flow is not None and witness is None, (inst.name, r)
        assert violation is None, (inst.name, r, violation)
        div = divergence(g.n, flow)
        assert all(div[v] == br[v] for v in g.vertices()), (inst.name, r)
        if nonzero_r is None and any(br.values()):
            nonzero_r = r
    # converse direction: with capacities removed the flow must fail and
    # the exhaustive check must exhibit a violated cut, in agreement
    assert nonzero_r is not None, inst.name
    br = {v: mbcr.b[v] + (2 if v == nonzero_r else 0) for v in g.vertices()}
    zero = {e: F(0) for e in g.edges()}
    flow, witness = construct_bidirected_balance_flow(g, zero, br)
    violation = gale_condition_violation(g, zero, br)
    assert flow is None and witness is not None, inst.name
    assert violation is not None, inst.name
    x, deficit = violation
    bx = sum(br[v] for v in x)
    assert deficit == bx > 0, inst.name
    assert sum(br[v] for v in witness) > 0, inst.name


def _check_chain(inst, base, plus):
    opt = exact_steiner_tree(inst).optimum
    assert base <= plus <= opt, (inst.name, base, plus, opt)


@criterion(11)
def test_criterion_11_standing_properties():
    records, _ = _formulation_suite()
    for rec in records:
        inst = rec["inst"]
        # certificates for all ten solves were verified while building the
        # cache; here the chain, Gale agreement, and translations
        _check_chain(inst, rec["values"][("bcr", False)],
                     rec["values"][("bcr", True)])
        _check_translation_cycle(inst, rec["mcfr"])
        if inst.graph.n <= 10:
            _check_gale_iff(inst, rec["mbcr"])

    for inst in (gen_simplex_instance(2, 2), gen_multiway_dual(4, 2)):
        res, lp = solve_bcr_lazy(inst)
        assert res.status == "optimal" and verify_certificate(lp, res), inst.name
        res_plus, lp_plus = solve_bcr_lazy(inst, plus=True)
        assert res_plus.status == "optimal", inst.name
        assert verify_certificate(lp_plus, res_plus), inst.name
        _check_chain(inst, res.objective, res_plus.objective)
        c = compile_formulation(inst, "mcfr")
        r = solve_exact(c.lp)
        assert r.status == "optimal" and verify_certificate(c.lp, r), inst.name
        _check_translation_cycle(inst, result_to_solution(c, r.values))
        if inst.graph.n <= 10:
            cb = compile_formulation(inst, "mbcr")
            rb = solve_exact(cb.lp)
            assert rb.status == "optimal" and verify_certificate(cb.lp, rb)
            _check_gale_iff(inst, result_to_solution(cb, rb.values))
