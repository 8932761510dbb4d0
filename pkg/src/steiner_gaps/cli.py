"""Command-line surface: generate, solve, verify, tabulate, and report.

Subcommands:

* ``gen``     — write an instance family member as STP + JSON label sidecar
* ``solve``   — solve one formulation on an instance file, write report JSON
* ``table``   — reproduce the published gap tables (exact, then float)
* ``verify``  — check a solution JSON against an instance (exit 0/1)
* ``gap``     — batch gap reports over a parameter sweep
* ``oracle``  — exact optimum by brute force / dynamic programming

Exact objectives print as ``p/q`` with a 5-place truncated decimal.  The
``STEINER_GAP_TIME_LIMIT_SECS`` environment variable bounds each solve.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from .constructions import (closed_form_cost, gap_limit, gap_lower_bound,
                            goemans_fractional, simplified_simplex_solution)
from .formulations import FORMULATIONS, compile_formulation
from .instances import (gen_goemans_instance, gen_level_restricted,
                        gen_multiway_dual, gen_simplex_instance,
                        gen_simplified_simplex_instance,
                        gen_split_simplified_graph, split_groups)
from .oracles import (SizeLimitExceeded, exact_multiway_cut, exact_set_cover,
                      exact_steiner_tree)
from .reports import (GapEntry, GapReport, SolveEntry, oracle_entry,
                      rational_str, solve_entry, table_rows, truncate5)
from .setcover import (gen_sci, gen_skutella_family, sci_fractional_objective,
                       sci_fractional_solution, sci_gap_bound, sci_gap_limit,
                       sci_opt_formula, triangle_cover, cover_to_json)
from .solutions import (TreeSolution, result_to_solution, tree_solution,
                        verification_errors)
from .stp_io import (instance_metadata, metadata_json, read_instance,
                     serialize_graph, solution_from_json, solution_to_json,
                     write_instance)


def _say(*parts: Any) -> None:
    print(*parts)


def _fmt(x: Fraction) -> str:
    return f"{x} ({truncate5(x)})"


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def _make_cover(args: argparse.Namespace):
    if args.cover == "triangle":
        return triangle_cover()
    return gen_skutella_family(args.n)


def cmd_gen(args: argparse.Namespace) -> int:
    if args.family == "split":
        graph = gen_split_simplified_graph(args.d, args.s, args.delta)
        name = f"split-d{args.d}-s{args.s}-delta{args.delta}"
        out = Path(args.out or f"{name}.stp")
        out.write_text(serialize_graph(graph, [], name))
        sidecar = out.with_name(out.name + ".json")
        sidecar.write_text(metadata_json(
            name, {"d": args.d, "s": args.s, "delta": args.delta},
            graph.labels, groups=split_groups(graph)))
        _say(f"wrote {out} and {sidecar} (n={graph.n}, m={graph.m}, "
             f"groups={len(split_groups(graph))})")
        return 0
    if args.family == "skutella":
        cover = gen_skutella_family(args.n)
        out = Path(args.out or f"skutella-n{args.n}.json")
        out.write_text(cover_to_json(cover))
        _say(f"wrote {out} ({len(cover.sets)} sets over "
             f"{len(cover.universe)} elements)")
        return 0
    if args.family == "simplex":
        inst = gen_simplex_instance(args.d, args.s)
    elif args.family == "simplified":
        inst = gen_simplified_simplex_instance(args.d, args.s, args.delta)
    elif args.family == "goemans":
        inst = gen_goemans_instance(args.d)
    elif args.family == "level2":
        inst = gen_level_restricted(args.d, args.s, args.lmax)
    elif args.family == "dual":
        inst = gen_multiway_dual(args.s, args.delta)
    elif args.family == "setcover":
        inst = gen_sci(_make_cover(args), args.p, extended=args.extended)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.family)
    out = Path(args.out or f"{inst.name}.stp")
    stp, sidecar = write_instance(inst, out)
    _say(f"wrote {stp} and {sidecar} (n={inst.graph.n}, m={inst.graph.m}, "
         f"terminals={len(inst.required)})")
    return 0


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def cmd_solve(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    entry, res = solve_entry(inst, args.formulation, plus=args.plus,
                             exact=not args.float, root=args.root)
    report = GapReport(inst.name, inst.params, [entry])
    if entry.status == "optimal" and not args.float and args.out_solution:
        compiled = compile_formulation(inst, args.formulation, root=args.root,
                                       plus=args.plus)
        sol = result_to_solution(compiled, res.values)
        Path(args.out_solution).write_text(solution_to_json(sol))
        entry.certificate = args.out_solution
    out = Path(args.out_report or "report.json")
    out.write_text(report.to_json())
    _say(f"{inst.name} {args.formulation}{'+' if args.plus else ''}: "
         f"{entry.status}"
         + (f" objective {rational_str(entry.objective)}"
            f" ({entry.decimal5})" if entry.objective is not None else ""))
    _say(f"wrote {out}")
    return 0 if entry.status in ("optimal",) else 1


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

def cmd_table(args: argparse.Namespace) -> int:
    rows = table_rows(args.which, args.dmax, args.exact_dmax)
    _say(f"{'d':>2}  {'gap':<12} {'published':<10} check")
    ok = True
    for row in rows:
        mode = "" if row.exact else " (float)"
        match = row.matches_printed
        mark = "" if match is None else ("ok" if match else "MISMATCH")
        ok &= match is not False
        _say(f"{row.d:>2}  {row.display + mode:<12} "
             f"{row.printed or '-':<10} {mark}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    sol = solution_from_json(Path(args.solution).read_text())
    if isinstance(sol, TreeSolution):
        try:
            rebuilt = tree_solution(inst, sol.edges)
        except ValueError as exc:
            _say(f"FAIL: {exc}")
            return 1
        if rebuilt.cost != sol.cost:
            _say(f"FAIL: tree cost {sol.cost} != recomputed {rebuilt.cost}")
            return 1
        _say(f"OK: tree with cost {_fmt(sol.cost)}")
        return 0
    if args.formulation and args.formulation != sol.kind:
        _say(f"FAIL: solution is for {sol.kind}, not {args.formulation}")
        return 1
    errors = verification_errors(inst, sol, plus=args.plus)
    if errors:
        for err in errors[:10]:
            _say(f"FAIL: {err}")
        if len(errors) > 10:
            _say(f"... and {len(errors) - 10} more")
        return 1
    _say(f"OK: {sol.kind}{'+' if args.plus else ''} solution with objective "
         f"{_fmt(sol.objective(inst))}")
    return 0


# ---------------------------------------------------------------------------
# gap sweeps
# ---------------------------------------------------------------------------

def _gap_simplified(d: int, s: int, delta: int) -> GapReport:
    import time

    start = time.perf_counter()
    sol = simplified_simplex_solution(d, s, delta)
    inst = gen_simplified_simplex_instance(d, s, delta)
    errors = verification_errors(inst, sol, plus=False)
    seconds = time.perf_counter() - start
    if errors:
        raise AssertionError(
            f"constructed solution invalid for (d,s,delta)=({d},{s},{delta}): "
            + errors[0])
    cost = sol.objective(inst)
    assert cost == closed_form_cost(d, s, delta)
    entry = SolveEntry("mbfr-constructed", False, "verified", cost, seconds)
    report = GapReport(inst.name, inst.params, [entry],
                       [GapEntry(Fraction(2 * s * d), cost)])
    return report


def _gap_goemans(d: int) -> GapReport:
    import time

    start = time.perf_counter()
    inst = gen_goemans_instance(d)
    sol = goemans_fractional(d)
    errors = verification_errors(inst, sol, plus=False)
    if errors:
        raise AssertionError(f"fractional solution invalid for d={d}: "
                             + errors[0])
    cost = sol.objective(inst)
    assert cost == Fraction(7 * d + 1, 2)
    entries = [SolveEntry("mcfr-constructed", False, "verified", cost,
                          time.perf_counter() - start)]
    gaps = []
    try:
        oentry, ores = oracle_entry(exact_steiner_tree, inst,
                                    name="oracle-steiner")
        entries.append(oentry)
        if oentry.objective is not None:
            gaps.append(GapEntry(oentry.objective, cost))
    except SizeLimitExceeded:
        pass
    return GapReport(inst.name, inst.params, entries, gaps)


def _gap_setcover(cover, p: int) -> GapReport:
    import time

    start = time.perf_counter()
    opt_cover = int(exact_set_cover(cover.sets).optimum)
    opt = sci_opt_formula(cover, p, opt_cover)
    inst, sol = sci_fractional_solution(cover, p)
    errors = verification_errors(inst, sol, plus=True)
    if errors:
        raise AssertionError(f"fractional solution invalid for p={p}: "
                             + errors[0])
    frac = sol.objective(inst)
    seconds = time.perf_counter() - start
    entries = [SolveEntry("sci-opt-formula", False, "formula", opt, 0.0),
               SolveEntry("mcfr-constructed", True, "verified", frac, seconds)]
    gaps = [GapEntry(opt, frac)]
    limit = sci_gap_limit(cover)
    gaps.append(GapEntry(limit.numerator, Fraction(limit.denominator)))
    return GapReport(inst.name, inst.params, entries, gaps)


def cmd_gap(args: argparse.Namespace) -> int:
    jobs: list[tuple[tuple, Callable[[], GapReport]]] = []
    if args.family == "simplified":
        for spec in args.sdelta:
            s_str, _, delta_str = spec.partition(":")
            s, delta = int(s_str), int(delta_str or (int(s_str) + 2) // 3)
            jobs.append(((args.d, s, delta),
                         lambda d=args.d, s=s, dl=delta: _gap_simplified(d, s, dl)))
    elif args.family == "goemans":
        for d in args.d_values:
            jobs.append(((d,), lambda d=d: _gap_goemans(d)))
    elif args.family == "setcover":
        cover = _make_cover(args)
        for p in args.p_values:
            jobs.append(((p,), lambda c=cover, p=p: _gap_setcover(c, p)))
    jobs.sort(key=lambda item: item[0])
    with ThreadPoolExecutor(max_workers=min(4, max(1, len(jobs)))) as pool:
        reports = list(pool.map(lambda item: item[1](), jobs))
    for report in reports:
        _say(f"== {report.instance} ==")
        for entry in report.results:
            _say(f"  {entry.formulation}{'+' if entry.plus else ''}: "
                 f"{entry.status} {rational_str(entry.objective)}"
                 + (f" ({entry.decimal5})" if entry.objective is not None else ""))
        for gap in report.gaps:
            _say(f"  gap >= {_fmt(gap.ratio)}")
    if args.out:
        import json

        Path(args.out).write_text(json.dumps(
            [json.loads(r.to_json()) for r in reports], indent=1))
        _say(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def cmd_oracle(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    ran = False
    if args.kind in ("steiner", "auto"):
        try:
            entry, result = oracle_entry(exact_steiner_tree, inst,
                                         name="oracle-steiner")
        except SizeLimitExceeded as exc:
            if args.kind == "steiner":
                _say(f"error: {exc}")
                return 2
        else:
            ran = True
            if entry.objective is None:
                _say(f"steiner tree: {entry.status}")
            else:
                _say(f"steiner tree optimum: {_fmt(entry.objective)}")
                if args.out and result is not None:
                    tree = tree_solution(inst, result.witness)
                    Path(args.out).write_text(solution_to_json(
                        TreeSolution(tree.edges, tree.cost)))
                    _say(f"wrote {args.out}")
    if args.kind in ("multiway", "auto") and len(inst.required) == 3:
        try:
            entry, result = oracle_entry(exact_multiway_cut, inst,
                                         name="oracle-multiway")
        except SizeLimitExceeded as exc:
            if args.kind == "multiway":
                _say(f"error: {exc}")
                return 2
        else:
            ran = True
            if entry.objective is None:
                _say(f"multiway cut: {entry.status}")
            else:
                _say(f"multiway cut optimum: {_fmt(entry.objective)}")
    elif args.kind == "multiway":
        _say("error: multiway cut oracle needs exactly 3 terminals")
        return 2
    return 0 if ran else 2


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steiner-gaps",
        description="Steiner tree LP relaxations, gap instances, and exact solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate an instance family member")
    p_gen.add_argument("family", choices=["simplex", "simplified", "split",
                                          "goemans", "level2", "dual",
                                          "setcover", "skutella"])
    p_gen.add_argument("--d", type=int, default=2)
    p_gen.add_argument("--s", type=int, default=2)
    p_gen.add_argument("--delta", type=int, default=1)
    p_gen.add_argument("--lmax", type=int, default=2)
    p_gen.add_argument("--n", type=int, default=3,
                       help="parity family parameter (setcover/skutella)")
    p_gen.add_argument("--p", type=int, default=1,
                       help="layer depth (setcover)")
    p_gen.add_argument("--cover", choices=["triangle", "skutella"],
                       default="skutella")
    p_gen.add_argument("--extended", action="store_true",
                       help="attach a pendant root terminal (setcover)")
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=cmd_gen)

    p_solve = sub.add_parser("solve", help="solve one formulation exactly or with floats")
    p_solve.add_argument("instance")
    p_solve.add_argument("--formulation", choices=sorted(FORMULATIONS),
                         default="mcfr")
    p_solve.add_argument("--plus", action="store_true")
    p_solve.add_argument("--float", action="store_true",
                         help="use the floating-point solver (no certificate)")
    p_solve.add_argument("--root", type=int, default=None)
    p_solve.add_argument("--out-report", default=None)
    p_solve.add_argument("--out-solution", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_table = sub.add_parser("table", help="reproduce a published gap table")
    p_table.add_argument("which", choices=["main", "level2"])
    p_table.add_argument("--dmax", type=int, default=4)
    p_table.add_argument("--exact-dmax", type=int, default=3, dest="exact_dmax")
    p_table.set_defaults(func=cmd_table)

    p_verify = sub.add_parser("verify", help="verify a solution file; exit 0/1")
    p_verify.add_argument("instance")
    p_verify.add_argument("solution")
    p_verify.add_argument("--formulation", default=None,
                          choices=sorted(FORMULATIONS))
    p_verify.add_argument("--plus", action="store_true")
    p_verify.set_defaults(func=cmd_verify)

    p_gap = sub.add_parser("gap", help="batch gap reports over a sweep")
    gap_sub = p_gap.add_subparsers(dest="family", required=True)
    g_simp = gap_sub.add_parser("simplified")
    g_simp.add_argument("--d", type=int, default=2)
    g_simp.add_argument("--sdelta", action="append", default=[],
                        metavar="S:DELTA", required=True)
    g_simp.add_argument("--out", default=None)
    g_simp.set_defaults(func=cmd_gap)
    g_goe = gap_sub.add_parser("goemans")
    g_goe.add_argument("--d", type=int, nargs="+", dest="d_values",
                       default=[1, 2, 3])
    g_goe.add_argument("--out", default=None)
    g_goe.set_defaults(func=cmd_gap)
    g_set = gap_sub.add_parser("setcover")
    g_set.add_argument("--cover", choices=["triangle", "skutella"],
                       default="skutella")
    g_set.add_argument("--n", type=int, default=3)
    g_set.add_argument("--p", type=int, nargs="+", dest="p_values",
                       default=[1])
    g_set.add_argument("--out", default=None)
    g_set.set_defaults(func=cmd_gap)

    p_oracle = sub.add_parser("oracle", help="exact optimum by DP/brute force")
    p_oracle.add_argument("instance")
    p_oracle.add_argument("--kind", choices=["steiner", "multiway", "auto"],
                          default="auto")
    p_oracle.add_argument("--out", default=None,
                          help="write the optimal tree as solution JSON")
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        _say(f"error: {exc}")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
