"""Compilers turning a Steiner instance into the five LP relaxations.

All formulations share edge capacity variables ``("u", edge)`` with the edge
costs as objective; they differ in the auxiliary variables and rows:

``bcr``
    One flow ``("f", arc)`` from a chosen root; per edge the two
    orientations share the capacity; one covering row per directed cut
    separating the root from some required vertex (exponential, guarded).
``mcfr``
    Adds one commodity ``("g", s, arc)`` per non-root required vertex with
    unit root-to-s conservation and ``g <= f`` per arc; polynomial size.
``mbfr``
    Free balance variables ``("b", v)`` and one flow ``("f", r, arc)`` per
    required vertex with divergence ``b(v) + 2[v == r]``; polynomial size.
``mbcr``
    Capacities and balances only; one row per vertex set X demanding
    ``u(delta(X)) >= b(X) + 2[X meets R]`` plus ``b(V) == -2`` (guarded).
``ster``
    Vertex occupancies ``("y", v)``; ``u(E) == y(V) - 1`` and per set X
    ``u(E[X]) <= y(X) - [X meets R]`` (guarded).

The ``plus`` switch adds the Steiner-vertex strengthening of each
formulation.  :func:`add_valid_constraints` appends the two groups of
redundant valid rows used for sanity experiments, and
:func:`solve_bcr_lazy` solves ``bcr`` at any size by exact row generation
with max-flow separation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Mapping, Sequence

from .flows import max_flow
from .graphs import Arc, Edge, Graph, SteinerInstance, edge_key
from .lp import RationalLp, SolveResult, solve_float, solve_with_row_generation

ZERO = Fraction(0)
ONE = Fraction(1)
TWO = Fraction(2)

FORMULATIONS = ("bcr", "mcfr", "mbfr", "mbcr", "ster")

#: Largest vertex count for which set-indexed (exponential) rows are compiled.
VERTEX_LIMIT = 16


class VertexLimitExceeded(ValueError):
    """Raised when a cut-row formulation is requested on too large a graph."""


@dataclass
class CompiledLp:
    """An LP together with the instance data needed to interpret its columns."""

    lp: RationalLp
    kind: str
    plus: bool
    instance: SteinerInstance
    root: int | None = None


def _check_size(instance: SteinerInstance, kind: str) -> None:
    if instance.graph.n > VERTEX_LIMIT:
        raise VertexLimitExceeded(
            f"{kind} compiles one row per vertex set; refusing |V| = "
            f"{instance.graph.n} > {VERTEX_LIMIT}"
        )


def _pick_root(instance: SteinerInstance, root: int | None) -> int:
    if root is None:
        return instance.required[0]
    if root not in instance.required:
        raise ValueError(f"root {root} is not a required vertex")
    return root


def _add_u_vars(lp: RationalLp, graph: Graph) -> None:
    for e in graph.edges():
        lp.add_var(("u", e), cost=graph.cost(*e))


def _arcs(graph: Graph) -> list[Arc]:
    return graph.arcs()


def _out_arcs(graph: Graph, v: int) -> list[Arc]:
    return [(v, w) for w in graph.neighbors(v)]


def _in_arcs(graph: Graph, v: int) -> list[Arc]:
    return [(w, v) for w in graph.neighbors(v)]


def _subsets(items: Sequence[int]) -> Iterable[tuple[int, ...]]:
    for size in range(1, len(items) + 1):
        yield from combinations(items, size)


# ---------------------------------------------------------------------------
# the five compilers
# ---------------------------------------------------------------------------

def compile_bcr(instance: SteinerInstance, root: int | None = None,
                plus: bool = False) -> CompiledLp:
    _check_size(instance, "bcr")
    root = _pick_root(instance, root)
    g = instance.graph
    lp = RationalLp(f"bcr[{instance.name}]")
    _add_u_vars(lp, g)
    for a in _arcs(g):
        lp.add_var(("f", a))
    for v, w in g.edges():
        lp.add_row(("pair", (v, w)),
                   {("f", (v, w)): ONE, ("f", (w, v)): ONE, ("u", (v, w)): -ONE},
                   "<=", 0)
    others = [v for v in g.vertices() if v != root]
    req_rest = set(instance.required) - {root}
    for size in range(len(others) + 1):
        for sub in combinations(others, size):
            x = {root} | set(sub)
            if req_rest <= x:
                continue
            coeffs = {("f", (v, w)): ONE for v, w in _cut_arcs(g, x)}
            lp.add_row(("cut", tuple(sorted(x))), coeffs, ">=", 1)
    if plus:
        _add_flow_plus(lp, instance, None)
    return CompiledLp(lp, "bcr", plus, instance, root)


def _cut_arcs(g: Graph, x: set[int]) -> list[Arc]:
    out = []
    for v in sorted(x):
        for w in g.neighbors(v):
            if w not in x:
                out.append((v, w))
    return out


def _add_flow_plus(lp: RationalLp, instance: SteinerInstance, commodity: Any) -> None:
    g = instance.graph
    for v in instance.steiner_vertices:
        coeffs: dict[Any, Fraction] = {}
        for w in g.neighbors(v):
            fo = ("f", (v, w)) if commodity is None else ("f", commodity, (v, w))
            fi = ("f", (w, v)) if commodity is None else ("f", commodity, (w, v))
            coeffs[fo] = coeffs.get(fo, ZERO) + ONE
            coeffs[fi] = coeffs.get(fi, ZERO) - ONE
        rk = ("plus", v) if commodity is None else ("plus", commodity, v)
        lp.add_row(rk, coeffs, ">=", 0)


def compile_mcfr(instance: SteinerInstance, root: int | None = None,
                 plus: bool = False) -> CompiledLp:
    root = _pick_root(instance, root)
    g = instance.graph
    lp = RationalLp(f"mcfr[{instance.name}]")
    _add_u_vars(lp, g)
    arcs = _arcs(g)
    for a in arcs:
        lp.add_var(("f", a))
    commodities = [s for s in instance.required if s != root]
    for s in commodities:
        for a in arcs:
            lp.add_var(("g", s, a))
    for v, w in g.edges():
        lp.add_row(("pair", (v, w)),
                   {("f", (v, w)): ONE, ("f", (w, v)): ONE, ("u", (v, w)): -ONE},
                   "<=", 0)
    for s in commodities:
        for a in arcs:
            lp.add_row(("cap", s, a), {("g", s, a): ONE, ("f", a): -ONE}, "<=", 0)
        for v in g.vertices():
            coeffs: dict[Any, Fraction] = {}
            for a in _out_arcs(g, v):
                coeffs[("g", s, a)] = coeffs.get(("g", s, a), ZERO) + ONE
            for a in _in_arcs(g, v):
                coeffs[("g", s, a)] = coeffs.get(("g", s, a), ZERO) - ONE
            rhs = 1 if v == root else (-1 if v == s else 0)
            lp.add_row(("cons", s, v), coeffs, "==", rhs)
    if plus:
        _add_flow_plus(lp, instance, None)
    return CompiledLp(lp, "mcfr", plus, instance, root)


def compile_mbfr(instance: SteinerInstance, plus: bool = False) -> CompiledLp:
    g = instance.graph
    lp = RationalLp(f"mbfr[{instance.name}]")
    _add_u_vars(lp, g)
    for v in g.vertices():
        lp.add_var(("b", v), free=True)
    arcs = _arcs(g)
    for r in instance.required:
        for a in arcs:
            lp.add_var(("f", r, a))
    for r in instance.required:
        for v, w in g.edges():
            lp.add_row(("pair", r, (v, w)),
                       {("f", r, (v, w)): ONE, ("f", r, (w, v)): ONE, ("u", (v, w)): -ONE},
                       "<=", 0)
        for v in g.vertices():
            coeffs: dict[Any, Fraction] = {("b", v): -ONE}
            for a in _out_arcs(g, v):
                coeffs[("f", r, a)] = coeffs.get(("f", r, a), ZERO) + ONE
            for a in _in_arcs(g, v):
                coeffs[("f", r, a)] = coeffs.get(("f", r, a), ZERO) - ONE
            lp.add_row(("bal", r, v), coeffs, "==", 2 if v == r else 0)
    if plus:
        for v in instance.steiner_vertices:
            lp.add_row(("plus", v), {("b", v): ONE}, ">=", 0)
    return CompiledLp(lp, "mbfr", plus, instance)


def compile_mbcr(instance: SteinerInstance, plus: bool = False) -> CompiledLp:
    _check_size(instance, "mbcr")
    g = instance.graph
    lp = RationalLp(f"mbcr[{instance.name}]")
    _add_u_vars(lp, g)
    for v in g.vertices():
        lp.add_var(("b", v), free=True)
    req = set(instance.required)
    for sub in _subsets(list(g.vertices())):
        x = set(sub)
        coeffs: dict[Any, Fraction] = {("b", v): -ONE for v in sub}
        for v, w in g.edges():
            if (v in x) != (w in x):
                coeffs[("u", (v, w))] = ONE
        lp.add_row(("cut", sub), coeffs, ">=", 2 if req & x else 0)
    lp.add_row(("total",), {("b", v): ONE for v in g.vertices()}, "==", -2)
    if plus:
        for v in instance.steiner_vertices:
            lp.add_row(("plus", v), {("b", v): ONE}, ">=", 0)
    return CompiledLp(lp, "mbcr", plus, instance)


def compile_ster(instance: SteinerInstance, plus: bool = False) -> CompiledLp:
    _check_size(instance, "ster")
    g = instance.graph
    lp = RationalLp(f"ster[{instance.name}]")
    _add_u_vars(lp, g)
    for v in g.vertices():
        lp.add_var(("y", v))
    req = set(instance.required)
    total = {("u", e): ONE for e in g.edges()}
    for v in g.vertices():
        total[("y", v)] = -ONE
    lp.add_row(("total",), total, "==", -1)
    for sub in _subsets(list(g.vertices())):
        if len(sub) == g.n:
            continue
        x = set(sub)
        coeffs: dict[Any, Fraction] = {("y", v): -ONE for v in sub}
        inner = [e for e in g.edges() if e[0] in x and e[1] in x]
        for e in inner:
            coeffs[("u", e)] = ONE
        lp.add_row(("sub", sub), coeffs, "<=", -1 if req & x else 0)
    if plus:
        for v in instance.steiner_vertices:
            coeffs = {("y", v): -TWO}
            for e in g.delta(v):
                coeffs[("u", e)] = coeffs.get(("u", e), ZERO) + ONE
            lp.add_row(("plus", v), coeffs, ">=", 0)
    return CompiledLp(lp, "ster", plus, instance)


def compile_formulation(instance: SteinerInstance, kind: str, root: int | None = None,
                        plus: bool = False) -> CompiledLp:
    if kind == "bcr":
        return compile_bcr(instance, root, plus)
    if kind == "mcfr":
        return compile_mcfr(instance, root, plus)
    if kind == "mbfr":
        return compile_mbfr(instance, plus)
    if kind == "mbcr":
        return compile_mbcr(instance, plus)
    if kind == "ster":
        return compile_ster(instance, plus)
    raise ValueError(f"unknown formulation {kind!r}")


# ---------------------------------------------------------------------------
# redundant valid rows
# ---------------------------------------------------------------------------

def add_valid_constraints(compiled: CompiledLp, group: int, max_set_size: int = 3) -> int:
    """Append the redundant valid rows of ``group`` (1 or 2); returns row count.

    Group 1 bounds single vertices: per-commodity in-flow at most one (zero
    at the commodity's own root), degree capacity at most ``b(v) + 2``, and
    occupancy at most one.  Group 2 relates a Steiner vertex to a Steiner
    set containing it (sets sampled up to ``max_set_size``): in-flow
    dominated by the set's in-flow, boundary minus degree at least
    ``b(X) - b(v)``, and inner capacity at most ``y(X) - y(v)``.
    """
    lp, kind, inst = compiled.lp, compiled.kind, compiled.instance
    g = inst.graph
    added = 0

    def flow_keys(commodity: Any) -> Any:
        return (lambda a: ("f", a)) if commodity is None else (lambda a: ("f", commodity, a))

    flows: list[tuple[Any, int]] = []
    if kind in ("bcr", "mcfr"):
        flows = [(None, compiled.root)]
    elif kind == "mbfr":
        flows = [(r, r) for r in inst.required]

    if group == 1:
        for commodity, root in flows:
            fk = flow_keys(commodity)
            for v in g.vertices():
                coeffs = {fk(a): ONE for a in _in_arcs(g, v)}
                if not coeffs:
                    continue
                lp.add_row(("valid1", "inflow", commodity, v), coeffs,
                           "<=", 0 if v == root else 1)
                added += 1
        if kind in ("mbfr", "mbcr"):
            for v in g.vertices():
                coeffs = {("b", v): -ONE}
                for e in g.delta(v):
                    coeffs[("u", e)] = coeffs.get(("u", e), ZERO) + ONE
                lp.add_row(("valid1", "degree", v), coeffs, "<=", 2)
                added += 1
        if kind == "ster":
            for v in g.vertices():
                lp.add_row(("valid1", "occupancy", v), {("y", v): ONE}, "<=", 1)
                added += 1
    elif group == 2:
        steiner = list(inst.steiner_vertices)
        sets = [sub for size in range(1, max_set_size + 1)
                for sub in combinations(steiner, size)]
        for sub in sets:
            x = set(sub)
            for v in sub:
                for commodity, _root in flows:
                    fk = flow_keys(commodity)
                    coeffs: dict[Any, Fraction] = {}
                    for a in _in_arcs(g, v):
                        coeffs[fk(a)] = coeffs.get(fk(a), ZERO) + ONE
                    for w, z in _cut_in_arcs(g, x):
                        coeffs[fk((w, z))] = coeffs.get(fk((w, z)), ZERO) - ONE
                    lp.add_row(("valid2", "inflow", commodity, sub, v), coeffs, "<=", 0)
                    added += 1
                if kind in ("mbfr", "mbcr"):
                    coeffs = {}
                    for w, z in g.edges():
                        if (w in x) != (z in x):
                            coeffs[("u", (w, z))] = coeffs.get(("u", (w, z)), ZERO) + ONE
                    for e in g.delta(v):
                        coeffs[("u", e)] = coeffs.get(("u", e), ZERO) - ONE
                    for w in sub:
                        if w != v:
                            coeffs[("b", w)] = -ONE
                    lp.add_row(("valid2", "degree", sub, v), coeffs, ">=", 0)
                    added += 1
                if kind == "ster":
                    coeffs = {}
                    for e in g.edges():
                        if e[0] in x and e[1] in x:
                            coeffs[("u", e)] = ONE
                    for w in sub:
                        if w != v:
                            coeffs[("y", w)] = coeffs.get(("y", w), ZERO) - ONE
                    lp.add_row(("valid2", "occupancy", sub, v), coeffs, "<=", 0)
                    added += 1
    else:
        raise ValueError("group must be 1 or 2")
    return added


def _cut_in_arcs(g: Graph, x: set[int]) -> list[Arc]:
    out = []
    for v in sorted(x):
        for w in g.neighbors(v):
            if w not in x:
                out.append((w, v))
    return out


# ---------------------------------------------------------------------------
# symmetry support
# ---------------------------------------------------------------------------

def lp_key_permutation(compiled: CompiledLp, vertex_perm: Sequence[int]) -> dict[Any, Any]:
    """Lift a graph automorphism to a permutation of the LP's variable keys.

    For rooted formulations the permutation must fix the root (the
    invariance check inside :func:`steiner_gaps.lp.symmetrize_lp` rejects
    anything that does not actually preserve the LP).
    """
    p = vertex_perm
    out: dict[Any, Any] = {}
    for key in compiled.lp.variables:
        tag = key[0]
        if tag == "u":
            (a, b) = key[1]
            out[key] = ("u", edge_key(p[a], p[b]))
        elif tag == "f" and len(key) == 2:
            (a, b) = key[1]
            out[key] = ("f", (p[a], p[b]))
        elif tag == "f":
            r, (a, b) = key[1], key[2]
            out[key] = ("f", p[r], (p[a], p[b]))
        elif tag == "g":
            s, (a, b) = key[1], key[2]
            out[key] = ("g", p[s], (p[a], p[b]))
        elif tag in ("b", "y"):
            out[key] = (tag, p[key[1]])
        else:  # pragma: no cover - future variable kinds
            raise ValueError(f"cannot permute variable key {key!r}")
    return out


def solve_symmetrized(compiled: CompiledLp, vertex_perms: Sequence[Sequence[int]],
                      time_limit: float | None = None) -> SolveResult:
    """Exact solve through the symmetry quotient induced by graph automorphisms."""
    from .lp import symmetrize_lp

    perms = [lp_key_permutation(compiled, vp) for vp in vertex_perms]
    return symmetrize_lp(compiled.lp, perms, time_limit=time_limit)


# ---------------------------------------------------------------------------
# lazy bcr at any size
# ---------------------------------------------------------------------------

def solve_bcr_lazy(instance: SteinerInstance, root: int | None = None,
                   plus: bool = False, time_limit: float | None = None,
                   ) -> tuple[SolveResult, RationalLp]:
    """Exact bcr optimum via row generation (no vertex-count limit).

    Starts from the pair rows plus the two trivial cuts around the root and
    each terminal, then separates violated cut rows by exact max-flow: the
    result is optimal for the complete (exponential) cut family because at
    termination every root-to-terminal min cut in the flow support has value
    at least one.  Floating-point rounds run first to gather cuts cheaply.
    """
    root = _pick_root(instance, root)
    g = instance.graph
    lp = RationalLp(f"bcr-lazy[{instance.name}]")
    _add_u_vars(lp, g)
    for a in _arcs(g):
        lp.add_var(("f", a))
    for v, w in g.edges():
        lp.add_row(("pair", (v, w)),
                   {("f", (v, w)): ONE, ("f", (w, v)): ONE, ("u", (v, w)): -ONE},
                   "<=", 0)
    terminals = [t for t in instance.required if t != root]
    seeds: list[Any] = []
    if terminals:
        lp.add_row(("cut", (root,)), {("f", a): ONE for a in _out_arcs(g, root)}, ">=", 1)
        seeds.append(("cut", (root,)))
        for t in terminals:
            x = tuple(sorted(v for v in g.vertices() if v != t))
            lp.add_row(("cut", x), {("f", a): ONE for a in _in_arcs(g, t)}, ">=", 1)
            seeds.append(("cut", x))
    if plus:
        _add_flow_plus(lp, instance, None)

    def separate_exact(values: Mapping[Any, Fraction]) -> list:
        caps = {a: values[("f", a)] for a in _arcs(g) if values[("f", a)] > 0}
        new = []
        for t in terminals:
            value, _, cut = max_flow(g.n, caps, root, t)
            if value < 1:
                x = tuple(sorted(cut))
                key = ("cut", x)
                if key not in lp.rows:
                    coeffs = {("f", a): ONE for a in _cut_arcs(g, set(cut))}
                    new.append((key, coeffs, ">=", ONE))
        return new

    def separate_float(values: Mapping[Any, float]) -> list:
        caps = {a: Fraction(values[("f", a)]) for a in _arcs(g) if values[("f", a)] > 1e-12}
        new = []
        for t in terminals:
            value, _, cut = max_flow(g.n, caps, root, t)
            if float(value) < 1 - 1e-7:
                x = tuple(sorted(cut))
                key = ("cut", x)
                if key not in lp.rows and all(key != k for k, *_ in new):
                    coeffs = {("f", a): ONE for a in _cut_arcs(g, set(cut))}
                    new.append((key, coeffs, ">=", ONE))
        return new

    res = solve_with_row_generation(lp, separate_exact, separate_float,
                                    time_limit=time_limit, prunable=seeds)
    return res, lp
