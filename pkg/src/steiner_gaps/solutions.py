"""Typed relaxation solutions, exact checks, and conversions between them.

The five relaxations compiled in :mod:`steiner_gaps.formulations` share the
edge-capacity vector ``u`` but carry different auxiliary variables.  This
module packages variable values into small typed objects, verifies every
constraint exactly in rational arithmetic, converts solutions between the
relaxations without changing ``u`` or the objective, associates the
canonical integral solution with a Steiner tree, and — for instances with
exactly three required vertices — decomposes an optimal plus-strengthened
multicommodity solution into an exact convex combination of Steiner trees.

Conversions mirror the constructions used to prove the relaxations
equivalent, so each one preserves ``u`` per edge and the objective value
exactly, and maps plus-feasible inputs to plus-feasible outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Mapping, Sequence

from .flows import construct_bidirected_balance_flow, max_flow
from .formulations import VERTEX_LIMIT, CompiledLp, VertexLimitExceeded
from .graphs import Arc, Edge, Graph, SteinerInstance, edge_key, tree_edges_valid

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# solution containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BcrSolution:
    """Edge capacities with a single root flow (cut-style feasibility)."""

    root: int
    u: Mapping[Edge, Fraction]
    f: Mapping[Arc, Fraction]
    kind = "bcr"

    def objective(self, inst: SteinerInstance) -> Fraction:
        return _objective(inst, self.u)


@dataclass(frozen=True)
class McfrSolution:
    """Edge capacities, a root flow, and one commodity per other terminal."""

    root: int
    u: Mapping[Edge, Fraction]
    f: Mapping[Arc, Fraction]
    g: Mapping[int, Mapping[Arc, Fraction]]
    kind = "mcfr"

    def objective(self, inst: SteinerInstance) -> Fraction:
        return _objective(inst, self.u)


@dataclass(frozen=True)
class MbfrSolution:
    """Edge capacities, vertex balances, and one balance flow per terminal."""

    u: Mapping[Edge, Fraction]
    b: Mapping[int, Fraction]
    f: Mapping[int, Mapping[Arc, Fraction]]
    kind = "mbfr"

    def objective(self, inst: SteinerInstance) -> Fraction:
        return _objective(inst, self.u)


@dataclass(frozen=True)
class MbcrSolution:
    """Edge capacities and vertex balances (cut-style feasibility)."""

    u: Mapping[Edge, Fraction]
    b: Mapping[int, Fraction]
    kind = "mbcr"

    def objective(self, inst: SteinerInstance) -> Fraction:
        return _objective(inst, self.u)


@dataclass(frozen=True)
class SterSolution:
    """Edge capacities and vertex occupancies (subtour-style feasibility)."""

    u: Mapping[Edge, Fraction]
    y: Mapping[int, Fraction]
    kind = "ster"

    def objective(self, inst: SteinerInstance) -> Fraction:
        return _objective(inst, self.u)


FormulationSolution = BcrSolution | McfrSolution | MbfrSolution | MbcrSolution | SterSolution


@dataclass(frozen=True)
class TreeSolution:
    """An undirected tree spanning the required vertices, with its cost."""

    edges: tuple[Edge, ...]
    cost: Fraction


@dataclass(frozen=True)
class ConvexDecomposition:
    """Weighted Steiner trees whose indicator mix reproduces a capacity vector.

    ``exact`` is True when the weights sum to one and the weighted indicator
    sum equals the decomposed ``u`` on every edge; otherwise ``note``
    explains why only a partial decomposition was produced.  ``phis``
    records the termination potential before each extraction (strictly
    decreasing).
    """

    parts: tuple[tuple[Fraction, TreeSolution], ...]
    exact: bool = True
    note: str = ""
    phis: tuple[int, ...] = ()

    def total_weight(self) -> Fraction:
        return sum((lam for lam, _ in self.parts), ZERO)

    def combined_u(self) -> dict[Edge, Fraction]:
        out: dict[Edge, Fraction] = {}
        for lam, tree in self.parts:
            for e in tree.edges:
                out[e] = out.get(e, ZERO) + lam
        return out

    def combined_cost(self) -> Fraction:
        return sum((lam * tree.cost for lam, tree in self.parts), ZERO)


class DecompositionError(ValueError):
    """Raised when the tree-extraction loop cannot proceed on its input."""


def _objective(inst: SteinerInstance, u: Mapping[Edge, Fraction]) -> Fraction:
    return sum((inst.graph.cost(*e) * x for e, x in u.items()), ZERO)


def tree_solution(inst: SteinerInstance, edges: Iterable[Edge]) -> TreeSolution:
    """Package ``edges`` as a :class:`TreeSolution`, validating tree-ness."""
    es = tuple(sorted(edge_key(*e) for e in edges))
    if not tree_edges_valid(inst.graph, es, inst.required):
        raise ValueError("edge set is not a tree spanning the required vertices")
    return TreeSolution(edges=es, cost=inst.graph.total_cost(es))


# ---------------------------------------------------------------------------
# exact verification
# ---------------------------------------------------------------------------

def _out_sum(g: Graph, flow: Mapping[Arc, Fraction], v: int) -> Fraction:
    return sum((flow.get((v, w), ZERO) for w in g.neighbors(v)), ZERO)


def _in_sum(g: Graph, flow: Mapping[Arc, Fraction], v: int) -> Fraction:
    return sum((flow.get((w, v), ZERO) for w in g.neighbors(v)), ZERO)


def _check_keys(errors: list[str], what: str, got: Iterable[Any],
                expected: Iterable[Any]) -> bool:
    got_s, exp_s = set(got), set(expected)
    if got_s != exp_s:
        missing = sorted(exp_s - got_s, key=repr)[:3]
        extra = sorted(got_s - exp_s, key=repr)[:3]
        errors.append(f"{what} keys mismatch: missing {missing}, unexpected {extra}")
        return False
    return True


def _check_nonneg(errors: list[str], what: str, m: Mapping[Any, Fraction]) -> None:
    for k, x in m.items():
        if x < 0:
            errors.append(f"{what}[{k!r}] = {x} is negative")


def _cut_value(g: Graph, u: Mapping[Edge, Fraction], inside: set[int]) -> Fraction:
    return sum((u[e] for e in g.edges() if (e[0] in inside) != (e[1] in inside)), ZERO)


def _guard(g: Graph) -> None:
    if g.n > VERTEX_LIMIT:
        raise VertexLimitExceeded(
            f"explicit cut verification needs |V| <= {VERTEX_LIMIT}, got {g.n}")


def _pair_errors(errors: list[str], g: Graph, u: Mapping[Edge, Fraction],
                 flow: Mapping[Arc, Fraction], tag: str) -> None:
    for v, w in g.edges():
        lhs = flow.get((v, w), ZERO) + flow.get((w, v), ZERO)
        if lhs > u[(v, w)]:
            errors.append(f"{tag} exceeds capacity on edge {(v, w)}: {lhs} > {u[(v, w)]}")


def verification_errors(inst: SteinerInstance, sol: FormulationSolution,
                        plus: bool = False) -> list[str]:
    """Every violated constraint of ``sol``'s relaxation, as messages.

    Flow-style relaxations are checked row by row in polynomial time.
    Cut-style relaxations (``bcr``, ``mbcr``, ``ster``) enumerate vertex
    subsets explicitly and therefore require ``|V| <=`` the same vertex
    limit as their compilers (:class:`VertexLimitExceeded` otherwise).
    """
    g = inst.graph
    errors: list[str] = []
    arcs = [(v, w) for v, w in g.edges()] + [(w, v) for v, w in g.edges()]
    if not _check_keys(errors, "u", sol.u, g.edges()):
        return errors
    _check_nonneg(errors, "u", sol.u)

    if sol.kind == "bcr":
        _guard(g)
        if sol.root not in inst.required:
            errors.append(f"root {sol.root} is not required")
            return errors
        if not _check_keys(errors, "f", sol.f, arcs):
            return errors
        _check_nonneg(errors, "f", sol.f)
        _pair_errors(errors, g, sol.u, sol.f, "f")
        req = set(inst.required)
        others = [v for v in g.vertices() if v != sol.root]
        for size in range(len(others) + 1):
            for extra in combinations(others, size):
                x = {sol.root, *extra}
                if req <= x:
                    continue
                val = sum((sol.f.get((v, w), ZERO) for v in x for w in g.neighbors(v)
                           if w not in x), ZERO)
                if val < 1:
                    errors.append(f"cut {sorted(x)} ships only {val} < 1")
        if plus:
            for v in inst.steiner_vertices:
                d = _out_sum(g, sol.f, v) - _in_sum(g, sol.f, v)
                if d < 0:
                    errors.append(f"flow divergence {d} < 0 at non-required {v}")

    elif sol.kind == "mcfr":
        if sol.root not in inst.required:
            errors.append(f"root {sol.root} is not required")
            return errors
        commodities = [t for t in inst.required if t != sol.root]
        if not _check_keys(errors, "f", sol.f, arcs):
            return errors
        if not _check_keys(errors, "g", sol.g, commodities):
            return errors
        for s in commodities:
            if not _check_keys(errors, f"g[{s}]", sol.g[s], arcs):
                return errors
        _check_nonneg(errors, "f", sol.f)
        _pair_errors(errors, g, sol.u, sol.f, "f")
        for s in commodities:
            gs = sol.g[s]
            _check_nonneg(errors, f"g[{s}]", gs)
            for a in arcs:
                if gs[a] > sol.f[a]:
                    errors.append(f"g[{s}]{a} = {gs[a]} exceeds f{a} = {sol.f[a]}")
            for v in g.vertices():
                d = _out_sum(g, gs, v) - _in_sum(g, gs, v)
                want = (ONE if v == sol.root else ZERO) - (ONE if v == s else ZERO)
                if d != want:
                    errors.append(f"commodity {s} divergence at {v}: {d} != {want}")
        if plus:
            for v in inst.steiner_vertices:
                d = _out_sum(g, sol.f, v) - _in_sum(g, sol.f, v)
                if d < 0:
                    errors.append(f"flow divergence {d} < 0 at non-required {v}")

    elif sol.kind == "mbfr":
        if not _check_keys(errors, "b", sol.b, g.vertices()):
            return errors
        if not _check_keys(errors, "f", sol.f, inst.required):
            return errors
        for r in inst.required:
            if not _check_keys(errors, f"f[{r}]", sol.f[r], arcs):
                return errors
        for r in inst.required:
            fr = sol.f[r]
            _check_nonneg(errors, f"f[{r}]", fr)
            _pair_errors(errors, g, sol.u, fr, f"f[{r}]")
            for v in g.vertices():
                d = _out_sum(g, fr, v) - _in_sum(g, fr, v) - sol.b[v]
                want = Fraction(2) if v == r else ZERO
                if d != want:
                    errors.append(f"balance for terminal {r} at {v}: {d} != {want}")
        if plus:
            for v in inst.steiner_vertices:
                if sol.b[v] < 0:
                    errors.append(f"b[{v}] = {sol.b[v]} < 0 at non-required vertex")

    elif sol.kind == "mbcr":
        _guard(g)
        if not _check_keys(errors, "b", sol.b, g.vertices()):
            return errors
        total = sum(sol.b.values(), ZERO)
        if total != -2:
            errors.append(f"balances sum to {total} != -2")
        req = set(inst.required)
        verts = list(g.vertices())
        for size in range(1, g.n + 1):
            for xs in combinations(verts, size):
                x = set(xs)
                need = Fraction(2) if req & x else ZERO
                val = _cut_value(g, sol.u, x) - sum((sol.b[v] for v in x), ZERO)
                if val < need:
                    errors.append(f"cut {sorted(x)}: u(delta) - b = {val} < {need}")
        if plus:
            for v in inst.steiner_vertices:
                if sol.b[v] < 0:
                    errors.append(f"b[{v}] = {sol.b[v]} < 0 at non-required vertex")

    elif sol.kind == "ster":
        _guard(g)
        if not _check_keys(errors, "y", sol.y, g.vertices()):
            return errors
        _check_nonneg(errors, "y", sol.y)
        total = sum(sol.u.values(), ZERO) - sum(sol.y.values(), ZERO)
        if total != -1:
            errors.append(f"u(E) - y(V) = {total} != -1")
        req = set(inst.required)
        verts = list(g.vertices())
        for size in range(1, g.n):
            for xs in combinations(verts, size):
                x = set(xs)
                bound = -ONE if req & x else ZERO
                inside = sum((sol.u[e] for e in g.edges()
                              if e[0] in x and e[1] in x), ZERO)
                val = inside - sum((sol.y[v] for v in x), ZERO)
                if val > bound:
                    errors.append(f"subset {sorted(x)}: u(E[X]) - y = {val} > {bound}")
        if plus:
            for v in inst.steiner_vertices:
                d = sum((sol.u[e] for e in g.delta(v)), ZERO) - 2 * sol.y[v]
                if d < 0:
                    errors.append(f"u(delta({v})) - 2y = {d} < 0 at non-required vertex")

    else:  # pragma: no cover - exhaustive kinds
        raise ValueError(f"unknown solution kind {sol.kind!r}")
    return errors


def verify(inst: SteinerInstance, sol: FormulationSolution, plus: bool = False) -> bool:
    """True iff ``sol`` satisfies every constraint of its relaxation exactly."""
    return not verification_errors(inst, sol, plus=plus)


def _require_valid(inst: SteinerInstance, sol: FormulationSolution,
                   plus: bool = False) -> None:
    errs = verification_errors(inst, sol, plus=plus)
    if errs:
        raise ValueError(f"input solution is infeasible: {'; '.join(errs[:4])}")


# ---------------------------------------------------------------------------
# packing solver output
# ---------------------------------------------------------------------------

def result_to_solution(compiled: CompiledLp,
                       values: Mapping[Any, Fraction]) -> FormulationSolution:
    """Re-pack a variable assignment of a compiled LP as a typed solution."""
    g = compiled.instance.graph
    arcs = [(v, w) for v, w in g.edges()] + [(w, v) for v, w in g.edges()]
    u = {e: values[("u", e)] for e in g.edges()}
    kind = compiled.kind
    if kind == "bcr":
        return BcrSolution(root=compiled.root, u=u,
                           f={a: values[("f", a)] for a in arcs})
    if kind == "mcfr":
        f = {a: values[("f", a)] for a in arcs}
        gmap = {s: {a: values[("g", s, a)] for a in arcs}
                for s in compiled.instance.required if s != compiled.root}
        return McfrSolution(root=compiled.root, u=u, f=f, g=gmap)
    if kind == "mbfr":
        b = {v: values[("b", v)] for v in g.vertices()}
        flows = {r: {a: values[("f", r, a)] for a in arcs}
                 for r in compiled.instance.required}
        return MbfrSolution(u=u, b=b, f=flows)
    if kind == "mbcr":
        return MbcrSolution(u=u, b={v: values[("b", v)] for v in g.vertices()})
    if kind == "ster":
        return SterSolution(u=u, y={v: values[("y", v)] for v in g.vertices()})
    raise ValueError(f"unknown formulation kind {kind!r}")


# ---------------------------------------------------------------------------
# integral association
# ---------------------------------------------------------------------------

def _tree_adjacency(edges: Iterable[Edge]) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {}
    for v, w in edges:
        adj.setdefault(v, []).append(w)
        adj.setdefault(w, []).append(v)
    for nbrs in adj.values():
        nbrs.sort()
    return adj


def _orient_from(adj: Mapping[int, list[int]], root: int) -> list[Arc]:
    """Arcs of the tree directed away from ``root`` (BFS order)."""
    out: list[Arc] = []
    seen = {root}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for w in adj.get(v, []):
            if w not in seen:
                seen.add(w)
                out.append((v, w))
                queue.append(w)
    return out


def _tree_path(adj: Mapping[int, list[int]], start: int, goal: int) -> list[Arc]:
    parent: dict[int, int] = {start: start}
    queue = [start]
    while queue:
        v = queue.pop(0)
        if v == goal:
            break
        for w in adj.get(v, []):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    if goal not in parent:
        raise ValueError(f"tree does not connect {start} and {goal}")
    path: list[Arc] = []
    v = goal
    while v != start:
        path.append((parent[v], v))
        v = parent[v]
    path.reverse()
    return path


def steiner_tree_to_solution(inst: SteinerInstance, edges: Iterable[Edge],
                             kind: str, root: int | None = None) -> FormulationSolution:
    """The canonical integral solution of ``kind`` for a Steiner tree.

    Capacities are the tree's edge indicator; flows follow the tree oriented
    away from the respective root; balances are ``degree - 2`` on tree
    vertices; occupancies are the tree-vertex indicator.  The result is
    feasible for ``kind``, and for its plus variant whenever every tree
    leaf is required.
    """
    g = inst.graph
    tree = tree_solution(inst, edges)
    adj = _tree_adjacency(tree.edges)
    arcs = [(v, w) for v, w in g.edges()] + [(w, v) for v, w in g.edges()]
    u = {e: (ONE if e in set(tree.edges) else ZERO) for e in g.edges()}
    if kind in ("bcr", "mcfr"):
        if root is None:
            root = inst.required[0]
        if root not in inst.required:
            raise ValueError(f"root {root} is not required")
        down = set(_orient_from(adj, root))
        f = {a: (ONE if a in down else ZERO) for a in arcs}
        if kind == "bcr":
            return BcrSolution(root=root, u=u, f=f)
        gmap = {}
        for s in inst.required:
            if s == root:
                continue
            on_path = set(_tree_path(adj, root, s))
            gmap[s] = {a: (ONE if a in on_path else ZERO) for a in arcs}
        return McfrSolution(root=root, u=u, f=f, g=gmap)
    b = {v: (Fraction(len(adj[v]) - 2) if v in adj else ZERO) for v in g.vertices()}
    if kind == "mbfr":
        flows = {}
        for r in inst.required:
            down = set(_orient_from(adj, r))
            flows[r] = {a: (ONE if a in down else ZERO) for a in arcs}
        return MbfrSolution(u=u, b=b, f=flows)
    if kind == "mbcr":
        return MbcrSolution(u=u, b=b)
    if kind == "ster":
        y = {v: (ONE if v in adj else ZERO) for v in g.vertices()}
        if len(tree.edges) == 0:
            y = {v: (ONE if v in set(inst.required) else ZERO) for v in g.vertices()}
        return SterSolution(u=u, y=y)
    raise ValueError(f"unknown formulation kind {kind!r}")


# ---------------------------------------------------------------------------
# conversions
# ---------------------------------------------------------------------------

def translate_mcfr_to_mbfr(inst: SteinerInstance, sol: McfrSolution) -> MbfrSolution:
    """Commodity flows to per-terminal balance flows; ``u`` unchanged.

    The balance at ``v`` is the root flow's divergence (shifted by 2 at the
    root); each non-root terminal's flow reroutes its commodity backwards
    through the root flow.  Plus-feasible inputs stay plus-feasible since
    the new balances equal the old divergences.
    """
    _require_valid(inst, sol)
    g = inst.graph
    r = sol.root
    b = {}
    for v in g.vertices():
        b[v] = _out_sum(g, sol.f, v) - _in_sum(g, sol.f, v) - (Fraction(2) if v == r else ZERO)
    flows: dict[int, dict[Arc, Fraction]] = {r: dict(sol.f)}
    for s, gs in sol.g.items():
        flows[s] = {(v, w): sol.f[(v, w)] - gs[(v, w)] + gs[(w, v)]
                    for (v, w) in sol.f}
    return MbfrSolution(u=dict(sol.u), b=b, f=flows)


def translate_mbfr_to_mcfr(inst: SteinerInstance, sol: MbfrSolution,
                           root: int | None = None) -> McfrSolution:
    """Per-terminal balance flows to commodity flows; ``u`` unchanged.

    The root flow averages the chosen terminal's flow against the capacity;
    each commodity takes the positive part of the net-flow difference
    between the root's and its own terminal's balance flow.
    """
    _require_valid(inst, sol)
    if root is None:
        root = inst.required[0]
    if root not in inst.required:
        raise ValueError(f"root {root} is not required")
    half = Fraction(1, 2)
    fr = sol.f[root]
    f: dict[Arc, Fraction] = {}
    for (v, w) in fr:
        e = edge_key(v, w)
        f[(v, w)] = half * (fr[(v, w)] - fr[(w, v)] + sol.u[e])
    gmap: dict[int, dict[Arc, Fraction]] = {}
    for s in inst.required:
        if s == root:
            continue
        fs = sol.f[s]
        gmap[s] = {(v, w): half * max(fr[(v, w)] - fr[(w, v)]
                                      + fs[(w, v)] - fs[(v, w)], ZERO)
                   for (v, w) in fr}
    return McfrSolution(root=root, u=dict(sol.u), f=f, g=gmap)


def translate_mbfr_to_mbcr(inst: SteinerInstance, sol: MbfrSolution) -> MbcrSolution:
    """Drop the balance flows; the flows witness every cut inequality."""
    _require_valid(inst, sol)
    return MbcrSolution(u=dict(sol.u), b=dict(sol.b))


def translate_mbcr_to_mbfr(inst: SteinerInstance, sol: MbcrSolution) -> MbfrSolution:
    """Rebuild one balance flow per terminal from capacities and balances.

    Each terminal's flow is produced by the exact balance-flow construction
    for the balance vector shifted by 2 at that terminal; feasibility of
    the cut inequalities guarantees the construction succeeds.
    """
    _require_valid(inst, sol)
    g = inst.graph
    flows: dict[int, dict[Arc, Fraction]] = {}
    arcs = [(v, w) for v, w in g.edges()] + [(w, v) for v, w in g.edges()]
    for r in inst.required:
        br = {v: sol.b[v] + (Fraction(2) if v == r else ZERO) for v in g.vertices()}
        flow, witness = construct_bidirected_balance_flow(g, sol.u, br)
        if flow is None:
            raise RuntimeError(
                f"balance flow for terminal {r} failed despite verified input; "
                f"witness set {sorted(witness or ())}")
        flows[r] = {a: flow.get(a, ZERO) for a in arcs}
    return MbfrSolution(u=dict(sol.u), b=dict(sol.b), f=flows)


def translate_mbcr_to_ster(inst: SteinerInstance, sol: MbcrSolution) -> SterSolution:
    """Occupancy ``y(v) = (u(delta(v)) - b(v)) / 2``; ``u`` unchanged."""
    _require_valid(inst, sol)
    g = inst.graph
    half = Fraction(1, 2)
    y = {v: half * (sum((sol.u[e] for e in g.delta(v)), ZERO) - sol.b[v])
         for v in g.vertices()}
    return SterSolution(u=dict(sol.u), y=y)


def translate_ster_to_mbcr(inst: SteinerInstance, sol: SterSolution) -> MbcrSolution:
    """Balance ``b(v) = u(delta(v)) - 2 y(v)``; ``u`` unchanged."""
    _require_valid(inst, sol)
    g = inst.graph
    b = {v: sum((sol.u[e] for e in g.delta(v)), ZERO) - 2 * sol.y[v]
         for v in g.vertices()}
    return MbcrSolution(u=dict(sol.u), b=b)


# ---------------------------------------------------------------------------
# three-terminal decomposition
# ---------------------------------------------------------------------------

def normalize_mcfr(inst: SteinerInstance, sol: McfrSolution) -> McfrSolution:
    """Shrink the root flow to the commodity maximum and tighten capacities.

    Sets ``f(a) = max_s g_s(a)`` per arc and ``u(e) = f(v,w) + f(w,v)`` per
    edge.  For optimal solutions this cannot increase the objective; the
    result is the normal form assumed by :func:`decompose_three_terminal`.
    The output is *not* re-verified here — on degenerate inputs (typically
    with zero-cost edges) it can lose plus-feasibility.
    """
    f = {a: max((gs[a] for gs in sol.g.values()), default=ZERO) for a in sol.f}
    u = {e: f[(e[0], e[1])] + f[(e[1], e[0])] for e in sol.u}
    return McfrSolution(root=sol.root, u=u, f=f,
                        g={s: dict(gs) for s, gs in sol.g.items()})


def _lex_bfs_path(support: Iterable[Arc], start: int, goal: int) -> list[Arc] | None:
    """Shortest directed path in the arc set, neighbors scanned in order."""
    if start == goal:
        return []
    adj: dict[int, list[int]] = {}
    for v, w in support:
        adj.setdefault(v, []).append(w)
    for nbrs in adj.values():
        nbrs.sort()
    parent: dict[int, int] = {start: start}
    queue = [start]
    while queue:
        v = queue.pop(0)
        for w in adj.get(v, []):
            if w not in parent:
                parent[w] = v
                if w == goal:
                    path: list[Arc] = []
                    x = goal
                    while x != start:
                        path.append((parent[x], x))
                        x = parent[x]
                    path.reverse()
                    return path
                queue.append(w)
    return None


def decompose_three_terminal(inst: SteinerInstance,
                             sol: McfrSolution) -> ConvexDecomposition:
    """Split a plus-feasible commodity solution into weighted Steiner trees.

    Requires exactly three required vertices.  The input is verified for
    the plus-strengthened commodity relaxation, normalized, and then trees
    are peeled off: a branching vertex with strict common-flow deficit (or
    the root) is joined to the root through the common-flow support and to
    the two other terminals through the respective surplus supports; the
    largest weight keeping the remainder feasible is removed and the
    remainder rescaled.  A termination potential — the branching-vertex
    count plus the support sizes — strictly decreases each round.

    For an optimal input the emitted weights sum to one and their indicator
    mix reproduces ``u`` exactly (``exact=True``).  If a peel weight
    reaches one while the remainder is not itself a tree (possible only in
    degenerate cases, e.g. zero-cost edges), the partial decomposition is
    returned with ``exact=False`` and an explanatory note.
    """
    if len(inst.required) != 3:
        raise ValueError(f"need exactly 3 required vertices, got {len(inst.required)}")
    _require_valid(inst, sol, plus=True)
    norm = normalize_mcfr(inst, sol)
    errs = verification_errors(inst, norm, plus=True)
    if errs:
        raise DecompositionError(
            "normal form is infeasible (degenerate input): " + "; ".join(errs[:3]))
    g = inst.graph
    r = norm.root
    s1, s2 = [t for t in inst.required if t != r]
    f = dict(norm.f)
    g1, g2 = dict(norm.g[s1]), dict(norm.g[s2])
    u0 = dict(norm.u)
    arcs = list(f)

    parts: list[tuple[Fraction, TreeSolution]] = []
    phis: list[int] = []
    weight = ONE
    exact = True
    note = ""
    max_rounds = None
    for _ in range(10 ** 6):
        g12 = {a: min(g1[a], g2[a]) for a in arcs}
        deficit = {}
        for v in g.vertices():
            if v == r:
                continue
            d = _in_sum(g, g12, v) - _out_sum(g, g12, v)
            if d > 0:
                deficit[v] = d
        phi = (len(deficit) + sum(1 for a in arcs if g12[a] > 0)
               + sum(1 for a in arcs if g1[a] > g12[a])
               + sum(1 for a in arcs if g2[a] > g12[a]))
        if phis and phi >= phis[-1]:
            raise DecompositionError(
                f"termination potential did not decrease: {phis[-1]} -> {phi}")
        phis.append(phi)
        if max_rounds is None:
            max_rounds = phi + 2

        if deficit:
            v_star = min(deficit)
            p0 = _lex_bfs_path([a for a in arcs if g12[a] > 0], r, v_star)
            if p0 is None:
                raise DecompositionError(
                    f"no common-flow path from root to branching vertex {v_star}")
        else:
            v_star = r
            p0 = []
        p1 = _lex_bfs_path([a for a in arcs if g1[a] > g12[a]], v_star, s1)
        p2 = _lex_bfs_path([a for a in arcs if g2[a] > g12[a]], v_star, s2)
        if p1 is None or p2 is None:
            raise DecompositionError(
                f"no surplus path from {v_star} to a terminal")
        tree_arcs = p0 + p1 + p2
        t_edges = [edge_key(*a) for a in tree_arcs]
        if not tree_edges_valid(g, t_edges, inst.required):
            raise DecompositionError(
                f"extracted paths do not form a tree: {sorted(t_edges)}")
        tree = tree_solution(inst, t_edges)

        eps_candidates = []
        if v_star != r:
            eps_candidates.append(deficit[v_star])
            eps_candidates.append(min(g12[a] for a in p0))
        if p1:
            eps_candidates.append(min(g1[a] - g12[a] for a in p1))
        if p2:
            eps_candidates.append(min(g2[a] - g12[a] for a in p2))
        eps = min(eps_candidates)
        if eps <= 0:
            raise DecompositionError(f"non-positive peel weight {eps}")

        if eps >= 1:
            parts.append((weight, tree))
            tree_e = set(tree.edges)
            leftovers = [e for e, x in u0.items()
                         if x != (ONE if e in tree_e else ZERO)]
            if eps > 1 or leftovers:
                exact = False
                note = ("peel weight reached one with a non-tree remainder "
                        f"on edges {sorted(leftovers)[:4]}")
            break

        parts.append((weight * eps, tree))
        weight *= ONE - eps
        in0, in1, in2 = set(p0), set(p1), set(p2)
        scale = ONE - eps
        for a in arcs:
            d1 = eps if (a in in0 or a in in1) else ZERO
            d2 = eps if (a in in0 or a in in2) else ZERO
            df = eps if (a in in0 or a in in1 or a in in2) else ZERO
            g1[a] = (g1[a] - d1) / scale
            g2[a] = (g2[a] - d2) / scale
            f[a] = (f[a] - df) / scale
            if g1[a] < 0 or g2[a] < 0 or f[a] < 0:
                raise DecompositionError(f"negative value after peel on arc {a}")
        for a in arcs:
            if f[a] != max(g1[a], g2[a]):
                raise DecompositionError(f"root flow lost normal form on arc {a}")
        u0 = {e: f[(e[0], e[1])] + f[(e[1], e[0])] for e in u0}
        current = McfrSolution(root=r, u=u0, f=f, g={s1: g1, s2: g2})
        errs = verification_errors(inst, current, plus=True)
        if errs:
            raise DecompositionError("remainder infeasible: " + "; ".join(errs[:3]))
        if len(phis) > max_rounds:
            raise DecompositionError("extraction did not terminate")
    else:  # pragma: no cover - loop always breaks or raises
        raise DecompositionError("extraction did not terminate")

    deco = ConvexDecomposition(parts=tuple(parts), exact=exact, note=note,
                               phis=tuple(phis))
    if exact:
        mixed = deco.combined_u()
        for e, x in norm.u.items():
            if mixed.get(e, ZERO) != x:
                return ConvexDecomposition(
                    parts=deco.parts, exact=False,
                    note=f"indicator mix differs from u on edge {e}",
                    phis=deco.phis)
    return deco
