"""Closed-form fractional solutions for the simplex families, with gap formulas.

The centrepiece is an explicit balanced multicommodity solution for the
corner-contracted simplex instances: per-level edge capacities ``u'`` that
vanish above level two, vertex balances, and one flow per corner terminal.
The flows are assembled on the corner-split graph from three building
blocks — an orientation rule on edges whose top endpoint involves the
commodity's coordinate, a symmetric path flow along one-dimensional
coordinate lines, and a matching flow on two-dimensional sub-gadgets —
then contracted onto the corner terminals, where the incident capacity sums
to exactly one.  The resulting solution is balanced-flow feasible with
objective ``closed_form_cost``, which yields the family's integrality-gap
lower bounds in closed form.

A second construction gives the uniform capacity solution for the pair
gadget instances: every edge at ``1/d``, one unit routed from the root to
each terminal along ``d`` edge-disjoint paths.  It is multicommodity
feasible with objective ``(7d+1)/2`` but violates the nonnegative-divergence
strengthening at the gadget hubs for ``d >= 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .geometry import Point, binom, iter_simplex, level, support, unit
from .graphs import Arc, Edge, Graph, SteinerInstance, edge_key
from .instances import (
    gen_goemans_instance,
    gen_simplified_simplex_instance,
    gen_split_simplified_graph,
)
from .solutions import MbfrSolution, McfrSolution

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# per-level capacity and balance profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelProfile:
    """Edge capacity by level for a corner-contracted simplex instance.

    Levels one and two carry the only non-zero values; every higher level
    is zero.  An edge's level is the larger of its endpoint levels, where a
    point's level is its support size minus one.
    """

    d: int
    s: int
    delta: int
    u1: Fraction
    u2: Fraction

    def value(self, lvl: int) -> Fraction:
        if lvl <= 0:
            raise ValueError(f"edge level must be positive, got {lvl}")
        if lvl == 1:
            return self.u1
        if lvl == 2:
            return self.u2
        return ZERO


@dataclass(frozen=True)
class BalanceProfile:
    """Vertex balances by layer and level induced by a capacity profile.

    ``bottom(l)`` applies to sum-``s`` points at level ``l``; ``top(l)`` to
    sum-``s+1`` points at level ``l`` that are not corner-group members.
    """

    profile: LevelProfile

    def bottom(self, lvl: int) -> Fraction:
        if lvl < 1:
            raise ValueError(f"vertex level must be positive, got {lvl}")
        p = self.profile
        return (lvl - 1) * p.value(lvl) + (p.d - lvl) * p.value(lvl + 1)

    def top(self, lvl: int) -> Fraction:
        if lvl < 1:
            raise ValueError(f"vertex level must be positive, got {lvl}")
        return -(lvl - 1) * self.profile.value(lvl)


def _check_profile_params(d: int, s: int, delta: int) -> None:
    if d < 2:
        raise ValueError("the construction needs d >= 2")
    if delta < 1 or 2 * delta > s:
        raise ValueError("need 1 <= delta and 2*delta <= s")
    if d >= 3 and s != 3 * delta - 2:
        raise ValueError("for d >= 3 the construction needs s == 3*delta - 2")


def level_profile(d: int, s: int, delta: int) -> LevelProfile:
    """The capacity profile whose contracted corner degree sums to one.

    ``u'(1) = ((d+1)s - d(3 delta - 2) - 1) / (C(d+1,2) (2s - 3 delta + 1))``
    and ``u'(2) = 3 / (C(d+1,2) (2s - 3 delta + 1))``.  For ``d = 2`` these
    reduce to ``(s - 2 delta + 1)/q`` and ``1/q`` with ``q = 2s - 3 delta + 1``;
    for ``d >= 3`` (which requires ``s = 3 delta - 2``) to ``1/C(d+1,2)``
    and ``3/((s-1) C(d+1,2))``.
    """
    _check_profile_params(d, s, delta)
    den = binom(d + 1, 2) * (2 * s - 3 * delta + 1)
    u1 = Fraction((d + 1) * s - d * (3 * delta - 2) - 1, den)
    u2 = Fraction(3, den)
    return LevelProfile(d, s, delta, u1, u2)


# ---------------------------------------------------------------------------
# building-block flows
# ---------------------------------------------------------------------------

def path_flow(p: int, gamma: Fraction) -> tuple[dict[Arc, Fraction], list[Fraction]]:
    """Symmetric two-way flow on the path ``0-1-...-p``.

    Arc ``(t, t+1)`` carries ``t*gamma`` and arc ``(t+1, t)`` carries
    ``(p-1-t)*gamma``, so both directions of every edge sum to
    ``(p-1)*gamma``, each endpoint has divergence ``-(p-1)*gamma``, and each
    interior vertex ``+2*gamma``.  Returns the flow and the divergence list.
    """
    if p < 1:
        raise ValueError("path length must be at least 1")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    flow: dict[Arc, Fraction] = {}
    for t in range(p):
        flow[(t, t + 1)] = t * gamma
        flow[(t + 1, t)] = (p - 1 - t) * gamma
    balance = [2 * gamma] * (p + 1)
    balance[0] = balance[p] = -(p - 1) * gamma
    return flow, balance


@dataclass(frozen=True)
class MatchingGadget:
    """Perfect-matching flow on a two-dimensional capped simplex slab.

    Bottoms are the sum-``s`` points with all coordinates at most
    ``s - delta``; tops are the sum-``s+1`` points with all coordinates
    between 1 and ``s - delta + 1``.  Every vertex falls into exactly one of
    six classes ``("A", i)`` / ``("B", i)`` determined by comparing
    coordinates against the threshold ``delta``; each top receives ``gamma``
    from the bottom obtained by lowering its class coordinate.  Every bottom
    then has divergence ``+gamma`` and every top ``-gamma``, and no edge
    carries more than ``gamma`` in its two directions combined.
    """

    s: int
    delta: int
    gamma: Fraction
    bottoms: tuple[Point, ...]
    tops: tuple[Point, ...]
    classes: Mapping[Point, tuple[str, int]]
    flow: Mapping[tuple[Point, Point], Fraction]

    def balance(self, v: Point) -> Fraction:
        return self.gamma if sum(v) == self.s else -self.gamma


def _classify(v: Point, delta: int) -> tuple[str, int]:
    for i in range(3):
        others = [v[j] for j in range(3) if j != i]
        if v[i] <= delta - 1 and min(others) >= delta:
            return ("A", i)
        if v[i] >= delta and max(others) <= delta - 1:
            return ("B", i)
    raise ValueError(f"point {v} matches no class for delta={delta}")


def matching_flow(s: int, delta: int, gamma: Fraction) -> MatchingGadget:
    """The matching flow for the slab with threshold ``delta = (s+2)/3``."""
    if s != 3 * delta - 2:
        raise ValueError("the matching flow needs s == 3*delta - 2")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    cap = s - delta
    bottoms = tuple(iter_simplex(2, s, max_coord=cap))
    tops = tuple(v for v in iter_simplex(2, s + 1, max_coord=cap + 1)
                 if min(v) >= 1)
    classes = {v: _classify(v, delta) for v in bottoms + tops}
    flow: dict[tuple[Point, Point], Fraction] = {}
    for v in tops:
        _, i = classes[v]
        w = tuple(x - (j == i) for j, x in enumerate(v))
        flow[(w, v)] = gamma
    return MatchingGadget(s, delta, gamma, bottoms, tops, classes, flow)


# ---------------------------------------------------------------------------
# the full split-graph flow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitFlow:
    """One commodity's flow on the corner-split graph, with its certificates.

    ``u`` assigns each edge its level capacity, ``b`` the commodity-``k``
    balance of each vertex, and ``f`` the flow.  ``check`` returns every
    violated requirement (nonnegativity, per-edge two-direction bounds,
    exact divergences), so an empty list certifies the construction.
    """

    graph: Graph
    k: int
    u: Mapping[Edge, Fraction]
    b: Mapping[int, Fraction]
    f: Mapping[Arc, Fraction]

    def check(self) -> list[str]:
        g = self.graph
        errors: list[str] = []
        for a, val in self.f.items():
            if val < 0:
                errors.append(f"f{a} = {val} < 0")
        for e in g.edges():
            total = self.f.get(e, ZERO) + self.f.get((e[1], e[0]), ZERO)
            if total > self.u[e]:
                errors.append(f"edge {e}: directions sum to {total} > {self.u[e]}")
        div: dict[int, Fraction] = {v: ZERO for v in g.vertices()}
        for (v, w), val in self.f.items():
            div[v] -= val
            div[w] += val
        for v in g.vertices():
            if -div[v] != self.b[v]:
                errors.append(
                    f"vertex {v} {g.labels.get(v)}: divergence {-div[v]} != b {self.b[v]}")
        return errors


def _point_of(label: object) -> Point:
    if isinstance(label, tuple) and len(label) == 3 and label[0] == "R":
        return label[2]
    return label  # type: ignore[return-value]


def _edge_level(g: Graph, e: Edge) -> int:
    return max(level(_point_of(g.labels[e[0]])), level(_point_of(g.labels[e[1]])))


def simplified_simplex_flow(d: int, s: int, delta: int, k: int) -> SplitFlow:
    """The commodity-``k`` flow on the corner-split graph.

    Assembled from three parts whose arc supports are disjoint (they are
    nevertheless summed, and the per-edge bound is checked once at the end
    by :meth:`SplitFlow.check`):

    1. every edge whose top endpoint ``w`` has ``k`` in its support is
       oriented by the coordinate ``i`` the edge changes — downward at
       ``u'(level(w))`` if ``i = k``, upward otherwise;
    2. for each coordinate pair avoiding ``k``, the one-dimensional line
       between the two corner-group endpoints carries the symmetric path
       flow with ``gamma = u'(2)`` and length ``s - 2 delta + 2`` (interior
       tops pass the flow through);
    3. for ``d >= 3``, each three-coordinate set avoiding ``k`` spans a
       two-dimensional sub-gadget carrying the matching flow at ``u'(2)``.
    """
    _check_profile_params(d, s, delta)
    if not 0 <= k <= d:
        raise ValueError(f"commodity index {k} out of range 0..{d}")
    g = gen_split_simplified_graph(d, s, delta)
    index = {lab: v for v, lab in g.labels.items()}
    profile = level_profile(d, s, delta)
    balances = BalanceProfile(profile)
    cap = s - delta

    u = {e: profile.value(_edge_level(g, e)) for e in g.edges()}

    b: dict[int, Fraction] = {}
    for v, lab in g.labels.items():
        pt = _point_of(lab)
        if lab != pt:  # corner-group member ("R", i, point)
            sign = ONE if lab[1] == k else -ONE
            b[v] = sign * profile.value(level(pt))
        elif sum(pt) == s:
            b[v] = balances.bottom(level(pt))
        else:
            b[v] = balances.top(level(pt))

    f: dict[Arc, Fraction] = {}

    def add(src: int, dst: int, val: Fraction) -> None:
        if val:
            f[(src, dst)] = f.get((src, dst), ZERO) + val

    # Part 1: orientation rule on edges with k in the top's support.
    for e in g.edges():
        pa, pb = _point_of(g.labels[e[0]]), _point_of(g.labels[e[1]])
        if sum(pa) == s + 1:
            top_id, bot_id, top_pt, bot_pt = e[0], e[1], pa, pb
        else:
            top_id, bot_id, top_pt, bot_pt = e[1], e[0], pb, pa
        if top_pt[k] == 0:
            continue
        val = profile.value(level(top_pt))
        i = next(j for j in range(d + 1) if top_pt[j] != bot_pt[j])
        if i == k:
            add(top_id, bot_id, val)
        else:
            add(bot_id, top_id, val)

    # Part 2: path flows along the coordinate lines avoiding k.
    p_len = s - 2 * delta + 2
    gamma = profile.u2
    for i in range(d + 1):
        for j in range(i + 1, d + 1):
            if k in (i, j):
                continue
            # Path vertices: corner-group endpoint in direction j, the
            # bottoms with coordinates (x, s - x) on (i, j), then the
            # endpoint in direction i.
            ids = [index[("R", j, _line_point(d, i, j, delta, s + 1 - delta))]]
            ids += [index[_line_point(d, i, j, x, s - x)]
                    for x in range(delta, cap + 1)]
            ids.append(index[("R", i, _line_point(d, i, j, s + 1 - delta, delta))])
            flow, _ = path_flow(p_len, gamma)
            for t in range(p_len):
                fwd, bwd = flow[(t, t + 1)], flow[(t + 1, t)]
                if t == 0 or t == p_len - 1:
                    segment = [(ids[t], ids[t + 1])]
                else:
                    # Two graph edges through the pass-through top point.
                    mid = index[_line_point(d, i, j, delta + t, s - delta - t + 1)]
                    segment = [(ids[t], mid), (mid, ids[t + 1])]
                for src, dst in segment:
                    add(src, dst, fwd)
                    add(dst, src, bwd)

    # Part 3: matching flows on the two-dimensional sub-gadgets avoiding k.
    if d >= 3:
        gadget = matching_flow(s, delta, profile.u2)
        coords = [i for i in range(d + 1) if i != k]
        for triple in _triples(coords):
            for (w3, v3), val in gadget.flow.items():
                src = index[_embed(d, triple, w3)]
                dst_pt = _embed(d, triple, v3)
                if max(v3) == cap + 1:
                    hot = triple[max(range(3), key=lambda t: v3[t])]
                    dst = index[("R", hot, dst_pt)]
                else:
                    dst = index[dst_pt]
                add(src, dst, val)

    full = {a: f.get(a, ZERO) for e in g.edges() for a in (e, (e[1], e[0]))}
    return SplitFlow(g, k, u, b, full)


def _line_point(d: int, i: int, j: int, xi: int, xj: int) -> Point:
    pt = [0] * (d + 1)
    pt[i], pt[j] = xi, xj
    return tuple(pt)


def _embed(d: int, triple: tuple[int, int, int], v3: Point) -> Point:
    pt = [0] * (d + 1)
    for t, coord in enumerate(triple):
        pt[coord] = v3[t]
    return tuple(pt)


def _triples(coords: list[int]) -> Iterator[tuple[int, int, int]]:
    n = len(coords)
    for a in range(n):
        for b_ in range(a + 1, n):
            for c in range(b_ + 1, n):
                yield (coords[a], coords[b_], coords[c])


# ---------------------------------------------------------------------------
# the contracted balanced-flow solution
# ---------------------------------------------------------------------------

def simplified_simplex_solution(d: int, s: int, delta: int) -> MbfrSolution:
    """The balanced multicommodity solution of the corner-contracted instance.

    Contracts each corner group of the split graph onto its terminal.  The
    capacities incident to every terminal sum to exactly one, each terminal's
    balance is ``-1``, and the commodity flows are the contracted split-graph
    flows.  The objective equals :func:`closed_form_cost`.
    """
    inst = gen_simplified_simplex_instance(d, s, delta)
    g = inst.graph
    inst_index = {lab: v for v, lab in g.labels.items()}
    corner_ids = {i: inst_index[unit(d, i, s)] for i in range(d + 1)}

    def contract(split: Graph, v: int) -> int:
        lab = split.labels[v]
        if isinstance(lab, tuple) and len(lab) == 3 and lab[0] == "R":
            return corner_ids[lab[1]]
        return inst_index[lab]

    u: dict[Edge, Fraction] = {}
    b: dict[int, Fraction] = {}
    f: dict[int, dict[Arc, Fraction]] = {}
    for k in range(d + 1):
        sf = simplified_simplex_flow(d, s, delta, k)
        fk = {a: ZERO for e in g.edges() for a in (e, (e[1], e[0]))}
        for (v, w), val in sf.f.items():
            if val:
                fk[(contract(sf.graph, v), contract(sf.graph, w))] += val
        f[corner_ids[k]] = fk
        if k == 0:
            for e, val in sf.u.items():
                u[edge_key(contract(sf.graph, e[0]), contract(sf.graph, e[1]))] = val
            for v in g.vertices():
                b[v] = ZERO
            for v, val in sf.b.items():
                lab = sf.graph.labels[v]
                if not (isinstance(lab, tuple) and len(lab) == 3 and lab[0] == "R"):
                    b[inst_index[lab]] = val
            for i in range(d + 1):
                b[corner_ids[i]] = -ONE
    return MbfrSolution(u=u, b=b, f=f)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def closed_form_cost(d: int, s: int, delta: int) -> Fraction:
    """Objective of the contracted solution:
    ``s(d+1) + (3/2) (s-delta)(s-delta+1)/(2s-3 delta+1) (d-1)``."""
    _check_profile_params(d, s, delta)
    return (s * (d + 1)
            + Fraction(3, 2) * Fraction((s - delta) * (s - delta + 1),
                                        2 * s - 3 * delta + 1) * (d - 1))


def closed_form_cost_dual_cases(s: int, alpha: int) -> Fraction:
    """The two-dimensional cost in the three-case form for ``s = 3 delta - alpha``.

    ``alpha`` selects the residue case: the cost equals
    ``(11s^2 + 12s)/(3(s+1))`` for ``alpha = 0``, ``(11s^2 + s - 1)/(3s)``
    for ``alpha = 1`` and ``(11s + 1)/3`` for ``alpha = 2``.
    """
    if alpha not in (0, 1, 2):
        raise ValueError("alpha must be 0, 1 or 2")
    if (s + alpha) % 3 != 0:
        raise ValueError("need s + alpha divisible by 3 so delta is integral")
    delta = (s + alpha) // 3
    _check_profile_params(2, s, delta)
    if alpha == 0:
        return Fraction(11 * s * s + 12 * s, 3 * (s + 1))
    if alpha == 1:
        return Fraction(11 * s * s + s - 1, 3 * s)
    return Fraction(11 * s + 1, 3)


def gap_lower_bound(d: int, s: int) -> Fraction:
    """Integrality-gap lower bound ``6d / (5d + 1 + (d-1)/s)`` from the
    contracted family at ``delta = (s+2)/3`` (integral tree cost ``2sd``
    over :func:`closed_form_cost`)."""
    if (s + 2) % 3 != 0:
        raise ValueError("need s == 1 (mod 3) so delta = (s+2)/3 is integral")
    delta = (s + 2) // 3
    _check_profile_params(d, s, delta)
    return Fraction(6 * d * s, (5 * d + 1) * s + d - 1)


def gap_limit(k: int) -> Fraction:
    """Limit of :func:`gap_lower_bound` in ``s``: ``6(k-1) / (5(k-1) + 1)``
    for instances with ``k`` required vertices (``k = d + 1``)."""
    if k < 2:
        raise ValueError("need at least two required vertices")
    return Fraction(6 * (k - 1), 5 * (k - 1) + 1)


# ---------------------------------------------------------------------------
# the uniform gadget solution
# ---------------------------------------------------------------------------

def goemans_fractional(d: int) -> McfrSolution:
    """Uniform capacity ``1/d`` solution of the pair gadget instance.

    Each terminal's unit of flow splits into ``d`` edge-disjoint root paths:
    the direct spine path, and for every other spine index the detour
    through that pair's hub.  The root flow takes the per-arc maximum, so
    both directions of every used edge sum to exactly ``1/d``.  Objective
    ``(7d+1)/2``.  For ``d >= 2`` the hub vertices have negative divergence,
    so the solution is multicommodity feasible but not plus-feasible.
    """
    inst = gen_goemans_instance(d)
    g = inst.graph
    index = {lab: v for v, lab in g.labels.items()}
    val = Fraction(1, d)
    u = {e: val for e in g.edges()}
    arcs = [a for e in g.edges() for a in (e, (e[1], e[0]))]

    def path_arcs(*labels: tuple) -> list[Arc]:
        ids = [index[lab] for lab in labels]
        return list(zip(ids, ids[1:]))

    gmap: dict[int, dict[Arc, Fraction]] = {}
    f = {a: ZERO for a in arcs}
    for i in range(1, d + 1):
        gs = {a: ZERO for a in arcs}
        routes = [path_arcs(("r",), ("a", i), ("s", i))]
        for j in range(1, d + 1):
            if j == i:
                continue
            lo, hi = min(i, j), max(i, j)
            routes.append(path_arcs(("r",), ("a", j), ("c", lo, hi),
                                    ("b", lo, hi), ("s", i)))
        for route in routes:
            for a in route:
                gs[a] += val
                f[a] = max(f[a], gs[a])
        gmap[index[("s", i)]] = gs
    return McfrSolution(root=index[("r",)], u=u, f=f, g=gmap)
