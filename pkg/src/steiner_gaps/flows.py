"""Exact max-flow and balance-flow routines on small graphs.

Everything here runs in exact rational arithmetic.  The central routine is
Edmonds-Karp max-flow; on top of it sit a minimum-cut witness extractor and
the construction of a bidirected balance flow (a flow with prescribed vertex
divergences whose two orientations of each edge share one capacity), which
exists if and only if every vertex set has enough capacity on its boundary.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Iterable, Mapping

from .graphs import Arc, Edge, Graph, edge_key

ZERO = Fraction(0)


def max_flow(
    n: int,
    capacities: Mapping[Arc, Fraction],
    source: int,
    sink: int,
) -> tuple[Fraction, dict[Arc, Fraction], set[int]]:
    """Edmonds-Karp max-flow on vertex ids ``0..n-1``.

    Returns ``(value, flow, cut)`` where ``flow`` is positive only on given
    arcs and ``cut`` is the source side of a minimum cut (so the arcs from
    ``cut`` to its complement are saturated and certify optimality).
    """
    adj: list[list[int]] = [[] for _ in range(n)]
    cap: dict[Arc, Fraction] = {}
    for (v, w), c in capacities.items():
        if c < 0:
            raise ValueError(f"negative capacity on arc {(v, w)}")
        if c == 0:
            continue
        cap[(v, w)] = cap.get((v, w), ZERO) + c
        if w not in adj[v]:
            adj[v].append(w)
        if v not in adj[w]:
            adj[w].append(v)
    flow: dict[Arc, Fraction] = {}

    def residual(v: int, w: int) -> Fraction:
        return cap.get((v, w), ZERO) - flow.get((v, w), ZERO) + flow.get((w, v), ZERO)

    while True:
        parent: dict[int, int] = {source: source}
        queue = deque([source])
        while queue and sink not in parent:
            v = queue.popleft()
            for w in adj[v]:
                if w not in parent and residual(v, w) > 0:
                    parent[w] = v
                    queue.append(w)
        if sink not in parent:
            break
        path = [sink]
        while path[-1] != source:
            path.append(parent[path[-1]])
        path.reverse()
        push = min(residual(v, w) for v, w in zip(path, path[1:]))
        for v, w in zip(path, path[1:]):
            back = min(flow.get((w, v), ZERO), push)
            if back:
                flow[(w, v)] -= back
            rest = push - back
            if rest:
                flow[(v, w)] = flow.get((v, w), ZERO) + rest
    cut = {v for v in parent}
    value = sum((f for (v, w), f in flow.items() if v == source), ZERO) - sum(
        (f for (v, w), f in flow.items() if w == source), ZERO
    )
    flow = {a: f for a, f in flow.items() if f}
    return value, flow, cut


def min_cut_value(n: int, capacities: Mapping[Arc, Fraction], source: int,
                  sink: int) -> tuple[Fraction, set[int]]:
    value, _, cut = max_flow(n, capacities, source, sink)
    return value, cut


def construct_bidirected_balance_flow(
    graph: Graph,
    u: Mapping[Edge, Fraction],
    b: Mapping[int, Fraction],
) -> tuple[dict[Arc, Fraction] | None, set[int] | None]:
    """Find arc values with divergence ``b`` under shared edge capacities ``u``.

    Seeks ``f >= 0`` on both orientations of every edge such that
    ``f(out(v)) - f(in(v)) = b(v)`` for all vertices and
    ``f(v,w) + f(w,v) <= u({v,w})`` per edge.  Such a flow exists iff
    ``u(delta(X)) >= b(X)`` for every vertex set X (given ``sum(b) == 0``).
    Returns ``(flow, None)`` on success — with at most one orientation of
    each edge used — or ``(None, X)`` with a violating set as witness.
    """
    total = sum((b.get(v, ZERO) for v in graph.vertices()), ZERO)
    if total != 0:
        raise ValueError("divergences must sum to zero")
    n = graph.n
    src, snk = n, n + 1
    caps: dict[Arc, Fraction] = {}
    for v, w in graph.edges():
        c = u.get((v, w), ZERO)
        if c < 0:
            raise ValueError(f"negative capacity on edge {(v, w)}")
        if c:
            caps[(v, w)] = c
            caps[(w, v)] = c
    need = ZERO
    for v in graph.vertices():
        bv = b.get(v, ZERO)
        if bv > 0:
            caps[(src, v)] = bv
            need += bv
        elif bv < 0:
            caps[(v, snk)] = -bv
    value, flow, cut = max_flow(n + 2, caps, src, snk)
    if value < need:
        witness = {v for v in cut if v < n}
        return None, witness
    out: dict[Arc, Fraction] = {}
    for v, w in graph.edges():
        net = flow.get((v, w), ZERO) - flow.get((w, v), ZERO)
        if net > 0:
            out[(v, w)] = net
        elif net < 0:
            out[(w, v)] = -net
    return out, None


def gale_condition_violation(
    graph: Graph, u: Mapping[Edge, Fraction], b: Mapping[int, Fraction]
) -> tuple[set[int], Fraction] | None:
    """Exhaustively find a set X with ``u(delta(X)) < b(X)``, if any.

    Brute force over all vertex subsets; intended for cross-checking the
    flow construction on graphs with at most ~12 vertices.
    """
    from itertools import combinations

    verts = list(graph.vertices())
    for size in range(1, len(verts) + 1):
        for sub in combinations(verts, size):
            inside = set(sub)
            boundary = sum(
                (u.get((v, w), ZERO) for v, w in graph.edges()
                 if (v in inside) != (w in inside)), ZERO,
            )
            bx = sum((b.get(v, ZERO) for v in inside), ZERO)
            if boundary < bx:
                return inside, bx - boundary
    return None


def divergence(n: int, flow: Mapping[Arc, Fraction]) -> list[Fraction]:
    """Per-vertex out-minus-in of an arc map."""
    div = [ZERO] * n
    for (v, w), f in flow.items():
        div[v] += f
        div[w] -= f
    return div
