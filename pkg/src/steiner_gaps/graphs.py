"""Small undirected graphs with exact rational edge costs.

Vertices are dense integers ``0..n-1``; an optional label table maps ids to
human-meaningful objects (lattice points, gadget roles, set-cover tuples).
Edges are stored as sorted ``(u, v)`` tuples with ``u < v`` and carry
non-negative :class:`~fractions.Fraction` costs.  Construction merges
parallel edges by keeping the cheapest copy and rejects self-loops, so every
graph is simple; all iteration orders are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence

Edge = tuple[int, int]
Arc = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    if u == v:
        raise ValueError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph with Fraction edge costs."""

    __slots__ = ("n", "_edges", "_cost", "_adj", "labels")

    def __init__(
        self,
        n: int,
        edge_costs: Mapping[Edge, Fraction] | Iterable[tuple[Edge, Fraction]] = (),
        labels: Mapping[int, Any] | None = None,
    ) -> None:
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        items = edge_costs.items() if isinstance(edge_costs, Mapping) else edge_costs
        cost: dict[Edge, Fraction] = {}
        for (u, v), c in items:
            e = edge_key(u, v)
            if not (0 <= e[0] and e[1] < n):
                raise ValueError(f"edge {e} outside vertex range 0..{n - 1}")
            c = Fraction(c)
            if c < 0:
                raise ValueError(f"negative cost on edge {e}")
            if e in cost:
                cost[e] = min(cost[e], c)
            else:
                cost[e] = c
        self._edges: list[Edge] = sorted(cost)
        self._cost = cost
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self._edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = [sorted(nbrs) for nbrs in adj]
        self.labels = dict(labels) if labels else {}

    # -- basic accessors -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self._edges)

    def edges(self) -> list[Edge]:
        return list(self._edges)

    def arcs(self) -> list[Arc]:
        """Both orientations of every edge, lexicographically sorted."""
        out: list[Arc] = []
        for u, v in self._edges:
            out.append((u, v))
            out.append((v, u))
        return sorted(out)

    def cost(self, u: int, v: int | None = None) -> Fraction:
        e = edge_key(*u) if v is None else edge_key(u, v)
        return self._cost[e]

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self._cost

    def neighbors(self, v: int) -> list[int]:
        return list(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def delta(self, v: int) -> list[Edge]:
        """Edges incident to ``v``."""
        return [edge_key(v, w) for w in self._adj[v]]

    def vertices(self) -> range:
        return range(self.n)

    def total_cost(self, edges: Iterable[Edge] | None = None) -> Fraction:
        chosen = self._edges if edges is None else edges
        return sum((self._cost[edge_key(*e)] for e in chosen), Fraction(0))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Graph(n={self.n}, m={self.m})"

    # -- connectivity ----------------------------------------------------

    def components(self, edges: Iterable[Edge] | None = None) -> list[list[int]]:
        adj: list[list[int]]
        if edges is None:
            adj = self._adj
        else:
            adj = [[] for _ in range(self.n)]
            for u, v in edges:
                adj[u].append(v)
                adj[v].append(u)
        seen = [False] * self.n
        comps: list[list[int]] = []
        for start in range(self.n):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            comp = []
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def connects(self, vertices: Sequence[int]) -> bool:
        """Do all given vertices lie in one connected component?"""
        if not vertices:
            return True
        targets = set(vertices)
        for comp in self.components():
            if targets & set(comp):
                return targets <= set(comp)
        return False

    # -- derived graphs --------------------------------------------------

    def induced(self, vertices: Sequence[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph; returns (graph, old-id list indexed by new id)."""
        old_ids = sorted(set(vertices))
        new_of = {old: new for new, old in enumerate(old_ids)}
        edges = {}
        for u, v in self._edges:
            if u in new_of and v in new_of:
                edges[(new_of[u], new_of[v])] = self._cost[(u, v)]
        labels = {new_of[o]: self.labels[o] for o in old_ids if o in self.labels}
        return Graph(len(old_ids), edges, labels), old_ids

    def contracted(self, merge_to: Mapping[int, int]) -> tuple["Graph", list[int]]:
        """Contract vertices onto representatives given by ``merge_to``.

        Vertices absent from the mapping keep their identity.  Parallel
        edges arising from the contraction are merged (cheapest copy);
        resulting self-loops are dropped.  Returns (graph, old-id list of
        representatives indexed by new id).
        """
        rep = [merge_to.get(v, v) for v in range(self.n)]
        kept = sorted(set(rep))
        new_of = {old: new for new, old in enumerate(kept)}
        edges: dict[Edge, Fraction] = {}
        for u, v in self._edges:
            ru, rv = rep[u], rep[v]
            if ru == rv:
                continue
            e = edge_key(new_of[ru], new_of[rv])
            c = self._cost[(u, v)]
            edges[e] = min(edges[e], c) if e in edges else c
        labels = {new_of[o]: self.labels[o] for o in kept if o in self.labels}
        return Graph(len(kept), edges, labels), kept


@dataclass(frozen=True)
class SteinerInstance:
    """A graph, a set of required vertices, and a display name."""

    graph: Graph
    required: tuple[int, ...]
    name: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        req = tuple(sorted(set(self.required)))
        if not req:
            raise ValueError("at least one required vertex is needed")
        if req[0] < 0 or req[-1] >= self.graph.n:
            raise ValueError("required vertex outside graph")
        object.__setattr__(self, "required", req)

    @property
    def steiner_vertices(self) -> tuple[int, ...]:
        req = set(self.required)
        return tuple(v for v in self.graph.vertices() if v not in req)

    def is_required(self, v: int) -> bool:
        return v in set(self.required)

    def label(self, v: int) -> Any:
        return self.graph.labels.get(v, v)


def tree_edges_valid(graph: Graph, edges: Sequence[Edge], required: Sequence[int]) -> bool:
    """Is ``edges`` an acyclic connected subgraph spanning all of ``required``?"""
    edges = [edge_key(*e) for e in edges]
    if len(set(edges)) != len(edges):
        return False
    for e in edges:
        if e not in graph._cost:  # noqa: SLF001 - same-module access
            return False
    touched = sorted({v for e in edges for v in e} | set(required))
    if not edges:
        return len(set(required)) <= 1
    # acyclic + connected over touched vertices <=> |E| = |V| - 1 and connected
    parent = {v: v for v in touched}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    roots = {find(v) for v in touched}
    return len(roots) == 1
