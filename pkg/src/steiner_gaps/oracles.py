"""Exact reference solvers for small instances, used as ground truth.

Three NP-hard problems are solved exactly at desk scale: minimum Steiner
tree (dynamic programming over terminal subsets, with an independent
subset-enumeration cross-check), minimum multiway cut for three terminals
(labeling enumeration), and minimum-cardinality set cover (subset
enumeration by size).  Every result carries a feasible witness achieving
the reported optimum, and the tree solvers assert that equality before
returning, so a returned result is self-certifying.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Collection, Sequence

from .graphs import Edge, Graph, SteinerInstance, edge_key, tree_edges_valid

ZERO = Fraction(0)

DW_TERMINAL_LIMIT = 10
SUBSET_STEINER_LIMIT = 20
MULTIWAY_STEINER_LIMIT = 12
SET_COVER_LIMIT = 24


class SizeLimitExceeded(ValueError):
    """The instance is too large for exact enumeration."""


@dataclass(frozen=True)
class OracleResult:
    """An exact optimum together with a feasible witness achieving it."""

    optimum: Fraction
    witness: Any


# ---------------------------------------------------------------------------
# shortest paths
# ---------------------------------------------------------------------------

def _floyd_warshall(g: Graph) -> tuple[list[list[Fraction | None]], list[list[int]]]:
    n = g.n
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    nxt = [[-1] * n for _ in range(n)]
    for v in range(n):
        dist[v][v] = ZERO
        nxt[v][v] = v
    for v, w in g.edges():
        c = g.cost(v, w)
        if dist[v][w] is None or c < dist[v][w]:
            dist[v][w] = dist[w][v] = c
            nxt[v][w] = w
            nxt[w][v] = v
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik is None:
                continue
            di = dist[i]
            for j in range(n):
                dkj = dk[j]
                if dkj is None:
                    continue
                alt = dik + dkj
                if di[j] is None or alt < di[j]:
                    di[j] = alt
                    nxt[i][j] = nxt[i][k]
    return dist, nxt


def _path_edges(nxt: list[list[int]], a: int, b: int) -> list[Edge]:
    edges: list[Edge] = []
    while a != b:
        step = nxt[a][b]
        if step < 0:
            raise ValueError(f"no path between {a} and {b}")
        edges.append(edge_key(a, step))
        a = step
    return edges


def _prune_to_tree(g: Graph, edges: set[Edge], required: Sequence[int]) -> tuple[Edge, ...]:
    """Spanning tree of the used edges, with non-required leaves removed."""
    req = set(required)
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree: list[Edge] = []
    for e in sorted(edges, key=lambda e: (g.cost(*e), e)):
        ra, rb = find(e[0]), find(e[1])
        if ra != rb:
            parent[ra] = rb
            tree.append(e)
    if len({find(r) for r in req}) > 1:
        raise ValueError("collected edges do not connect the required vertices")
    adj: dict[int, set[int]] = {}
    for a, b in tree:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    kept = set(tree)
    leaves = [v for v, nb in adj.items() if len(nb) == 1 and v not in req]
    while leaves:
        v = leaves.pop()
        (w,) = adj[v]
        kept.discard(edge_key(v, w))
        adj[v].clear()
        adj[w].discard(v)
        if len(adj[w]) == 1 and w not in req:
            leaves.append(w)
    # Leaf pruning also consumes whole tree components that contain no
    # required vertex, so the kept edges all touch the required component.
    return tuple(sorted(kept))


# ---------------------------------------------------------------------------
# exact Steiner tree
# ---------------------------------------------------------------------------

def exact_steiner_tree(inst: SteinerInstance) -> OracleResult:
    """Exact minimum Steiner tree.

    Uses terminal-subset dynamic programming when the terminal count is at
    most ``DW_TERMINAL_LIMIT``, otherwise falls back to Steiner-vertex
    subset enumeration (at most ``SUBSET_STEINER_LIMIT`` Steiner vertices).
    The witness is an optimal tree whose leaves are all required, and its
    cost is asserted equal to the reported optimum.
    """
    if len(inst.required) <= DW_TERMINAL_LIMIT:
        return _steiner_tree_dp(inst)
    if len(inst.steiner_vertices) <= SUBSET_STEINER_LIMIT:
        return steiner_tree_by_subsets(inst)
    raise SizeLimitExceeded(
        f"{len(inst.required)} terminals and {len(inst.steiner_vertices)} "
        f"Steiner vertices exceed both solver limits")


def _steiner_tree_dp(inst: SteinerInstance) -> OracleResult:
    g = inst.graph
    req = list(inst.required)
    if len(req) <= 1:
        return OracleResult(ZERO, ())
    dist, nxt = _floyd_warshall(g)
    terms, goal = req[:-1], req[-1]
    m = len(terms)
    full = (1 << m) - 1
    # merged[mask][v]: best tree joining the mask's terminals at v before
    # the final shortest-path relaxation; value[mask][v] after it.
    value: list[list[Fraction | None]] = [[None] * g.n for _ in range(full + 1)]
    walk_from = [[-1] * g.n for _ in range(full + 1)]
    merge_at: list[list[int]] = [[-1] * g.n for _ in range(full + 1)]
    for i, t in enumerate(terms):
        for v in range(g.n):
            value[1 << i][v] = dist[t][v]
            walk_from[1 << i][v] = t
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        merged: list[Fraction | None] = [None] * g.n
        for v in range(g.n):
            sub = (mask - 1) & mask
            while sub:
                if sub & low:
                    a, b = value[sub][v], value[mask ^ sub][v]
                    if a is not None and b is not None:
                        cand = a + b
                        if merged[v] is None or cand < merged[v]:
                            merged[v] = cand
                            merge_at[mask][v] = sub
                sub = (sub - 1) & mask
        for v in range(g.n):
            best, arg = None, -1
            for w in range(g.n):
                mw = merged[w]
                if mw is None or dist[w][v] is None:
                    continue
                cand = mw + dist[w][v]
                if best is None or cand < best:
                    best, arg = cand, w
            value[mask][v] = best
            walk_from[mask][v] = arg
    opt = value[full][goal]
    if opt is None:
        raise ValueError("required vertices are not connected")

    edges: set[Edge] = set()

    def backtrack(mask: int, v: int) -> None:
        w = walk_from[mask][v]
        edges.update(_path_edges(nxt, w, v))
        if mask & (mask - 1):
            sub = merge_at[mask][w]
            backtrack(sub, w)
            backtrack(mask ^ sub, w)

    backtrack(full, goal)
    tree = _prune_to_tree(g, edges, req)
    cost = g.total_cost(tree)
    assert cost == opt and tree_edges_valid(g, tree, req), (
        f"reconstructed tree costs {cost}, optimum {opt}")
    return OracleResult(opt, tree)


def steiner_tree_by_subsets(inst: SteinerInstance) -> OracleResult:
    """Independent exact solver: try every Steiner-vertex subset, MST each."""
    g = inst.graph
    req = list(inst.required)
    if len(req) <= 1:
        return OracleResult(ZERO, ())
    steiner = list(inst.steiner_vertices)
    if len(steiner) > SUBSET_STEINER_LIMIT:
        raise SizeLimitExceeded(f"{len(steiner)} Steiner vertices > {SUBSET_STEINER_LIMIT}")
    sorted_edges = sorted(g.edges(), key=lambda e: (g.cost(*e), e))
    best: Fraction | None = None
    best_edges: tuple[Edge, ...] = ()
    for size in range(len(steiner) + 1):
        for extra in combinations(steiner, size):
            keep = set(req) | set(extra)
            parent = {v: v for v in keep}

            def find(x: int) -> int:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            cost, used, tree = ZERO, 0, []
            for e in sorted_edges:
                if e[0] not in keep or e[1] not in keep:
                    continue
                ra, rb = find(e[0]), find(e[1])
                if ra != rb:
                    parent[ra] = rb
                    cost += g.cost(*e)
                    used += 1
                    tree.append(e)
                    if best is not None and cost > best:
                        break
            if used == len(keep) - 1 and (best is None or cost < best):
                best = cost
                best_edges = tuple(sorted(tree))
    if best is None:
        raise ValueError("required vertices are not connected")
    tree = _prune_to_tree(g, set(best_edges), req)
    cost = g.total_cost(tree)
    # Pruning cannot beat the enumeration minimum (the pruned vertex set is
    # itself enumerated), so the costs must agree exactly.
    assert cost == best and tree_edges_valid(g, tree, req)
    return OracleResult(cost, tree)


def mst_two_approx(inst: SteinerInstance) -> OracleResult:
    """Metric-closure spanning tree heuristic (cost at most twice optimal).

    Computes a minimum spanning tree of the terminals under shortest-path
    distances, expands its edges into shortest paths, and prunes the union
    to a feasible tree.
    """
    g = inst.graph
    req = list(inst.required)
    if len(req) <= 1:
        return OracleResult(ZERO, ())
    dist, nxt = _floyd_warshall(g)
    in_tree = {req[0]}
    key: dict[int, tuple[Fraction, int]] = {}
    edges: set[Edge] = set()
    for t in req[1:]:
        if dist[req[0]][t] is None:
            raise ValueError("required vertices are not connected")
        key[t] = (dist[req[0]][t], req[0])
    while len(in_tree) < len(req):
        t = min(key, key=lambda v: key[v][0])
        d, anchor = key.pop(t)
        in_tree.add(t)
        edges.update(_path_edges(nxt, anchor, t))
        for v in key:
            if dist[t][v] < key[v][0]:
                key[v] = (dist[t][v], t)
    tree = _prune_to_tree(g, edges, req)
    return OracleResult(g.total_cost(tree), tree)


# ---------------------------------------------------------------------------
# exact multiway cut
# ---------------------------------------------------------------------------

def exact_multiway_cut(inst: SteinerInstance) -> OracleResult:
    """Exact minimum multiway cut separating three terminals.

    Enumerates all assignments of Steiner vertices to the three terminal
    classes; the cut consists of the edges whose endpoints get different
    classes.  Any assignment induces a feasible cut, and some optimal cut
    is induced by its connected-component classes, so the enumeration is
    exact.  The witness maps each vertex to a terminal class index; ties
    break to the lexicographically first assignment.
    """
    req = list(inst.required)
    if len(req) != 3:
        raise SizeLimitExceeded(f"multiway cut oracle needs 3 terminals, got {len(req)}")
    steiner = list(inst.steiner_vertices)
    if len(steiner) > MULTIWAY_STEINER_LIMIT:
        raise SizeLimitExceeded(f"{len(steiner)} Steiner vertices > {MULTIWAY_STEINER_LIMIT}")
    g = inst.graph
    label = {r: i for i, r in enumerate(req)}
    edge_list = [(v, w, g.cost(v, w)) for v, w in g.edges()]
    best: Fraction | None = None
    best_assign: tuple[int, ...] = ()
    for assign in product(range(3), repeat=len(steiner)):
        lab = dict(label)
        lab.update(zip(steiner, assign))
        cost = sum((c for v, w, c in edge_list if lab[v] != lab[w]), ZERO)
        if best is None or cost < best:
            best = cost
            best_assign = assign
    assert best is not None
    witness = dict(label)
    witness.update(zip(steiner, best_assign))
    return OracleResult(best, witness)


def multiway_cut_edges(inst: SteinerInstance, labeling: dict[int, int]) -> tuple[Edge, ...]:
    """The cut edge set induced by a class labeling."""
    g = inst.graph
    return tuple(e for e in g.edges() if labeling[e[0]] != labeling[e[1]])


# ---------------------------------------------------------------------------
# exact set cover
# ---------------------------------------------------------------------------

def exact_set_cover(sets: Sequence[Collection]) -> OracleResult:
    """Exact minimum-cardinality cover: smallest index tuple whose union is
    the universe, found by enumerating index subsets in size order."""
    if len(sets) > SET_COVER_LIMIT:
        raise SizeLimitExceeded(f"{len(sets)} sets > {SET_COVER_LIMIT}")
    universe: set = set()
    for s in sets:
        universe |= set(s)
    if not universe:
        return OracleResult(ZERO, ())
    for size in range(1, len(sets) + 1):
        for idx in combinations(range(len(sets)), size):
            covered: set = set()
            for i in idx:
                covered |= set(sets[i])
            if covered == universe:
                return OracleResult(Fraction(size), idx)
    raise ValueError("sets do not cover their own universe")
