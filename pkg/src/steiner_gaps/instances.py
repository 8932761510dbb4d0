"""Generators for the Steiner tree instance families studied here.

All generators are deterministic: vertices are created in a canonical sorted
label order, edge lists are sorted, and equal parameters produce identical
instances.  Vertex labels are lattice points (coordinate tuples), split-group
markers ``("R", i, point)``, or gadget roles ``("r",)/("s", i)/...``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

from .geometry import (
    Point,
    enumerate_simplex,
    iter_simplex,
    l1,
    level,
    support,
    unit,
)
from .graphs import Arc, Edge, Graph, SteinerInstance, edge_key

ONE = Fraction(1)


def bidirect(graph: Graph) -> list[Arc]:
    """Both orientations of every edge of ``graph``, sorted."""
    return graph.arcs()


def _build(labels: Sequence[Any], cost_by_label: dict, required_labels: Sequence[Any],
           name: str, params: dict) -> SteinerInstance:
    """Assemble a SteinerInstance from label-keyed edges (labels pre-sorted)."""
    index = {lab: i for i, lab in enumerate(labels)}
    edges = {edge_key(index[a], index[b]): Fraction(c) for (a, b), c in cost_by_label.items()}
    graph = Graph(len(labels), edges, labels=dict(enumerate(labels)))
    return SteinerInstance(graph, tuple(index[r] for r in required_labels), name, params)


# ---------------------------------------------------------------------------
# simplex instances
# ---------------------------------------------------------------------------

def gen_simplex_instance(d: int, s: int) -> SteinerInstance:
    """Unit-cost instance on two stacked simplex layers.

    Vertices are the integer points of Delta(d, s) together with the points
    of Delta(d, s+1) whose coordinates stay at most ``s``; points at L1
    distance 1 are joined by a cost-1 edge.  Required vertices are the d+1
    corners ``s * e_i``.
    """
    if d < 1 or s < 1:
        raise ValueError("d and s must be at least 1")
    bottoms = enumerate_simplex(d, s)
    tops = enumerate_simplex(d, s + 1, max_coord=s)
    labels = sorted(bottoms + tops)
    cost: dict[tuple[Point, Point], Fraction] = {}
    for w in tops:
        for i in support(w):
            v = tuple(x - (k == i) for k, x in enumerate(w))
            cost[(v, w)] = ONE
    corners = [unit(d, i, s) for i in range(d + 1)]
    return _build(labels, cost, corners, f"simplex-d{d}-s{s}", {"d": d, "s": s})


def gen_simplified_simplex_instance(d: int, s: int, delta: int) -> SteinerInstance:
    """Simplex instance with corner regions of radius ``delta`` contracted.

    Keeps the two-layer points whose coordinates are at most ``s - delta``
    (cost-1 edges at L1 distance 1) and adds back one vertex ``r_i`` per
    corner, joined by cost ``2*delta`` edges to the bottom-layer points with
    ``v_i = s - delta``.  Requires ``1 <= delta`` and ``2*delta <= s``.
    """
    _check_delta(d, s, delta)
    cap = s - delta
    bottoms = enumerate_simplex(d, s, max_coord=cap)
    tops = enumerate_simplex(d, s + 1, max_coord=cap)
    corners = [unit(d, i, s) for i in range(d + 1)]
    labels = sorted(bottoms + tops + corners)
    cost: dict[tuple[Point, Point], Fraction] = {}
    for w in tops:
        for i in support(w):
            v = tuple(x - (k == i) for k, x in enumerate(w))
            cost[(v, w)] = ONE
    fcost = Fraction(2 * delta)
    for v in bottoms:
        for i, x in enumerate(v):
            if x == cap:
                cost[(corners[i], v)] = fcost
    return _build(labels, cost, corners, f"simplified-d{d}-s{s}-delta{delta}",
                  {"d": d, "s": s, "delta": delta})


def gen_split_simplified_graph(d: int, s: int, delta: int) -> Graph:
    """Unit-cost graph splitting each contracted corner into its edge ends.

    In place of corner ``r_i`` this carries the group ``R_i`` of points of
    Delta(d, s+1) with ``v_i = s - delta + 1``, each labelled
    ``("R", i, point)`` and attached by a single cost-1 edge to ``point - e_i``.
    Contracting each group onto one vertex recovers the simplified instance's
    graph structure (with F-edge costs 1 instead of ``2*delta``).
    """
    _check_delta(d, s, delta)
    cap = s - delta
    bottoms = enumerate_simplex(d, s, max_coord=cap)
    tops = enumerate_simplex(d, s + 1, max_coord=cap)
    group_labels: list[tuple] = []
    attach: dict[tuple, Point] = {}
    for i in range(d + 1):
        for rest in iter_simplex(d - 1, delta):
            v = rest[:i] + (cap + 1,) + rest[i:]
            lab = ("R", i, v)
            group_labels.append(lab)
            attach[lab] = tuple(x - (k == i) for k, x in enumerate(v))
    labels = sorted(bottoms + tops) + sorted(group_labels)
    cost: dict[tuple, Fraction] = {}
    for w in tops:
        for i in support(w):
            v = tuple(x - (k == i) for k, x in enumerate(w))
            cost[(v, w)] = ONE
    for lab in group_labels:
        cost[(attach[lab], lab)] = ONE
    index = {lab: i for i, lab in enumerate(labels)}
    edges = {edge_key(index[a], index[b]): c for (a, b), c in cost.items()}
    return Graph(len(labels), edges, labels=dict(enumerate(labels)))


def split_groups(graph: Graph) -> list[list[int]]:
    """Group vertex ids of a split graph, indexed by corner direction."""
    groups: dict[int, list[int]] = {}
    for v, lab in graph.labels.items():
        if isinstance(lab, tuple) and len(lab) == 3 and lab[0] == "R":
            groups.setdefault(lab[1], []).append(v)
    return [sorted(groups[i]) for i in sorted(groups)]


def _check_delta(d: int, s: int, delta: int) -> None:
    if d < 1:
        raise ValueError("d must be at least 1")
    if delta < 1:
        raise ValueError("delta must be at least 1")
    if 2 * delta > s:
        raise ValueError("need 2*delta <= s")


# ---------------------------------------------------------------------------
# gadget instance with spine pairs
# ---------------------------------------------------------------------------

def gen_goemans_instance(d: int) -> SteinerInstance:
    """Gadget instance with root r, terminals s_1..s_d and pair gadgets.

    Spine: r-a_i and a_i-s_i at cost 2.  For each unordered pair {i, j}: a
    hub c_ij with cost-1 edges to a_i, a_j and to b_ij, plus cost-2 edges
    b_ij-s_i and b_ij-s_j.  Required vertices: r and all s_i.  The optimum
    tree costs 4d.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    order = {"r": 0, "s": 1, "a": 2, "b": 3, "c": 4}
    labels: list[tuple] = [("r",)]
    labels += [("s", i) for i in range(1, d + 1)]
    labels += [("a", i) for i in range(1, d + 1)]
    pairs = [(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1)]
    labels += [("b", i, j) for i, j in pairs]
    labels += [("c", i, j) for i, j in pairs]
    labels.sort(key=lambda lab: (order[lab[0]],) + lab[1:])
    cost: dict[tuple, Fraction] = {}
    two = Fraction(2)
    for i in range(1, d + 1):
        cost[(("r",), ("a", i))] = two
        cost[(("a", i), ("s", i))] = two
    for i, j in pairs:
        cost[(("a", i), ("c", i, j))] = ONE
        cost[(("a", j), ("c", i, j))] = ONE
        cost[(("c", i, j), ("b", i, j))] = ONE
        cost[(("b", i, j), ("s", i))] = two
        cost[(("b", i, j), ("s", j))] = two
    required = [("r",)] + [("s", i) for i in range(1, d + 1)]
    return _build(labels, cost, required, f"goemans-d{d}", {"d": d})


def goemans_minor_map(d: int) -> tuple[SteinerInstance, SteinerInstance, dict[int, int], dict[Edge, int]]:
    """Embed the gadget instance into simplex-d(d)-s2 with cost-2 edges subdivided.

    Returns ``(gadget, simplex, vertex_map, midpoint_map)`` where
    ``vertex_map`` sends each gadget vertex to a distinct simplex vertex and
    ``midpoint_map`` sends each cost-2 gadget edge to the simplex vertex
    subdividing its image path.  :func:`check_goemans_minor` validates the map.
    """
    gi = gen_goemans_instance(d)
    si = gen_simplex_instance(d, 2)
    si_index = {lab: v for v, lab in si.graph.labels.items()}

    def pt(*entries: tuple[int, int]) -> Point:
        p = [0] * (d + 1)
        for coord, value in entries:
            p[coord] += value
        return tuple(p)

    vmap_lab: dict[tuple, Point] = {("r",): pt((d, 2))}
    for i in range(1, d + 1):
        vmap_lab[("s", i)] = pt((i - 1, 2))
        vmap_lab[("a", i)] = pt((i - 1, 1), (d, 1))
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            vmap_lab[("b", i, j)] = pt((i - 1, 1), (j - 1, 1))
            vmap_lab[("c", i, j)] = pt((i - 1, 1), (j - 1, 1), (d, 1))
    gi_index = {lab: v for v, lab in gi.graph.labels.items()}
    vertex_map = {gi_index[lab]: si_index[p] for lab, p in vmap_lab.items()}

    mid_lab: dict[tuple[tuple, tuple], Point] = {}
    for i in range(1, d + 1):
        mid_lab[(("r",), ("a", i))] = pt((d, 2), (i - 1, 1))
        mid_lab[(("a", i), ("s", i))] = pt((i - 1, 2), (d, 1))
        for j in range(i + 1, d + 1):
            mid_lab[(("b", i, j), ("s", i))] = pt((i - 1, 2), (j - 1, 1))
            mid_lab[(("b", i, j), ("s", j))] = pt((j - 1, 2), (i - 1, 1))
    midpoint_map = {
        edge_key(gi_index[a], gi_index[b]): si_index[p] for (a, b), p in mid_lab.items()
    }
    return gi, si, vertex_map, midpoint_map


def check_goemans_minor(d: int) -> bool:
    """Verify the gadget instance embeds in simplex-d(d)-s2 cost-preservingly.

    Checks that branch vertices and cost-2 edge midpoints are pairwise
    distinct, that every cost-1 gadget edge maps to a simplex edge, that
    every cost-2 gadget edge maps to a 2-edge simplex path through its
    midpoint, and that required vertices map to required vertices.  Raises
    ``AssertionError`` with details on failure.
    """
    gi, si, vertex_map, midpoint_map = goemans_minor_map(d)
    used = list(vertex_map.values()) + list(midpoint_map.values())
    assert len(set(used)) == len(used), "minor map images collide"
    assert set(vertex_map) == set(range(gi.graph.n)), "unmapped gadget vertex"
    for u, v in gi.graph.edges():
        c = gi.graph.cost(u, v)
        iu, iv = vertex_map[u], vertex_map[v]
        if c == 1:
            assert si.graph.has_edge(iu, iv), f"missing unit image for {(u, v)}"
        else:
            assert c == 2, f"unexpected gadget cost {c}"
            m = midpoint_map[edge_key(u, v)]
            assert si.graph.has_edge(iu, m) and si.graph.has_edge(m, iv), (
                f"missing 2-path image for {(u, v)}"
            )
            assert si.graph.degree(m) == 2, "midpoint not suppressible"
    req_image = {vertex_map[r] for r in gi.required}
    assert req_image == set(si.required), "required vertices not preserved"
    return True


# ---------------------------------------------------------------------------
# level restriction
# ---------------------------------------------------------------------------

def gen_level_restricted(d: int, s: int, lmax: int) -> SteinerInstance:
    """Simplex instance with every edge above a support level removed.

    An edge's level is the larger of its endpoint levels (the level of a
    point is its non-zero coordinate count minus one).  Edges of level above
    ``lmax`` are dropped, then isolated non-required vertices are removed.
    Raises ``ValueError`` if the required vertices become disconnected.
    """
    if lmax < 1:
        raise ValueError("lmax must be at least 1")
    base = gen_simplex_instance(d, s)
    kept: dict[tuple[Point, Point], Fraction] = {}
    for u, v in base.graph.edges():
        lu, lv = base.graph.labels[u], base.graph.labels[v]
        if max(level(lu), level(lv)) <= lmax:
            kept[(lu, lv)] = base.graph.cost(u, v)
    required_labels = [base.graph.labels[r] for r in base.required]
    touched = {lab for pair in kept for lab in pair} | set(required_labels)
    labels = sorted(touched)
    inst = _build(labels, kept, required_labels, f"level-restricted-d{d}-s{s}-l{lmax}",
                  {"d": d, "s": s, "lmax": lmax})
    if not inst.graph.connects(inst.required):
        raise ValueError("level restriction disconnects the required vertices")
    return inst


# ---------------------------------------------------------------------------
# two-dimensional dual instances
# ---------------------------------------------------------------------------

def gen_multiway_dual(s: int, delta: int) -> SteinerInstance:
    """Planar dual of the 2-dimensional simplified instance, as a cut instance.

    With ``q = 2s - 3*delta + 1``, the vertices are the points of
    Delta(2, q) with coordinates at most ``s - delta`` plus the three
    required corners ``q * e_i``.  Interior points at L1 distance 2 are
    joined by an E-edge whose cost is ``2*delta`` when the two points share
    a zero coordinate (the image of a corner-region edge) and 1 otherwise;
    corner ``r_i`` is joined to every interior point with ``v_i = s - delta``
    by an F-edge costing ``2*delta`` when that point has a zero coordinate
    and 2 otherwise.  The minimum multiway cut separating the three corners
    costs ``4*s``.
    """
    _check_delta(2, s, delta)
    q = 2 * s - 3 * delta + 1
    cap = s - delta
    interior = enumerate_simplex(2, q, max_coord=cap)
    corners = [unit(2, i, q) for i in range(3)]
    labels = sorted(interior + corners)
    heavy = Fraction(2 * delta)
    cost: dict[tuple[Point, Point], Fraction] = {}
    for a in range(len(interior)):
        for b in range(a + 1, len(interior)):
            v, w = interior[a], interior[b]
            if l1(v, w) == 2:
                shared_zero = any(x == 0 and y == 0 for x, y in zip(v, w))
                cost[(v, w)] = heavy if shared_zero else ONE
    for v in interior:
        for i, x in enumerate(v):
            if x == cap:
                cost[(corners[i], v)] = heavy if 0 in v else Fraction(2)
    return _build(labels, cost, corners, f"dual-s{s}-delta{delta}",
                  {"s": s, "delta": delta, "q": q})


# ---------------------------------------------------------------------------
# label symmetries
# ---------------------------------------------------------------------------

def _swap_point(v: Point, a: int, b: int) -> Point:
    p = list(v)
    p[a], p[b] = p[b], p[a]
    return tuple(p)


def coordinate_swap_permutation(graph: Graph, a: int, b: int) -> list[int]:
    """Vertex permutation induced by swapping coordinates ``a`` and ``b``.

    Works on graphs whose labels are coordinate tuples or split-group
    markers ``("R", i, point)``.  Raises ``KeyError`` if the swap does not
    map the label set onto itself.
    """
    index: dict[Any, int] = {lab: v for v, lab in graph.labels.items()}
    perm = [0] * graph.n
    for v in graph.vertices():
        lab = graph.labels[v]
        if isinstance(lab, tuple) and lab and lab[0] == "R":
            _, i, point = lab
            i2 = b if i == a else (a if i == b else i)
            new: Any = ("R", i2, _swap_point(point, a, b))
        else:
            new = _swap_point(lab, a, b)
        perm[v] = index[new]
    return perm


def goemans_swap_permutation(graph: Graph, i: int, j: int) -> list[int]:
    """Vertex permutation of the gadget instance swapping directions i and j."""
    index = {lab: v for v, lab in graph.labels.items()}

    def sw(k: int) -> int:
        return j if k == i else (i if k == j else k)

    perm = [0] * graph.n
    for v in graph.vertices():
        lab = graph.labels[v]
        if lab[0] in ("b", "c"):
            x, y = sorted((sw(lab[1]), sw(lab[2])))
            new = (lab[0], x, y)
        elif lab[0] in ("s", "a"):
            new = (lab[0], sw(lab[1]))
        else:
            new = lab
        perm[v] = index[new]
    return perm
