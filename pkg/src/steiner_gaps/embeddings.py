"""Geometric dual certificates: simplex embeddings and multiway-cut embeddings.

A simplex embedding maps every vertex to a nonnegative vector, requiring the
L1 distance across each edge to stay within the edge cost.  With all
vertices on the coordinate simplex of a declared size it lower-bounds the
bidirected cut relaxation; allowing Steiner vertices above the simplex
lower-bounds the plus-strengthened relaxation.  Feasible embeddings
therefore serve as exact dual certificates for solver optima — no
maximization over embeddings is performed here.

For three terminals, an embedding into the unit simplex with terminals
pinned to its corners gives the standard multiway-cut relaxation objective
(half the L1 edge lengths, weighted by cost).  The canonically scaled
lattice embedding of the two-dimensional dual instances evaluates to the
same closed-form cost as the primal construction, which yields the known
worst-case gap formula for that relaxation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .graphs import SteinerInstance
from .instances import gen_multiway_dual

ZERO = Fraction(0)
ONE = Fraction(1)

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class SimplexEmbedding:
    """Vertex coordinates plus the declared simplex size.

    Feasibility against an instance is checked by :func:`se_errors` /
    :func:`verify_se`, not at construction.
    """

    y: Mapping[int, Vector]
    size: Fraction


def _l1(a: Vector, b: Vector) -> Fraction:
    return sum((abs(x - z) for x, z in zip(a, b)), ZERO)


def _dimension_of(inst: SteinerInstance) -> dict[int, int]:
    """Terminal -> coordinate index, in required-vertex order."""
    return {r: i for i, r in enumerate(inst.required)}


def se_errors(inst: SteinerInstance, emb: SimplexEmbedding, above: bool) -> list[str]:
    """All violations of the embedding constraints.

    Every vertex needs ``|R|`` nonnegative coordinates; each edge's L1
    stretch must not exceed its cost; coordinate sums must equal the
    declared size — for every vertex when ``above`` is false, and for
    required vertices only (Steiner sums at least the size) when true.
    """
    g = inst.graph
    dim = len(inst.required)
    errors: list[str] = []
    if set(emb.y) != set(g.vertices()):
        errors.append("embedding does not cover the vertex set exactly")
        return errors
    for v, vec in emb.y.items():
        if len(vec) != dim:
            errors.append(f"vertex {v}: {len(vec)} coordinates, expected {dim}")
            return errors
        if any(x < 0 for x in vec):
            errors.append(f"vertex {v}: negative coordinate in {vec}")
    req = set(inst.required)
    for v, vec in emb.y.items():
        total = sum(vec, ZERO)
        if v in req or not above:
            if total != emb.size:
                errors.append(f"vertex {v}: coordinate sum {total} != size {emb.size}")
        elif total < emb.size:
            errors.append(f"vertex {v}: coordinate sum {total} below size {emb.size}")
    for v, w in g.edges():
        stretch = _l1(emb.y[v], emb.y[w])
        if stretch > g.cost(v, w):
            errors.append(f"edge {(v, w)}: stretch {stretch} > cost {g.cost(v, w)}")
    return errors


def verify_se(inst: SteinerInstance, emb: SimplexEmbedding, above: bool) -> bool:
    """True when the embedding is feasible (above-variant if ``above``)."""
    return not se_errors(inst, emb, above)


def se_objective(inst: SteinerInstance, emb: SimplexEmbedding) -> Fraction:
    """``2 (sum_i y(r_i)_i - size)`` with terminals matched to coordinates
    in required-vertex order."""
    dims = _dimension_of(inst)
    total = sum((emb.y[r][i] for r, i in dims.items()), ZERO)
    return 2 * (total - emb.size)


def _corner_order(inst: SteinerInstance) -> list[int]:
    """Label coordinate that is maximal for each terminal, in terminal order.

    Terminals are matched to embedding dimensions by their position in
    ``inst.required``, so point-labelled instances must permute label
    coordinates to put each terminal's dominant coordinate in its own
    dimension.  Requires pairwise distinct dominant coordinates.
    """
    order: list[int] = []
    for r in inst.required:
        pt = inst.graph.labels[r]
        if not (isinstance(pt, tuple) and all(isinstance(x, int) for x in pt)):
            raise ValueError(f"terminal {r} has non-point label {pt!r}")
        order.append(max(range(len(pt)), key=pt.__getitem__))
    if len(set(order)) != len(order):
        raise ValueError("terminal labels do not have distinct dominant coordinates")
    return order


def canonical_simplex_embedding(inst: SteinerInstance) -> SimplexEmbedding:
    """The identity embedding of a lattice-labelled instance.

    Every vertex keeps its own label coordinates, permuted so that terminal
    ``i`` is dominant in dimension ``i``; the declared size is the
    terminals' coordinate sum.  For the simplex families this is feasible
    for the above-variant with objective ``2 s d``.
    """
    labels = inst.graph.labels
    order = _corner_order(inst)
    y: dict[int, Vector] = {}
    for v in inst.graph.vertices():
        pt = labels[v]
        if not (isinstance(pt, tuple) and all(isinstance(x, int) for x in pt)):
            raise ValueError(f"vertex {v} has non-point label {pt!r}")
        if len(pt) != len(order):
            raise ValueError(f"vertex {v}: point {pt} has {len(pt)} coordinates, "
                             f"expected {len(order)}")
        y[v] = tuple(Fraction(pt[c]) for c in order)
    size = sum(y[inst.required[0]], ZERO)
    return SimplexEmbedding(y=y, size=size)


def scale_embedding(emb: SimplexEmbedding, factor: Fraction) -> SimplexEmbedding:
    """Scale all coordinates and the size; preserves feasibility for
    nonnegative factors at most one by L1 homogeneity."""
    return SimplexEmbedding(
        y={v: tuple(factor * x for x in vec) for v, vec in emb.y.items()},
        size=factor * emb.size)


# ---------------------------------------------------------------------------
# multiway-cut embeddings (three terminals)
# ---------------------------------------------------------------------------

def ckr_objective(inst: SteinerInstance, x: Mapping[int, Vector]) -> Fraction:
    """Relaxation value ``sum_e c(e) ||x(u) - x(v)||_1 / 2`` of a unit-simplex
    embedding with each of the three terminals at its own corner.

    Raises ``ValueError`` when the instance does not have exactly three
    terminals, a coordinate is negative, a vertex is off the unit simplex,
    or a terminal misses its corner.
    """
    if len(inst.required) != 3:
        raise ValueError(f"multiway-cut embedding needs 3 terminals, got {len(inst.required)}")
    g = inst.graph
    if set(x) != set(g.vertices()):
        raise ValueError("embedding does not cover the vertex set exactly")
    for v, vec in x.items():
        if len(vec) != 3 or any(c < 0 for c in vec) or sum(vec, ZERO) != 1:
            raise ValueError(f"vertex {v}: {vec} is not on the unit simplex")
    for i, r in enumerate(inst.required):
        if x[r][i] != 1:
            raise ValueError(f"terminal {r} is not at corner {i}: {x[r]}")
    return sum((g.cost(v, w) * _l1(x[v], x[w]) / 2 for v, w in g.edges()), ZERO)


def ckr_labeling_embedding(inst: SteinerInstance,
                           labeling: Mapping[int, int]) -> dict[int, Vector]:
    """The integral embedding of a class labeling (class i at corner i)."""
    corners = [tuple(ONE if j == i else ZERO for j in range(3)) for i in range(3)]
    return {v: corners[labeling[v]] for v in inst.graph.vertices()}


def ckr_canonical_for_dual(s: int, delta: int) -> tuple[SteinerInstance, dict[int, Vector]]:
    """The two-dimensional dual instance with its scaled lattice embedding.

    Every vertex label is a point of the discrete simplex of size
    ``q = 2s - 3 delta + 1``; dividing by ``q`` puts it on the unit simplex
    with the terminals at the corners.  Interior edges stretch to ``2/q``
    and terminal edges to ``2 (s - 2 delta + 1)/q``, so the halved terms
    reproduce the level capacities of the primal construction and the
    objective equals its closed-form cost.
    """
    inst = gen_multiway_dual(s, delta)
    q = 2 * s - 3 * delta + 1
    order = _corner_order(inst)
    x = {v: tuple(Fraction(inst.graph.labels[v][c], q) for c in order)
         for v in inst.graph.vertices()}
    return inst, x


def ckr_gap_formula(q: int) -> Fraction:
    """Worst-case three-terminal gap of the relaxation on the size-``q``
    lattice family, by residue of ``q`` modulo three."""
    if q < 1:
        raise ValueError("q must be at least 1")
    r = q % 3
    if r == 0:
        return Fraction(12 * q + 12, 11 * q + 12)
    if r == 1:
        return Fraction(12 * q, 11 * q + 1)
    return Fraction(12 * q * q, 11 * q * q + q - 1)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def embedding_to_json(emb: SimplexEmbedding) -> str:
    payload = {
        "size": str(emb.size),
        "y": {str(v): [str(x) for x in vec] for v, vec in emb.y.items()},
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def embedding_from_json(text: str) -> SimplexEmbedding:
    payload = json.loads(text)
    y = {int(v): tuple(Fraction(x) for x in vec)
         for v, vec in payload["y"].items()}
    return SimplexEmbedding(y=y, size=Fraction(payload["size"]))
