"""Set-cover-based layered Steiner instances and their exact gap formulas.

A set cover instance induces a layered unit-cost Steiner instance: a root,
``p`` alternating layers of (word, set) vertices, and a terminal layer of
(word, element) vertices, with downward edges tracking set membership.  Its
exact Steiner tree optimum is a closed form in the minimum cover size, while
a uniform-frequency fractional solution built from the element frequencies
beats it, giving integrality-gap lower bounds that persist in the limit of
deep layerings.  The parity-set family over binary vectors supplies the
concrete instances: three sets of size two for the smallest case, and the
seven-set family whose limit bound is 36/31.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, Mapping, Sequence

from .graphs import Arc, Edge, SteinerInstance, edge_key
from .instances import _build
from .oracles import exact_set_cover
from .solutions import McfrSolution

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class SetCoverInstance:
    """A finite family of nonempty finite sets with its derived universe."""

    sets: tuple[frozenset, ...]

    def __post_init__(self) -> None:
        if not self.sets:
            raise ValueError("need at least one set")
        for s in self.sets:
            if not s:
                raise ValueError("sets must be nonempty")

    @property
    def universe(self) -> tuple:
        out: set = set()
        for s in self.sets:
            out |= s
        return tuple(sorted(out))

    def frequency(self, element: Any) -> int:
        f = sum(1 for s in self.sets if element in s)
        if f == 0:
            raise ValueError(f"{element!r} is not in the universe")
        return f

    @property
    def min_frequency(self) -> int:
        return min(self.frequency(e) for e in self.universe)

    @property
    def uniform_frequency(self) -> bool:
        freqs = {self.frequency(e) for e in self.universe}
        return len(freqs) == 1


def make_cover(sets: Iterable[Iterable]) -> SetCoverInstance:
    return SetCoverInstance(tuple(frozenset(s) for s in sets))


def cover_to_json(cover: SetCoverInstance) -> str:
    return json.dumps([sorted(s) for s in cover.sets])


def cover_from_json(text: str) -> SetCoverInstance:
    return make_cover(json.loads(text))


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def gen_skutella_family(n: int) -> SetCoverInstance:
    """The parity family: one set per nonzero binary vector ``x`` of length
    ``n``, containing the nonzero ``y`` with odd ``x . y``.

    Vectors are encoded as bitmask integers ``1 .. 2^n - 1``.  For ``n = 3``
    this gives seven sets of size four over a seven-element universe, every
    frequency four, and minimum cover size three.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    full = 1 << n
    sets = []
    for x in range(1, full):
        sets.append(frozenset(y for y in range(1, full)
                              if bin(x & y).count("1") % 2 == 1))
    return SetCoverInstance(tuple(sets))


def triangle_cover() -> SetCoverInstance:
    """The three-element family {{1,2},{1,3},{2,3}} (the ``n = 2`` parity
    family up to relabelling)."""
    return make_cover([{1, 2}, {1, 3}, {2, 3}])


# ---------------------------------------------------------------------------
# the layered Steiner instance
# ---------------------------------------------------------------------------

def gen_sci(cover: SetCoverInstance, p: int, extended: bool = False) -> SteinerInstance:
    """The layered unit-cost instance of depth ``p`` for a set cover family.

    Level 0 is the root; level ``i`` (``1 <= i <= p``) holds one vertex per
    (word of length ``i - 1`` over the universe, set index); level ``p + 1``
    one per (word of length ``p - 1``, element).  Edges go between
    consecutive levels: root to every level-1 vertex, then from ``(x, S)``
    to ``(x|e, S')`` for each ``e in S`` and every set ``S'``, and finally
    from ``(x, S)`` to ``(x, e)`` for each ``e in S``.  Required vertices
    are the root and the whole last level; ``extended`` instead attaches a
    pendant vertex to the root and makes it required in the root's place.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    universe = cover.universe
    root = (0, (), -1)
    labels: list[tuple] = [root]
    cost: dict[tuple[tuple, tuple], Fraction] = {}
    for i in range(1, p + 1):
        for word in product(universe, repeat=i - 1):
            for j in range(len(cover.sets)):
                labels.append((i, word, j))
    sinks = [(p + 1, word, e)
             for word in product(universe, repeat=p - 1) for e in universe]
    labels += sinks
    for j in range(len(cover.sets)):
        cost[(root, (1, (), j))] = ONE
    for i in range(1, p):
        for word in product(universe, repeat=i - 1):
            for j, s in enumerate(cover.sets):
                for e in sorted(s):
                    for j2 in range(len(cover.sets)):
                        cost[((i, word, j), (i + 1, word + (e,), j2))] = ONE
    for word in product(universe, repeat=p - 1):
        for j, s in enumerate(cover.sets):
            for e in sorted(s):
                cost[((p, word, j), (p + 1, word, e))] = ONE
    required: list[tuple] = [root] + sinks
    name = f"sci-p{p}"
    if extended:
        pendant = (-1, (), -1)
        labels.append(pendant)
        cost[(pendant, root)] = ONE
        required[0] = pendant
        name += "-extended"
    params = {"p": p, "sets": [sorted(s) for s in cover.sets], "extended": extended}
    return _build(sorted(labels), cost, required, name, params)


def equalize_frequency(cover: SetCoverInstance) -> SetCoverInstance:
    """Reduce every element's frequency to the family minimum.

    Each element keeps its first (by set index) min-frequency-many
    containing sets and is removed from the rest; emptied sets are dropped.
    The layered graph of the result is a subgraph of the original's, and
    the universe is unchanged.
    """
    fmin = cover.min_frequency
    keep: dict[Any, set[int]] = {}
    for e in cover.universe:
        owners = [j for j, s in enumerate(cover.sets) if e in s]
        keep[e] = set(owners[:fmin])
    new_sets = []
    for j, s in enumerate(cover.sets):
        trimmed = frozenset(e for e in s if j in keep[e])
        if trimmed:
            new_sets.append(trimmed)
    return SetCoverInstance(tuple(new_sets))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def sci_opt_formula(cover: SetCoverInstance, p: int, cover_size: int) -> Fraction:
    """Exact Steiner tree optimum of the layered instance:
    ``(1 + coverSize/(|U| - 1)) (|U|^p - 1) + 1``."""
    usize = len(cover.universe)
    if usize <= 1:
        raise ValueError("the formula needs at least two universe elements")
    return (1 + Fraction(cover_size, usize - 1)) * (usize ** p - 1) + 1


def sci_fractional_objective(cover: SetCoverInstance, p: int) -> Fraction:
    """Objective of the uniform-frequency fractional solution:
    ``|U|^p + (|S|/f) (|U|^p - 1)/(|U| - 1)``."""
    if not cover.uniform_frequency:
        raise ValueError("the fractional solution needs uniform frequencies")
    usize = len(cover.universe)
    if usize <= 1:
        raise ValueError("need at least two universe elements")
    f = cover.min_frequency
    return usize ** p + Fraction(len(cover.sets), f) * Fraction(usize ** p - 1, usize - 1)


def sci_fractional_solution(cover: SetCoverInstance, p: int, extended: bool = False,
                            ) -> tuple[SteinerInstance, McfrSolution]:
    """The explicit fractional solution on the frequency-equalized instance.

    Returns the layered instance of ``equalize_frequency(cover)`` together
    with a multicommodity solution that is plus-feasible: boundary downward
    edges at ``1/f``, middle downward edges at ``1/f^2``, upward arcs zero,
    and each terminal's unit routed along its word's membership-consistent
    downward arcs.  The objective is :func:`sci_fractional_objective` of the
    equalized family (plus one for the extended pendant edge).
    """
    eq = equalize_frequency(cover)
    inst = gen_sci(eq, p, extended=extended)
    g = inst.graph
    index = {lab: v for v, lab in g.labels.items()}
    f = Fraction(eq.min_frequency)
    inv_f, inv_f2 = 1 / f, 1 / f ** 2

    arcs = [a for e in g.edges() for a in (e, (e[1], e[0]))]
    u: dict[Edge, Fraction] = {}
    froot: dict[Arc, Fraction] = {a: ZERO for a in arcs}
    for v, w in g.edges():
        la, lb = g.labels[v], g.labels[w]
        lo, hi = (v, w) if la[0] < lb[0] else (w, v)
        lo_level = min(la[0], lb[0])
        if lo_level == -1:
            val = ONE
        elif lo_level == 0 or lo_level == p:
            val = inv_f
        else:
            val = inv_f2
        u[edge_key(v, w)] = val
        froot[(lo, hi)] = val

    root_lab = (-1, (), -1) if extended else (0, (), -1)
    root = index[root_lab]
    gmap: dict[int, dict[Arc, Fraction]] = {}
    for sink in inst.required:
        if sink == root:
            continue
        _, word, e = g.labels[sink]
        full_word = word + (e,)
        gs = {a: ZERO for a in arcs}
        if extended:
            gs[(root, index[(0, (), -1)])] = ONE
        for j, s in enumerate(eq.sets):
            if full_word[0] in s:
                gs[(index[(0, (), -1)], index[(1, (), j)])] = inv_f
        for i in range(1, p):
            prefix, nxt = full_word[:i - 1], full_word[i - 1]
            for j, s in enumerate(eq.sets):
                if nxt not in s:
                    continue
                for j2, s2 in enumerate(eq.sets):
                    if full_word[i] in s2:
                        gs[(index[(i, prefix, j)],
                            index[(i + 1, full_word[:i], j2)])] = inv_f2
        prefix, last = full_word[:p - 1], full_word[p - 1]
        for j, s in enumerate(eq.sets):
            if last in s:
                gs[(index[(p, prefix, j)], sink)] = inv_f
        gmap[sink] = gs
    return inst, McfrSolution(root=root, u=u, f=froot, g=gmap)


def sci_gap_bound(cover: SetCoverInstance, p: int) -> Fraction:
    """Integrality-gap lower bound of the depth-``p`` instance: the exact
    optimum over the fractional bound, both in closed form."""
    opt_cover = int(exact_set_cover(cover.sets).optimum)
    usize = len(cover.universe)
    frac = (1 + Fraction(len(cover.sets), cover.min_frequency) / (usize - 1)) \
        * (usize ** p - 1) + 1
    return sci_opt_formula(cover, p, opt_cover) / frac


def sci_gap_limit(cover: SetCoverInstance) -> Fraction:
    """Limit of :func:`sci_gap_bound` in the depth:
    ``(|U| - 1 + |I|) / (|U| - 1 + |S|/min f)``."""
    opt_cover = int(exact_set_cover(cover.sets).optimum)
    usize = len(cover.universe)
    return Fraction(usize - 1 + opt_cover) / \
        (usize - 1 + Fraction(len(cover.sets), cover.min_frequency))
