"""Discrete simplex geometry.

The instance families in this package live on the lattice simplex

    Delta(d, s) = { v in Z_{>=0}^(d+1) : sum_i v_i = s },

whose points we represent as plain ``(d+1)``-tuples of non-negative ints.
This module provides enumeration, the support/level statistics, closed-form
counting identities (with brute-force-checkable semantics), and the classic
stars-and-bars bijection between simplex points and ``d``-subsets.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Iterator

Point = tuple[int, ...]


def binom(n: int, k: int) -> int:
    """Binomial coefficient extended by 0 outside the usual range."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def iter_simplex(d: int, s: int, max_coord: int | None = None) -> Iterator[Point]:
    """Yield the points of Delta(d, s) in lexicographic order.

    With ``max_coord`` set, only points whose coordinates are all at most
    ``max_coord`` are produced.
    """
    if d < 0 or s < 0:
        raise ValueError("d and s must be non-negative")
    cap = s if max_coord is None else min(max_coord, s)

    def rec(prefix: list[int], remaining: int, positions: int) -> Iterator[Point]:
        if positions == 1:
            if remaining <= cap:
                yield tuple(prefix + [remaining])
            return
        for value in range(min(cap, remaining) + 1):
            prefix.append(value)
            yield from rec(prefix, remaining - value, positions - 1)
            prefix.pop()

    yield from rec([], s, d + 1)


def enumerate_simplex(d: int, s: int, max_coord: int | None = None) -> list[Point]:
    """List of Delta(d, s) points (optionally coordinate-bounded), lex order."""
    return list(iter_simplex(d, s, max_coord))


def support(v: Point) -> tuple[int, ...]:
    """Indices (0-based) of the non-zero coordinates."""
    return tuple(i for i, x in enumerate(v) if x)


def level(v: Point) -> int:
    """Number of non-zero coordinates minus one."""
    return len(support(v)) - 1


def l1(v: Point, w: Point) -> int:
    return sum(abs(a - b) for a, b in zip(v, w, strict=True))


def unit(d: int, i: int, scale: int = 1) -> Point:
    """The point ``scale * e_i`` of Delta(d, scale)."""
    p = [0] * (d + 1)
    p[i] = scale
    return tuple(p)


def count_simplex(d: int, s: int) -> int:
    """|Delta(d, s)| = C(d+s, d)."""
    return binom(d + s, d)


def count_radius(d: int, s: int, k: int) -> int:
    """Number of points of Delta(d, s) with all coordinates at most ``k``.

    Valid for 2k+1 >= s (then at most one coordinate can exceed ``k``, so a
    single inclusion-exclusion term suffices):

        C(d+s, d) - (d+1) * C(d+s-(k+1), d).
    """
    if 2 * k + 1 < s:
        raise ValueError("count_radius requires 2k+1 >= s")
    return binom(d + s, d) - (d + 1) * binom(d + s - (k + 1), d)


def count_radius_level(d: int, s: int, k: int, l: int) -> int:
    """Number of points of Delta(d, s) with max coordinate <= k and level l.

    Valid for 2k+1 >= s:

        C(d+1, l+1) * ( C(s-1, l) - (l+1) * C(s-1-k, l) ).
    """
    if 2 * k + 1 < s:
        raise ValueError("count_radius_level requires 2k+1 >= s")
    return binom(d + 1, l + 1) * (binom(s - 1, l) - (l + 1) * binom(s - 1 - k, l))


def point_to_subset(v: Point) -> tuple[int, ...]:
    """Stars-and-bars bijection Delta(d, s) -> d-subsets of {1, ..., d+s}.

    The point ``x`` maps to ``{ x_1 + ... + x_k + k : k = 1..d }`` (bar
    positions in the padded word of ``s`` stars and ``d`` bars).
    """
    d = len(v) - 1
    acc = 0
    out = []
    for k in range(d):
        acc += v[k]
        out.append(acc + k + 1)
    return tuple(out)


def subset_to_point(d: int, s: int, subset: Iterable[int]) -> Point:
    """Inverse of :func:`point_to_subset` for d-subsets of {1, ..., d+s}."""
    a = sorted(subset)
    if len(a) != d:
        raise ValueError(f"expected a {d}-subset")
    if a and not (1 <= a[0] and a[-1] <= d + s):
        raise ValueError(f"subset must lie inside {{1, ..., {d + s}}}")
    coords = []
    prev = 0
    for i, ai in enumerate(a, start=1):
        coords.append(ai - prev - 1)
        prev = ai
    coords.append(s + d - (a[-1] if a else 0))
    point = tuple(coords)
    if any(c < 0 for c in point) or sum(point) != s:
        raise ValueError("subset does not encode a simplex point")
    return point


def all_subsets(d: int, s: int) -> list[tuple[int, ...]]:
    """All d-subsets of {1, ..., d+s} (the codomain of the bijection)."""
    return [tuple(c) for c in combinations(range(1, d + s + 1), d)]
