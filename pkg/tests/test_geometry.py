"""Simplex lattice geometry: enumeration, counting identities, bijection."""

from itertools import product

import pytest

from steiner_gaps.geometry import (all_subsets, binom, count_radius,
                                   count_radius_level, count_simplex,
                                   enumerate_simplex, iter_simplex, l1, level,
                                   point_to_subset, subset_to_point, support,
                                   unit)


def brute_points(d, s, max_coord=None):
    cap = s if max_coord is None else max_coord
    return [p for p in product(range(cap + 1), repeat=d + 1) if sum(p) == s]


def test_binom_outside_range_is_zero():
    assert binom(3, 5) == 0
    assert binom(-1, 0) == 0
    assert binom(4, -1) == 0
    assert binom(5, 2) == 10


def test_enumerate_simplex_matches_brute_force():
    for d in range(5):
        for s in range(5):
            got = enumerate_simplex(d, s)
            assert got == brute_points(d, s)
            assert got == sorted(got)


def test_enumerate_simplex_max_coord():
    for d in range(4):
        for s in range(5):
            for cap in range(s + 2):
                assert enumerate_simplex(d, s, max_coord=cap) == \
                    brute_points(d, s, max_coord=cap)


def test_iter_simplex_rejects_negative():
    with pytest.raises(ValueError):
        list(iter_simplex(-1, 2))
    with pytest.raises(ValueError):
        list(iter_simplex(2, -1))


def test_support_level_l1_unit():
    assert support((0, 2, 0, 1)) == (1, 3)
    assert level((0, 2, 0, 1)) == 1
    assert level((5,)) == 0
    assert l1((2, 0, 0), (0, 2, 0)) == 4
    assert unit(2, 1, 3) == (0, 3, 0)


def test_count_simplex_exhaustive():
    for d in range(5):
        for s in range(7):
            assert count_simplex(d, s) == len(enumerate_simplex(d, s))


def test_count_radius_exhaustive():
    for d in range(1, 5):
        for s in range(1, 7):
            for k in range(s + 1):
                if 2 * k + 1 < s:
                    with pytest.raises(ValueError):
                        count_radius(d, s, k)
                    continue
                want = len([p for p in enumerate_simplex(d, s)
                            if max(p) <= k])
                assert count_radius(d, s, k) == want, (d, s, k)


def test_count_radius_level_exhaustive():
    for d in range(1, 5):
        for s in range(1, 7):
            for k in range(s + 1):
                if 2 * k + 1 < s:
                    with pytest.raises(ValueError):
                        count_radius_level(d, s, k, 0)
                    continue
                for lev in range(d + 1):
                    want = len([p for p in enumerate_simplex(d, s)
                                if max(p) <= k and level(p) == lev])
                    assert count_radius_level(d, s, k, lev) == want, \
                        (d, s, k, lev)


def test_bijection_round_trips_exhaustively():
    for d in range(1, 4):
        for s in range(1, 6):
            points = enumerate_simplex(d, s)
            subsets = all_subsets(d, s)
            image = [point_to_subset(p) for p in points]
            assert sorted(image) == sorted(subsets)
            for p in points:
                assert subset_to_point(d, s, point_to_subset(p)) == p
            for sub in subsets:
                assert point_to_subset(subset_to_point(d, s, sub)) == sub


def test_subset_to_point_rejects_bad_input():
    with pytest.raises(ValueError):
        subset_to_point(2, 2, (1,))  # wrong size
    with pytest.raises(ValueError):
        subset_to_point(2, 2, (1, 9))  # outside {1..d+s}
