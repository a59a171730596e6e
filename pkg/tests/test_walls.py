import random
from fractions import Fraction as F

import pytest

from oracles import brute_crossed_hyperplanes, random_rational_point
from vgit.lincore import CapExceeded, Linearization, OnWallError, is_generic
from vgit.walls import (
    Wall,
    enumerate_walls,
    exclusive_witness,
    lies_only_on,
    same_chamber,
    segment_scan,
    side_points,
    signature,
    symmetric_slice_walls,
    wall_classes,
    wall_witness,
)
from vgit.lincore import phi

EPS = F(1, 1000)


def sym(d, n, gamma):
    return Linearization.symmetric(d, n, F(gamma))


def I(k):
    return frozenset(range(1, k + 1))


# -- Wall ----------------------------------------------------------------------


def test_wall_canonical_form_identifies_complements():
    a = Wall.make(range(8, 20), 3, 5, 19)
    b = Wall.make(range(1, 8), 1, 5, 19)
    assert a == b and a.subset == I(7) and a.k == 1
    assert a.level_of(range(8, 20)) == 3


def test_wall_rejects_bad_input():
    with pytest.raises(ValueError):
        Wall.make(range(1, 5), 0, 2, 4)  # I must be proper
    with pytest.raises(ValueError):
        Wall.make([1, 2], 2, 2, 4)  # k outside [0, d-1]


# -- enumeration -----------------------------------------------------------------


def test_degree_one_four_points_has_three_pair_walls():
    walls = enumerate_walls(1, 4)
    assert len(walls) == 3
    assert all(len(w.subset) == 2 and w.k == 0 for w in walls)


def test_no_complement_duplicates():
    for d, n in ((1, 5), (2, 5), (3, 6), (4, 7)):
        walls = enumerate_walls(d, n)
        keys = {(w.subset, w.k) for w in walls}
        assert len(keys) == len(walls)
        for w in walls:
            assert 1 in w.subset


def test_every_wall_has_an_interior_witness():
    for d, n in ((1, 4), (2, 5), (3, 6)):
        for w in enumerate_walls(d, n):
            L = wall_witness(w)
            assert L.is_interior
            assert phi(w.subset, L) == w.k


@pytest.mark.parametrize("d,n", [(1, 4), (1, 5), (2, 5), (3, 5)])
def test_enumeration_matches_random_segment_oracle(d, n):
    rng = random.Random(20 * d + n)
    emitted = {(w.subset, w.k) for w in enumerate_walls(d, n)}
    found = set()
    points = []
    while len(points) < 300:
        p = random_rational_point(d, n, rng)
        if p is not None:
            points.append(p)
    for a, b in zip(points, points[1:]):
        found |= brute_crossed_hyperplanes(d, a[0], a[1], b[0], b[1])
    assert found <= emitted
    assert found == emitted


def test_large_n_refused_without_cap():
    with pytest.raises(CapExceeded):
        enumerate_walls(5, 21)
    assert wall_classes(5, 21)


def test_wall_classes_cover_enumeration():
    sizes = {(s, k) for s, k, _ in wall_classes(3, 6)}
    for w in enumerate_walls(3, 6):
        assert (len(w.subset), w.k) in sizes


# -- symmetric slice -------------------------------------------------------------


def test_symmetric_slice_nine_nine():
    gammas = [g for g, _ in symmetric_slice_walls(9, 9)]
    for label in (F(2, 7), F(1, 2), F(11, 16), F(7, 8), F(31, 32)):
        assert label in gammas
    assert F(13, 14) in gammas and F(22, 23) in gammas
    assert all(g > F(1, 8) for g in gammas)


def test_symmetric_slice_needs_degree_two():
    with pytest.raises(ValueError):
        symmetric_slice_walls(1, 5)


# -- signatures and chambers ---------------------------------------------------------


def test_signature_of_flip_side_by_cardinality():
    sig = signature(sym(5, 19, F(4, 9) + EPS))
    assert sig.symmetric
    assert list(sig.by_size) == [0] * 4 + [1] * 3 + [2] * 2 + [3] * 2 + [4] * 3 + [5] * 4


def test_signature_complement_half_is_implied():
    L = Linearization(2, 5, F(3, 5), (F(1, 2), F(57, 100), F(71, 100), F(52, 100), F(1, 10)))
    assert is_generic(L)
    sig = signature(L)
    for s, value in sig.expanded().items():
        rest = frozenset(range(1, 6)) - s
        assert sig.sigma(rest) == 2 - value


def test_signature_refuses_points_on_walls():
    with pytest.raises(OnWallError) as info:
        signature(sym(5, 19, F(4, 9)))
    assert info.value.hyperplanes


def test_same_chamber_examples():
    L = sym(9, 9, F(3, 10))
    assert same_chamber(L, L)
    assert same_chamber(L, sym(9, 9, F(9, 20)))
    assert not same_chamber(L, sym(9, 9, F(3, 5)))


def test_same_chamber_agrees_with_empty_scan():
    rng = random.Random(3)
    checked = 0
    while checked < 40:
        a, b = random_rational_point(2, 6, rng, 97), random_rational_point(2, 6, rng, 97)
        if a is None or b is None:
            continue
        A, B = Linearization(2, 6, a[0], tuple(a[1])), Linearization(2, 6, b[0], tuple(b[1]))
        if not (is_generic(A) and is_generic(B)):
            continue
        assert same_chamber(A, B) == (segment_scan(A, B) == [])
        checked += 1


# -- segment scans -----------------------------------------------------------------


def test_scan_of_a_point_is_empty():
    L = sym(9, 9, F(2, 5))
    assert segment_scan(L, L) == []


def test_scan_slice_from_three_tenths():
    crossings = segment_scan(sym(9, 9, F(3, 10)), sym(9, 9, F(999, 1000)))
    gammas = [c.gamma for c in crossings]
    assert gammas == sorted(gammas)
    for label in (F(1, 2), F(11, 16), F(7, 8), F(31, 32)):
        assert label in gammas
    assert not any(F(2, 7) < g < F(1, 2) for g in gammas)


def test_scan_near_two_sevenths():
    assert segment_scan(sym(9, 9, F(29, 100)), sym(9, 9, F(3, 10))) == []
    hits = segment_scan(sym(9, 9, F(27, 100)), sym(9, 9, F(3, 10)))
    assert [c.gamma for c in hits] == [F(2, 7)]


def test_scan_across_the_flip_wall():
    hits = segment_scan(sym(5, 19, F(4, 9) - F(1, 100)), sym(5, 19, F(4, 9) + F(1, 100)))
    assert len(hits) == 1
    assert hits[0].gamma == F(4, 9)
    assert hits[0].walls == (Wall(I(7), 1, 5, 19),)


def test_scan_reversal_reverses_order():
    a, b = sym(9, 9, F(3, 10)), sym(9, 9, F(999, 1000))
    forward = segment_scan(a, b)
    backward = segment_scan(b, a)
    assert [c.gamma for c in forward] == [c.gamma for c in reversed(backward)]
    assert [c.t for c in forward] == [1 - c.t for c in reversed(backward)]


def test_scan_rejects_wall_endpoints():
    with pytest.raises(OnWallError):
        segment_scan(sym(9, 9, F(1, 2)), sym(9, 9, F(3, 5)))


def test_scan_matches_brute_hyperplanes_on_random_segments():
    rng = random.Random(11)
    done = 0
    while done < 30:
        a, b = random_rational_point(3, 6, rng), random_rational_point(3, 6, rng)
        if a is None or b is None:
            continue
        A, B = Linearization(3, 6, a[0], tuple(a[1])), Linearization(3, 6, b[0], tuple(b[1]))
        if not (is_generic(A) and is_generic(B)):
            continue
        emitted = {(w.subset, w.k) for c in segment_scan(A, B) for w in c.walls}
        assert emitted == brute_crossed_hyperplanes(3, a[0], a[1], b[0], b[1])
        done += 1


# -- points on one wall ------------------------------------------------------------


def test_exclusive_witness_and_sides():
    wall = Wall(I(7), 1, 5, 19)
    base = sym(5, 19, F(4, 9))
    assert not lies_only_on(base, wall)
    L = exclusive_witness(wall, base)
    assert lies_only_on(L, wall)
    minus, plus = side_points(wall, L)
    assert phi(wall.subset, minus) < 1 < phi(wall.subset, plus)
    assert is_generic(minus) and is_generic(plus)


def test_side_points_refuse_off_wall_input():
    wall = Wall(I(7), 1, 5, 19)
    with pytest.raises(OnWallError):
        side_points(wall, sym(5, 19, F(4, 9) + EPS))
