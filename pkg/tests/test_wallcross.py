import random
from fractions import Fraction as F

import pytest

from oracles import brute_partition_exists, random_rational_point
from vgit.lincore import CapExceeded, Linearization, OnWallError, is_generic, sigma
from vgit.trees import FCurvePartition, fcurve_sigma_sum
from vgit.wallcross import (
    CrossingLabel,
    NoTailFactor,
    ProjectionUndefined,
    classify_crossing,
    classify_exterior,
    find_partition,
    gluing_data,
    projection_bijective,
    projection_target,
)
from vgit.walls import Wall, enumerate_walls, exclusive_witness, side_points, wall_witness

EPS = F(1, 1000)


def sym(d, n, gamma):
    return Linearization.symmetric(d, n, F(gamma))


def I(k):
    return frozenset(range(1, k + 1))


@pytest.fixture(scope="module")
def flip_report():
    wall = Wall(I(7), 1, 5, 19)
    L_wall = exclusive_witness(wall, sym(5, 19, F(4, 9)))
    return wall, L_wall, classify_crossing(wall, L_wall)


# -- partitions -----------------------------------------------------------------------


def test_find_partition_matches_set_partition_oracle():
    rng = random.Random(7)
    done = 0
    while done < 40:
        p = random_rational_point(2, 6, rng, 97)
        if p is None:
            continue
        L = Linearization(2, 6, p[0], tuple(p[1]))
        if not is_generic(L):
            continue
        marks = rng.sample(range(1, 7), rng.randint(3, 6))
        for target in range(0, 3):
            blocks = find_partition(marks, L, target)
            expected = brute_partition_exists(marks, lambda b: sigma(b, L), target)
            assert (blocks is not None) == expected
            if blocks is not None:
                assert len(blocks) >= 3
                assert frozenset().union(*blocks) == frozenset(marks)
                assert sum(len(b) for b in blocks) == len(marks)
                assert sum(sigma(b, L) for b in blocks) == target
        done += 1


def test_too_few_marks_have_no_partition():
    L = sym(5, 19, F(4, 9) + EPS)
    assert find_partition([1, 2], L, 0) is None


def test_partition_search_cap():
    weights = tuple(F(1, 2) + F(i, 10**4) for i in range(1, 21))
    last = 21 - 19 * F(1, 2) - sum(weights[:-1])
    L = Linearization(20, 20, F(1, 2), weights[:-1] + (last,))
    with pytest.raises(CapExceeded):
        find_partition(range(1, 21), L, 3, cap=1000)


# -- interior walls ---------------------------------------------------------------------


def test_flip_wall(flip_report):
    wall, _, report = flip_report
    assert report.label == CrossingLabel.FLIP
    assert not report.forward_divisorial and not report.backward_divisorial
    assert report.forward_contracts_curve and report.backward_contracts_curve
    assert sorted(map(len, report.forward_witness)) == [1, 1, 5]
    assert sorted(map(len, report.backward_witness)) == [1, 1, 10]
    assert all(b <= I(7) for b in report.forward_witness)
    assert all(not b & I(7) for b in report.backward_witness)


def test_flip_witnesses_are_contracted_fcurves(flip_report):
    wall, L_wall, _ = flip_report
    minus, plus = side_points(wall, L_wall)
    # the exclusive witness is off every other wall, so the blocks must be built around I_7
    small = FCurvePartition((frozenset(range(8, 18)), I(7), frozenset({18}), frozenset({19})))
    big = FCurvePartition((frozenset(range(8, 20)), I(5), frozenset({6}), frozenset({7})))
    # phi(I_7) grows as gamma shrinks, so the phi > 1 side is the gamma - eps side
    assert fcurve_sigma_sum(small, plus) == 5 > fcurve_sigma_sum(small, minus)
    assert fcurve_sigma_sum(big, minus) == 5 > fcurve_sigma_sum(big, plus)


def test_mirrored_report(flip_report):
    wall, L_wall, report = flip_report
    mirror = classify_crossing(wall, L_wall, presented=frozenset(range(8, 20)))
    assert mirror.k == 3
    assert mirror.forward_contracts_curve == report.backward_contracts_curve
    assert mirror.backward_contracts_curve == report.forward_contracts_curve
    assert mirror.label == CrossingLabel.FLIP
    assert report.mirrored() == mirror


def test_classify_refuses_points_on_several_walls():
    wall = Wall(I(7), 1, 5, 19)
    with pytest.raises(OnWallError):
        classify_crossing(wall, sym(5, 19, F(4, 9)))


@pytest.fixture(scope="module")
def reports_3_6():
    out = []
    for w in enumerate_walls(3, 6):
        L = exclusive_witness(w, wall_witness(w))
        out.append(classify_crossing(w, L))
    return out


def test_divisorial_rules_degree_three_six_points(reports_3_6):
    for r in reports_3_6:
        size = len(r.subset)
        assert r.forward_divisorial == (r.k == 0 and 3 <= size <= 4)
        assert r.backward_divisorial == (r.k == 2 and 2 <= size <= 3)
        if r.forward_divisorial:
            assert r.label == CrossingLabel.DIVISORIAL_FORWARD
        if r.label == CrossingLabel.FLIP:
            assert r.k not in (0, 2)
            assert not (r.forward_divisorial or r.backward_divisorial)


def test_reports_mirror_under_complement(reports_3_6):
    for r in reports_3_6:
        m = r.mirrored()
        assert m.mirrored() == r
        assert (m.forward_contracts_curve, m.backward_contracts_curve) == (
            r.backward_contracts_curve,
            r.forward_contracts_curve,
        )


def test_three_mark_level_zero_wall_is_divisorial(reports_3_6):
    found = [r for r in reports_3_6 if r.k == 0 and len(r.subset) == 3]
    assert found
    assert all(r.label == CrossingLabel.DIVISORIAL_FORWARD for r in found)


def test_pair_level_zero_wall_contracts_nothing_forward(reports_3_6):
    found = [r for r in reports_3_6 if r.k == 0 and len(r.subset) == 2]
    assert found
    assert not any(r.forward_contracts_curve for r in found)


def test_report_to_dict(flip_report):
    record = flip_report[2].to_dict()
    assert record["label"] == "Flip"
    assert record["subset"] == list(range(1, 8))


# -- projections ------------------------------------------------------------------------


def test_projection_target_parameters():
    L = Linearization(2, 5, F(3, 5), (F(99, 100), F(1, 2), F(57, 100), F(3, 10), F(4, 100)))
    assert L.is_interior
    target = projection_target(L, 1)
    assert target.d == 1
    assert target.weights[0] == F(99, 100) - F(2, 5)
    assert target.weights[1:] == L.weights[1:]


def test_projection_undefined():
    L = Linearization(2, 5, F(3, 5), (F(1, 2), F(57, 100), F(71, 100), F(52, 100), F(1, 10)))
    with pytest.raises(ProjectionUndefined, match="projection undefined"):
        projection_bijective(L, 5)
    with pytest.raises(ProjectionUndefined):
        projection_bijective(Linearization(1, 4, F(1, 2), (F(1, 2),) * 4), 1)


def test_projection_matches_partition_oracle():
    L = Linearization(2, 5, F(3, 5), (F(1, 2), F(57, 100), F(71, 100), F(52, 100), F(1, 10)))
    assert is_generic(L)
    for i in (1, 2, 3, 4):
        report = projection_bijective(L, i)
        others = [j for j in range(1, 6) if j != i]
        assert report.bijective == (not brute_partition_exists(others, lambda b: sigma(b, L), 1))


# -- gluing -----------------------------------------------------------------------------------


def test_gluing_flip_tail():
    L = sym(5, 19, F(4, 9) + EPS)
    g = gluing_data(I(7), L)
    assert g.degree == 1
    assert g.b == (1 - L.gamma) * 1 - (L.weight(I(7)) - 1) + L.gamma
    assert g.b == F(19063, 42750)
    assert 0 < g.b < 1
    assert g.cross_section_residual == 0
    assert g.tail.n == 8 and not g.one_factor


def test_gluing_one_factor():
    L = sym(5, 19, F(4, 9) + EPS)
    g = gluing_data(I(18), L)
    assert g.degree == 5 and g.one_factor
    assert g.cross_section_residual == 0


def test_gluing_needs_a_tail():
    with pytest.raises(NoTailFactor):
        gluing_data(I(2), sym(5, 19, F(4, 9) + EPS))


# -- exterior walls ---------------------------------------------------------------------------


def test_exterior_gamma_one():
    L = Linearization(3, 4, F(1), (F(1, 2),) * 4)
    cases = classify_exterior(L)
    assert [c.tag for c in cases] == ["SLtwoQuotient"]
    assert cases[0].params["weights"] == L.weights


def test_exterior_gamma_zero():
    L = Linearization(2, 4, F(0), (F(3, 4),) * 4)
    assert [c.tag for c in classify_exterior(L)] == ["PointConfigQuotient"]


def test_exterior_projection_wall():
    L = Linearization(2, 5, F(3, 5), (F(1), F(1, 2), F(1, 2), F(1, 5), F(1, 5)))
    cases = classify_exterior(L)
    assert [str(c) for c in cases] == ["ProjectionWall(1)"]
    target = cases[0].params["target"]
    assert target.d == 1 and target.weights[0] == F(3, 5)


def test_exterior_forgetful_wall():
    L = Linearization(2, 5, F(3, 5), (F(0), F(3, 5), F(3, 5), F(3, 5), F(3, 5)))
    cases = classify_exterior(L)
    assert [str(c) for c in cases] == ["ForgetfulWall(1)"]
    assert cases[0].params["target"].n == 4


def test_exterior_refuses_interior_and_outside_points():
    with pytest.raises(ValueError, match="interior"):
        classify_exterior(sym(9, 9, F(2, 5)))
    with pytest.raises(ValueError, match="outside"):
        classify_exterior(Linearization(2, 4, F(1, 5), (F(6, 5), F(3, 5), F(1, 2), F(1, 2))))
