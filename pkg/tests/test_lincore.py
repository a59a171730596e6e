from fractions import Fraction as F

import pytest

from oracles import brute_generic, direct_phi, direct_sigma
from vgit.lincore import (
    CapExceeded,
    GammaOneError,
    Linearization,
    OnWallError,
    as_fraction,
    ceil_fraction,
    floor_fraction,
    hyperplanes_through,
    is_generic,
    phi,
    require_generic,
    sigma,
)

EPS = F(1, 1000)


def I(k):
    return range(1, k + 1)


def sym(d, n, gamma):
    return Linearization.symmetric(d, n, F(gamma))


# -- Linearization -------------------------------------------------------------


def test_cross_section_residual_reported():
    # 1/2 + 4 * 1/2 - 3 = -1/2
    with pytest.raises(ValueError, match="residual -1/2"):
        Linearization(2, 4, F(1, 2), (F(1, 2),) * 4)


def test_interior_flag_and_boundary_points():
    L = sym(9, 9, F(2, 5))
    assert L.is_interior and L.is_symmetric
    edge = Linearization(2, 4, F(1), (F(1, 2),) * 4)
    assert not edge.is_interior


def test_floats_and_decimal_strings_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(ValueError):
        as_fraction("0.5")
    assert as_fraction("3/6") == F(1, 2)


def test_exact_rounding_helpers():
    assert ceil_fraction(F(-1, 3)) == 0
    assert ceil_fraction(F(7, 2)) == 4
    assert floor_fraction(F(-1, 3)) == -1
    assert ceil_fraction(F(4)) == 4


def test_json_round_trip_keeps_exact_values():
    L = sym(5, 19, F(4, 9) + EPS)
    again = Linearization.loads(L.dumps())
    assert again == L
    record = L.to_dict()
    assert record["gamma"] == "4009/9000"


def test_loading_rejects_numbers_and_bad_identity():
    with pytest.raises(ValueError):
        Linearization.from_dict({"d": 2, "n": 4, "gamma": 0.5, "weights": ["5/8"] * 4})
    with pytest.raises(ValueError, match="residual"):
        Linearization.from_dict({"d": 2, "n": 4, "gamma": "1/2", "weights": ["1/2"] * 4})


def test_interpolation_stays_on_cross_section():
    a, b = sym(9, 9, F(3, 10)), sym(9, 9, F(999, 1000))
    mid = a.interpolate(b, F(1, 2))
    assert mid.gamma == (a.gamma + b.gamma) / 2


# -- phi -----------------------------------------------------------------------


def test_phi_zero_when_weight_is_one():
    L = Linearization(2, 4, F(1, 3), (F(1, 2), F(1, 2), F(5, 6), F(5, 6)))
    assert phi([1, 2], L) == 0


def test_phi_on_flip_wall():
    # c_i = (6 - 4 gamma)/19 gives phi(I_k) = (2k - 9)/5 at gamma = 4/9
    L = sym(5, 19, F(4, 9))
    for k in range(1, 19):
        assert phi(I(k), L) == F(2 * k - 9, 5)
    assert phi(I(7), L) == 1


def test_phi_on_slice_wall_eleven_sixteenths():
    assert phi(I(2), sym(9, 9, F(11, 16))) == 0


def test_phi_undefined_at_gamma_one():
    L = Linearization(2, 4, F(1), (F(1, 2),) * 4)
    with pytest.raises(GammaOneError):
        phi([1, 2], L)
    with pytest.raises(ZeroDivisionError):
        phi([1], L)


def test_phi_matches_direct_formula():
    L = Linearization.from_gamma_and_weights(
        3, F(1, 7), (F(1, 3), F(2, 5), F(3, 4), F(5, 6), 4 - F(2, 7) - F(1, 3) - F(2, 5) - F(3, 4) - F(5, 6))
    )
    for subset in ([1], [1, 3], [2, 4, 5], [1, 2, 3, 4]):
        assert phi(subset, L) == direct_phi(L.weight(subset), L.gamma)


# -- sigma ---------------------------------------------------------------------

# the sigma table of the flip example, by cardinality 1..18
PLUS_TABLE = [0] * 4 + [1] * 3 + [2] * 2 + [3] * 2 + [4] * 3 + [5] * 4
MINUS_TABLE = list(PLUS_TABLE)
MINUS_TABLE[7 - 1] = 2
MINUS_TABLE[12 - 1] = 3


def test_sigma_trivial_subsets():
    L = sym(5, 19, F(4, 9) + EPS)
    assert sigma([], L) == 0
    assert sigma(range(1, 20), L) == 5


def test_sigma_table_just_above_the_flip_wall():
    L = sym(5, 19, F(4, 9) + EPS)
    assert [sigma(I(k), L) for k in range(1, 19)] == PLUS_TABLE
    assert phi(I(7), L) == F(94748, 94829)


def test_sigma_table_just_below_the_flip_wall():
    L = sym(5, 19, F(4, 9) - EPS)
    assert [sigma(I(k), L) for k in range(1, 19)] == MINUS_TABLE
    changed = [k for k in range(1, 19) if MINUS_TABLE[k - 1] != PLUS_TABLE[k - 1]]
    assert changed == [7, 12]


def test_sigma_matches_direct_oracle():
    L = sym(9, 9, F(2, 5))
    for k in range(0, 10):
        assert sigma(I(k), L) == direct_sigma(I(k), L.gamma, L.weights)


# -- genericity ----------------------------------------------------------------


def test_generic_examples():
    assert not is_generic(sym(5, 19, F(4, 9)))
    assert is_generic(sym(5, 19, F(4, 9) + EPS))
    assert is_generic(sym(9, 9, F(2, 5)))


def test_generic_matches_brute_subset_scan():
    for gamma in (F(2, 7), F(3, 10), F(1, 2), F(2, 3), F(11, 16), F(7, 8), F(9, 10)):
        L = sym(9, 9, gamma)
        assert is_generic(L) == brute_generic(9, L.gamma, L.weights)


def test_require_generic_lists_hyperplanes():
    L = sym(5, 19, F(4, 9))
    with pytest.raises(OnWallError) as info:
        require_generic(L)
    planes = info.value.hyperplanes
    assert any(len(s) == 7 and k == 1 for s, k, _ in planes)
    assert planes == hyperplanes_through(L)


def test_cap_applies_to_non_symmetric_scans():
    weights = [F(1, 2) + F(j, 10**6) for j in range(1, 23)]
    total = sum(weights)
    # put the point on the cross-section with d = 20: gamma = (21 - total)/19
    gamma = (21 - total) / 19
    L = Linearization(20, 22, gamma, tuple(weights))
    with pytest.raises(CapExceeded):
        is_generic(L, cap=1000)
