from fractions import Fraction as F

import pytest

from vgit.lincore import Linearization, OnWallError, is_generic, phi, sigma
from vgit.models import (
    boggi_params,
    chamber_point_in_region,
    hassett_chamber,
    hassett_embedding_degree,
    identify,
    in_hassett_regime,
    is_boggi_chamber,
    model_key,
)
from vgit.walls import same_chamber


def sym(d, n, gamma):
    return Linearization.symmetric(d, n, F(gamma))


# -- identify ------------------------------------------------------------------------


def test_half_plus_epsilon_is_mbar():
    for n in (5, 6):
        d = n - 2
        c = F(1, 2) + F(1, 100)
        gamma = (d + 1 - n * c) / (d - 1)
        L = Linearization(d, n, gamma, (c,) * n)
        assert gamma > F(1, 2)
        assert identify(L).tag == "MbarN"


def test_nine_nine_three_quarters_is_hassett():
    L = sym(9, 9, F(3, 4))
    model = identify(L)
    assert model.tag == "Hassett"
    # (10 - 8 * 3/4)/9 = 4/9, in the same chamber as 1/3 + eps
    assert set(model.weights) == {F(4, 9)}
    assert str(model) == "Hassett(4/9)"


def test_three_quarters_shares_the_one_third_chamber():
    near_third = F(1, 3) + F(1, 100)
    assert hassett_chamber((F(4, 9),) * 9) == hassett_chamber((near_third,) * 9)
    assert model_key(sym(9, 9, F(3, 4))) == model_key(sym(9, 9, F(3, 4) + F(1, 100)))


def test_two_fifths_is_triple_style():
    assert identify(sym(9, 9, F(2, 5))).tag == "TripleStyle"


def test_three_fifths_is_mbar():
    assert identify(sym(9, 9, F(3, 5))).tag == "MbarN"


def test_boggi_identified():
    assert identify(sym(9, 9, F(1, 5))).tag == "Boggi"
    for n in range(4, 10):
        assert identify(boggi_params(n)).tag == "Boggi"


def test_identify_refuses_walls():
    with pytest.raises(OnWallError):
        identify(sym(9, 9, F(1, 2)))


def test_unidentified_carries_a_summary():
    weights = (F(14213, 22698), F(3262, 3783), F(11417, 22698), F(699, 2522), F(233, 1746))
    model = identify(Linearization(2, 5, F(58, 97), weights))
    assert model.tag == "Unidentified"
    assert model.summary == "22 of 26 trees contract vertices; 29 assigned, 0 unmarked"


def test_hassett_point_lies_in_the_chamber():
    L = sym(9, 9, F(3, 4) + F(1, 100))
    point = chamber_point_in_region(L, "hassett")
    assert point == L
    M = sym(5, 7, F(2, 5))
    found = chamber_point_in_region(M, "hassett")
    if found is not None:
        assert in_hassett_regime(found) and same_chamber(M, found)


# -- Boggi ---------------------------------------------------------------------------------


def test_boggi_params_nine():
    L = boggi_params(9)
    assert L.d == 9
    assert L.gamma == F(11, 80)
    assert set(L.weights) == {F(89, 90)}
    for k in range(2, 8):
        assert sigma(range(1, k + 1), L) == k
    assert is_boggi_chamber(L)


def test_boggi_needs_four_marks():
    with pytest.raises(ValueError):
        boggi_params(3)


# -- Hassett embedding degree ---------------------------------------------------------------


def test_embedding_degree_eight_marks():
    e = hassett_embedding_degree([F(51, 100)] * 8)
    assert e.d == 6
    assert e.gamma == F(73, 125)
    assert e.gamma > F(1, 2)
    assert in_hassett_regime(e.linearization())


def test_embedding_degree_sixteen_marks():
    c = F(1, 4) + F(1, 100)
    e = hassett_embedding_degree([c] * 16)
    assert (e.d, e.gamma) == (10, F(19, 25))
    assert e.gamma > 1 - c
    previous = (e.d - 16 * c) / (e.d - 2)
    assert not previous > 1 - c


def test_embedding_degree_is_minimal_for_heavy_weights():
    # with every c_i >= 1/2 only gamma > 1/2 matters
    c = [F(3, 5)] * 5
    e = hassett_embedding_degree(c)
    gammas = {d: (d + 1 - F(3)) / (d - 1) for d in range(2, e.d + 1)}
    assert gammas[e.d] > F(1, 2)
    assert all(g <= F(1, 2) for d, g in gammas.items() if d < e.d)


def test_embedding_degree_breaks_symmetry_off_a_wall():
    # six equal weights at d = 7: every half-set has phi = 3 all along the symmetric line
    c = [F(3, 4)] * 6
    assert phi(frozenset({1, 2, 3}), Linearization(7, 6, F(7, 12), tuple(c))) == 3
    e = hassett_embedding_degree(c)
    L = e.linearization()
    assert e.d == 7 and e.perturbation != 0
    assert is_generic(L) and in_hassett_regime(L)
    assert hassett_chamber(e.weights) == hassett_chamber(c)


def test_embedding_degree_errors():
    with pytest.raises(ValueError, match="sum"):
        hassett_embedding_degree([F(1, 2)] * 4)
    with pytest.raises(ValueError):
        hassett_embedding_degree([F(1), F(1, 2), F(1, 2)])
