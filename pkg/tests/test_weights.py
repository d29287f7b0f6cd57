from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpvoa import weights as W
from bpvoa.scalars import K

rat = st.fractions(min_value=-4, max_value=4, max_denominator=5)
odd_p = st.sampled_from([3, 5, 7, 9, 11])


def test_g_examples():
    assert W.g_fun(0, 0) == 0
    assert W.g_fun(Fraction(2, 3), 0, Fraction(-1, 2)) == 0


@given(st.integers(1, 8), rat, rat)
@settings(max_examples=100, deadline=None)
def test_h_forms_agree(i, xi, chi):
    assert W.h_fun_averaged(i, xi, chi) == W.h_fun_expanded(i, xi, chi)


def test_h_symbolic_in_k_and_h1_is_g():
    for i in range(1, 9):
        for xi in (Fraction(-1), Fraction(1, 3), Fraction(2)):
            for chi in (Fraction(0), Fraction(-2, 5), Fraction(3)):
                assert W.h_fun(i, xi, chi, K) == W.h_fun_expanded(i, xi, chi, K)
    assert W.h_fun(1, Fraction(1, 7), Fraction(2), K) == W.g_fun(Fraction(1, 7), Fraction(2), K)
    with pytest.raises(ValueError):
        W.h_fun(0, 0, 0)


def test_xi_chi_examples():
    k = Fraction(-1, 2)
    assert W.xi_chi(1, 1, k) == W.HighestWeight(Fraction(2, 3), 0)
    assert W.xi_chi(1, 3, k) == W.HighestWeight(0, 0)
    for p in (3, 5, 7, 9):
        assert W.xi_chi(1, p - 2, W.Level(p).k) == W.HighestWeight(0, 0)


def test_crucial_shift_is_a_third():
    k = Fraction(-1, 2)
    hw = W.xi_chi(1, 3, k)
    kap = (2 * k + 3) / 3
    assert W.h_fun(3, hw.xi - kap, hw.chi + kap, k) == 0
    half = (2 * k + 3) / 2
    assert W.h_fun(3, hw.xi - half, hw.chi + kap, k) != 0


@given(odd_p)
@settings(max_examples=10, deadline=None)
def test_root_and_bound_properties(p):
    k = W.Level(p).k
    for rec in W.enumerate_simples(p):
        hw, i, j = rec.hw, rec.i, rec.j
        assert W.h_fun(i, hw.xi, hw.chi, k) == 0
        flowed = W.flow_weight(hw, i, k)
        assert W.h_fun(j, flowed.xi, flowed.chi, k) == 0
        assert flowed.xi == Fraction(i - j, 3)
        assert Fraction(i - j, 3) <= Fraction(p - 2 * j - 1, 3)
        assert W.weight_from_sl3(rec.lam, k) == hw


def test_flow_weight_examples():
    k = Fraction(-1, 2)
    assert W.flow_weight(W.HighestWeight(Fraction(2, 3), 0), 1, k) == W.HighestWeight(0, 0)
    for i in range(1, 5):
        got = W.flow_weight(W.HighestWeight(0, 0), i, K)
        kap = (2 * K + 3) / 3
        assert got == W.HighestWeight(i - 1 - kap, -(i - 1) + kap)


def test_enumerate_counts_and_distinct():
    for p, n in ((3, 1), (5, 6), (7, 15), (9, 28)):
        recs = W.enumerate_simples(p)
        assert len(recs) == n
        assert len({r.hw for r in recs}) == n
        assert [(r.i, r.j) for r in recs] == sorted((r.i, r.j) for r in recs)
    (only,) = W.enumerate_simples(3)
    assert (only.i, only.j, only.hw) == (1, 1, W.HighestWeight(0, 0))


def test_gram_and_admissible():
    assert W.gram_matrix() == ((Fraction(2, 3), Fraction(1, 3)), (Fraction(1, 3), Fraction(2, 3)))
    lam = W.admissible_weight(1, 1, 5)
    assert (lam.a1, lam.a2, lam.level_coeff) == (0, 2, Fraction(-1, 2))
    assert lam.inner(W.LAMBDA2 + W.LAMBDA1 * -1) == Fraction(2, 3)
    assert W.admissible_weight(1, 3, 5) == W.Sl3Weight(Fraction(0), Fraction(0), Fraction(-1, 2))
    with pytest.raises(ValueError):
        W.admissible_weight(3, 2, 5)


def test_central_charge():
    assert W.central_charge(W.Level(3).k, 3) == 0
    assert W.central_charge(W.Level(5).k, 5) == Fraction(-8, 5)
    assert W.central_charge(W.Level(7).k, 7) == Fraction(-48, 7)
    with pytest.raises(ZeroDivisionError):
        W.central_charge(-3)


def test_level_validation():
    for bad in (1, 4, -3):
        with pytest.raises(ValueError):
            W.Level(bad)
