import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpvoa import weights as W
from bpvoa.modules import (
    HighestWeightModule,
    InconclusiveError,
    QuotientState,
    Truncation,
    TruncationError,
    enumerate_block,
    iterate_quotient,
    null_vector_check,
    top_dimension,
    twist_module,
    weight_of,
)
from bpvoa.ope import Mode
from bpvoa.scalars import K
from bpvoa.verify import check_module_brackets, random_vector

VACUUM_MIN = {"J": 1, "L": 2, "G+": 1, "G-": 2}
CH = {"J": 0, "L": 0, "G+": 1, "G-": -1}
RANK = {"J": 0, "L": 1, "G+": 2, "G-": 3}


def brute_block(kind, charge, depth):
    """Multisets of lowering modes with the given weight, by brute force."""
    lo = {"J": 1, "L": 1, "G+": 0, "G-": 1} if kind == "verma" else VACUUM_MIN
    modes = [(f, -n) for f in CH for n in range(lo[f], depth + 1)]
    out = set()
    zero = [m for m in modes if m[1] == 0]
    pos = [m for m in modes if m[1] != 0]
    for r in range(depth + 1):
        for combo in itertools.combinations_with_replacement(pos, r):
            d = -sum(n for _, n in combo)
            a = sum(CH[f] for f, _ in combo)
            if d != depth:
                continue
            extra = charge - a
            if zero and extra >= 0:
                combo = combo + tuple(zero) * extra
            elif extra:
                continue
            out.add(tuple(sorted(combo, key=lambda m: (RANK[m[0]], -m[1]), reverse=True)))
    return out


@pytest.mark.parametrize("kind", ["verma", "vacuum"])
def test_enumeration_matches_brute_force(kind):
    for depth in range(5):
        for charge in range(-depth, depth + 3):
            got = enumerate_block(kind, charge, depth)
            assert len(set(got)) == len(got)
            assert {tuple(tuple(m) for m in mono) for mono in got} == brute_block(kind, charge, depth)


def test_enumeration_examples():
    assert len(enumerate_block("verma", 0, 1)) == 3
    assert set(enumerate_block("vacuum", 0, 2)) == {
        (Mode("J", -2),),
        (Mode("J", -1), Mode("J", -1)),
        (Mode("L", -2),),
    }
    assert enumerate_block("vacuum", 2, 2) == ((Mode("G+", -1), Mode("G+", -1)),)


def test_g_and_h_reproduction():
    rng = random.Random(7)
    for _ in range(5):
        xi = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        chi = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        M = HighestWeightModule("verma", K, xi, chi)
        v = M.act(Mode("G+", 0), M.cyclic())
        assert M.act(Mode("G-", 0), v) == {(): W.g_fun(xi, chi, K)}
        for i in range(1, 5):
            top = {(Mode("G+", 0),) * i: 1}
            below = {(Mode("G+", 0),) * (i - 1): i * W.h_fun(i, xi, chi, K)}
            assert M.act(Mode("G-", 0), top) == below


def test_vacuum_J_action():
    M = HighestWeightModule("vacuum", K)
    assert M.act(Mode("J", 1), {(Mode("J", -1),): 1}) == {(): (2 * K + 3) / 3}
    for m in (Mode("G+", 0), Mode("L", -1), Mode("G-", -1), Mode("G-", 0), Mode("J", 0)):
        assert M.act(m, M.cyclic()) == {}


def test_truncation_error():
    M = HighestWeightModule("vacuum", Fraction(1, 3))
    with pytest.raises(TruncationError):
        M.act(Mode("J", -2), {(Mode("J", -1),): 1}, Truncation(2, 2))


@given(st.integers(0, 10**6))
@settings(max_examples=6, deadline=None)
def test_grading_exact(seed):
    rng = random.Random(seed)
    xi, chi = Fraction(rng.randint(-5, 5), 3), Fraction(rng.randint(-5, 5), 7)
    M = HighestWeightModule("verma", Fraction(rng.randint(-9, 9), 4), xi, chi)
    for a, d in ((0, 1), (1, 2), (-1, 3), (2, 2)):
        v = random_vector(M, (a, d), rng)
        assert M.act(Mode("J", 0), v) == {m: c * (xi + a) for m, c in v.items() if xi + a}
        assert M.act(Mode("L", 0), v) == {m: c * (chi + d) for m, c in v.items() if chi + d}


@given(st.integers(0, 10**6), st.sampled_from(["verma", "vacuum"]))
@settings(max_examples=4, deadline=None)
def test_bracket_soundness_random(seed, kind):
    rng = random.Random(seed)
    k = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
    if k == -3:
        k = Fraction(1, 2)
    args = (Fraction(rng.randint(-5, 5), 3), Fraction(rng.randint(-5, 5), 4)) if kind == "verma" else ()
    M = HighestWeightModule(kind, k, *args)
    vecs = [random_vector(M, b, rng) for b in ((0, 2), (1, 3), (-1, 3))]
    assert check_module_brackets(M, [v for v in vecs if v], range(-2, 3)) == []


def test_generic_verma_has_no_singular_vectors():
    rng = random.Random(3)
    k = Fraction(2, 7)
    while True:
        xi, chi = Fraction(rng.randint(-30, 30), 11), Fraction(rng.randint(-30, 30), 13)
        if all(W.h_fun(i, xi, chi, k) for i in range(1, 7)):
            break
    state = iterate_quotient("verma", W.HighestWeight(xi, chi), Truncation(2, 3), k)
    assert state.generators == []
    for (a, d), n in state.dimensions().items():
        assert n == len(enumerate_block("verma", a, d))


def test_vacuum_generic_level_is_free():
    state = iterate_quotient("vacuum", None, Truncation(4, 4), Fraction(2, 7))
    assert state.generators == []
    for (a, d), n in state.dimensions().items():
        assert n == len(enumerate_block("vacuum", a, d))


def test_p3_collapse():
    state = iterate_quotient("vacuum", None, Truncation(4, 4), Fraction(-3, 2))
    dims = state.dimensions()
    assert dims.pop((0, 0)) == 1
    assert set(dims.values()) == {0}
    assert top_dimension(W.HighestWeight(0, 0), Fraction(-3, 2)) == 1


def test_quotient_order_independent():
    for p in (3, 5):
        k = W.Level(p).k
        for kind, hw in (("vacuum", None), ("verma", W.xi_chi(2, 1, k) if p == 5 else None)):
            if hw is None and kind == "verma":
                continue
            a = iterate_quotient(kind, hw, Truncation(3, p), k)
            b = iterate_quotient(kind, hw, Truncation(3, p), k, reverse=True)
            assert a.dimensions() == b.dimensions()


def test_null_vectors():
    r = null_vector_check(5)
    assert r["in_maximal_submodule"] and r["certificate_depth"] == 3
    state = iterate_quotient("vacuum", None, Truncation(3, 5), Fraction(-1, 2))
    assert state.dim((3, 3)) == 0
    assert state.dim((2, 2)) == 1
    # generic level: the same vector is nonzero
    generic = iterate_quotient("vacuum", None, Truncation(3, 5), Fraction(2, 7))
    assert generic.dim((3, 3)) == 1


def test_top_dimensions_p5():
    k = W.Level(5).k
    for rec in W.enumerate_simples(5):
        assert top_dimension(rec.hw, k) == rec.i


def test_top_dimension_inconclusive_on_tiny_window():
    k = W.Level(5).k
    with pytest.raises(InconclusiveError):
        top_dimension(W.xi_chi(3, 1, k), k, Truncation(1, 2))


def test_twists():
    k = Fraction(-1, 2)
    kap = Fraction(2, 3)
    hw = W.HighestWeight(Fraction(2, 3), 0)
    state = iterate_quotient("verma", hw, Truncation(3, 5), k)
    assert twist_module(state)[0] == W.HighestWeight(0, 0)
    once = W.flow_weight(hw, 1, k)
    twice = W.flow_weight(once, top_dimension(once, k), k)
    assert twist_module(state, 2)[0] == twice
    vac = iterate_quotient("verma", W.HighestWeight(0, 0), Truncation(2, 5), k)
    assert twist_module(vac)[0] == W.HighestWeight(-kap, kap)


def test_twist_without_candidates_is_inconclusive():
    k = Fraction(-1, 2)
    # charge window too small to hold (G+_0)^2 v, the twisted highest-weight vector of L(xi_31)
    hw = W.xi_chi(3, 1, k)
    state = QuotientState(HighestWeightModule("verma", k, hw.xi, hw.chi), Truncation(1, 1)).run()
    with pytest.raises(InconclusiveError):
        twist_module(state)


def test_weight_of():
    assert weight_of((Mode("G-", -2), Mode("G+", 0))) == (0, 2)
