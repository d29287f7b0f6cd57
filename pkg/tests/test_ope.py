import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpvoa import ope
from bpvoa.ope import ENGINE, FieldId, Mode, ModeExpression
from bpvoa.scalars import K

kappa = (2 * K + 3) / 3
idx = st.integers(min_value=-4, max_value=4)
gens = st.sampled_from(ope.GENERATORS)


def test_opes_loaded():
    entries = {e.lhs: e for e in ope.load_paper_opes()}
    assert len(entries) == 10
    jj = entries[(FieldId.J, FieldId.J)].poles
    assert set(jj) == {2}
    assert jj[2] == {(FieldId.IDENTITY, 0): kappa}
    assert entries[(FieldId.GPLUS, FieldId.GPLUS)].poles == {}
    assert entries[(FieldId.GPLUS, FieldId.GMINUS)].poles[3] == {(FieldId.IDENTITY, 0): (K + 1) * (2 * K + 3)}


def test_commutator_examples():
    assert ope.commutator("J", 1, "J", -1) == ModeExpression.constant(kappa)
    for n in range(-2, 3):
        assert ope.commutator("J", 0, "G+", n) == ModeExpression.mode("G+", n)
    got = ope.bracket("G+", 0, "G-", 0)
    want = ModeExpression({Mode("J", 0): -(2 * K + 3), Mode("L", 0): -(K + 3)}, {0: 3})
    assert got == want


def test_missing_pair_raises():
    eng = ope.BracketEngine([e for e in ope.load_paper_opes() if e.lhs != (FieldId.T, FieldId.J)])
    with pytest.raises(KeyError):
        eng.commutator("T", 0, "J", 0)


def test_T_zero_mode():
    # T_0 = L_0 + J_0/2 from L = T + dJ/2 and (dJ)_(n) = -n J_(n-1)
    assert ope.to_L_basis(ModeExpression.mode("T", 0)) == ModeExpression({Mode("L", 0): 1, Mode("J", 0): Fraction(1, 2)})
    e = ModeExpression({Mode("J", 3): K})
    assert ope.to_L_basis(e) == e


def test_bracket_table_and_corrections():
    rep = ope.verify_bracket_table(range(-3, 4))
    assert rep.ok, rep.mismatches[:3]
    assert rep.checked == 9 * 49
    assert rep.corrections and rep.conventions
    literal = ope.verify_bracket_table(range(-3, 4), literal=True)
    assert not literal.ok
    assert all("G+" in m["bracket"] and "G-" in m["bracket"] for m in literal.mismatches)


def _ad_J(a, expr, literal):
    """[J_a, expr] for an expression in J, L and (J^2), from the closed-form list."""
    out = ModeExpression()
    for mode, c in expr.linear.items():
        f, l = mode
        if f == "J":
            out = out + ope.closed_form_bracket("J", a, "J", l, literal=literal) * c
        elif f == "L":
            out = out - ope.closed_form_bracket("L", l, "J", a, literal=literal) * c
        else:
            raise AssertionError(mode)
    for l, c in expr.jj.items():
        # [J_a, (J^2)_l] = 2 kappa a J_(a+l)
        out = out + ModeExpression.mode("J", a + l, 2 * kappa * a * c)
    return out


def _jacobi_failures(literal):
    bad = []
    for a in range(-3, 4):
        for m in range(-3, 4):
            for n in range(-3, 4):
                lhs = _ad_J(a, ope.closed_form_bracket("G+", m, "G-", n, literal=literal), literal)
                rhs = ope.closed_form_bracket("G+", a + m, "G-", n, literal=literal) - ope.closed_form_bracket(
                    "G+", m, "G-", a + n, literal=literal
                )
                if lhs != rhs:
                    bad.append((a, m, n))
    return bad


def test_literal_central_term_breaks_jacobi():
    assert _jacobi_failures(literal=False) == []
    assert _jacobi_failures(literal=True)


def test_virasoro_and_invariants():
    assert ope.check_virasoro() == []
    assert ope.check_antisymmetry() == []
    assert ope.check_grading() == []
    c = ope.central_charge_expr()
    assert c == -4 * (K + 1) * (2 * K + 3) / (K + 3)


def test_spectral_flow():
    assert ope.spectral_flow_mode(Mode("G+", 0)) == ModeExpression.mode("G+", -1)
    assert ope.spectral_flow_mode(Mode("G-", 0)) == ModeExpression.mode("G-", 1)
    assert ope.spectral_flow_mode(Mode("J", 1)) == ModeExpression.mode("J", 1)
    assert ope.spectral_flow_mode(Mode("J", 0)) == ModeExpression({Mode("J", 0): 1}, central=-kappa)
    assert ope.spectral_flow_mode(Mode("L", 0)) == ModeExpression({Mode("L", 0): 1, Mode("J", 0): -1}, central=kappa)
    assert ope.spectral_flow_mode(Mode("L", 2)) == ModeExpression({Mode("L", 2): 1, Mode("J", 2): -1})
    assert [ENGINE.flow_constant(n) for n in range(-3, 4)] == [0, 0, 0, kappa, 0, 0, 0]
    assert ope.check_flow_automorphism() == []
    assert ope.check_flow_automorphism(range(-2, 3), times=2) == []


@given(gens, idx, gens, idx)
@settings(max_examples=150, deadline=None)
def test_bracket_properties(a, m, b, n):
    x = ope.bracket(a, m, b, n)
    assert x + ope.bracket(b, n, a, m) == ModeExpression()
    # every term carries the total charge and depth of the pair
    charge = ope.CHARGE[FieldId(a)] + ope.CHARGE[FieldId(b)]
    for mode in x.linear:
        assert mode.index == m + n
        assert ope.CHARGE[FieldId(mode.family)] == charge
    for l in x.jj:
        assert l == m + n and charge == 0
    if x.central:
        assert m + n == 0


def test_export_round_trip():
    recs = ope.export_brackets(range(-1, 2))
    assert len(recs) == 16 * 9
    text = json.dumps(recs, sort_keys=True)
    for rec in json.loads(text):
        (a, m), (b, n) = rec["lhs"]
        assert ope.bracket_from_json(rec) == ope.bracket(a, m, b, n)
    gpgm = next(r for r in recs if r["lhs"] == [["G+", 0], ["G-", 0]])
    assert {"coeff": "(3)/(1)", "family": "JJ", "index": 0} in gpgm["rhs_terms"]
