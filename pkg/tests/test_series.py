import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from anharmonic.model import Case, PotentialSpec
from anharmonic.oracle import rspt_rational, rspt_rational_double
from anharmonic.series import (
    ONE,
    Q,
    AsymptoticSeries,
    QPolynomial,
    SeriesTerm,
    _delta_inverted,
    _delta_inverted_direct,
    a_coeff_table_double,
    delta_series_double,
    delta_series_inverted,
    energy_series,
    p_coeffs,
    pcf_recurrence_double,
    s_coeffs,
    w2_step_coeffs,
)
from anharmonic.specfun import pcf_origin, rfactorial

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=40)
polys = st.lists(fractions, max_size=6).map(QPolynomial.from_coeffs)


def P(d):
    return QPolynomial.from_coeffs(d)


# -- QPolynomial algebra -----------------------------------------------------------


@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == QPolynomial()


@given(polys, polys, fractions)
def test_evaluation_is_a_homomorphism(a, b, x):
    assert (a * b)(x) == a(x) * b(x)
    assert (a + b)(x) == a(x) + b(x)


@given(polys, fractions, fractions)
def test_shift_and_reflect(a, s, x):
    assert a.shift(s)(x) == a(x + s)
    assert a.reflect()(x) == a(-x)


@given(polys)
def test_no_zero_coefficients_stored(a):
    assert all(c != 0 for _, c in a.items)
    assert (a * 0).is_zero()


def test_parity_and_degree():
    assert (Q * Q + 1).parity() == 0
    assert (Q * Q * Q + Q).parity() == 1
    assert (Q + 1).parity() is None
    assert QPolynomial().degree == -1


# -- ladder tables -------------------------------------------------------------------


def test_w2_step_coefficients():
    up, mid, down = w2_step_coeffs()
    assert (up(1), mid(1), down(1)) == (2, 1, -1)
    assert (up(3), mid(3), down(3)) == (3, 3, 0)
    assert up + mid + down == Q * 2


def test_s_coefficients():
    s4 = s_coeffs(2)
    assert s4[0](1) == 3
    assert s4[1](1) == 12
    assert s4[0] == (Q * Q + 1) * Fraction(3, 2)
    assert s4[1] == (Q + 2) * (Q + 3)
    assert s4[-1] == (Q - 2) * (Q - 3)
    assert s4[2] == (Q + 3) * (Q + 7) * Fraction(1, 4)
    assert s4[-2] == (Q - 3) * (Q - 7) * Fraction(1, 4)
    assert tuple(s_coeffs(1)[j] for j in (1, 0, -1)) == w2_step_coeffs()


def test_p_coefficients():
    p1 = p_coeffs(1)
    assert p1[1].coefficient(0)(1) == 3
    assert p1[-1].coefficient(0)(1) == Fraction(-1, 2)
    assert set(p_coeffs(0)) == {0} and p_coeffs(0)[0].coefficient(0) == ONE


@pytest.mark.parametrize("i", range(1, 7))
def test_p_table_support(i):
    table = p_coeffs(i)
    assert 0 not in table
    assert all(abs(j) <= 2 * i for j in table)


def test_two_solvers_agree():
    assert _delta_inverted(6) == _delta_inverted_direct(6)


# -- separation constant and energy ----------------------------------------------------


def test_delta_inverted_leading_and_parity():
    d1 = delta_series_inverted(1)
    assert d1.terms[0].coeff == (Q * Q + 1) * Fraction(-3, 2)
    d2 = delta_series_inverted(2)
    second = [t for t in d2.terms if t.h2_power == -3][0]
    assert second.coeff.parity() == 1
    assert second.coeff == (Q * Q * Q * 17 + Q * 67) * Fraction(-1, 4)


def test_energy_series_inverted_regenerated():
    e = energy_series(Case.INVERTED, 4)
    got = {t.h2_power: t.coeff for t in e.terms}
    assert got[1] == Q * Fraction(1, 2)
    assert got[-2] == (Q * Q + 1) * Fraction(-3, 4)
    assert got[-5] == P({3: Fraction(-17, 8), 1: Fraction(-67, 8)})
    assert got[-8] == P({4: Fraction(-375, 32), 2: Fraction(-3414, 32), 0: Fraction(-1539, 32)})


def test_tabulated_inverted_c4_coefficient_is_not_reproduced():
    # The tabulated -(4q^3 + 29q) disagrees with exact perturbation theory at q = 1.
    e = energy_series(Case.INVERTED, 3)
    c4 = [t for t in e.terms if t.c2_power == 2][0]
    assert c4.coeff != P({3: -4, 1: -29})
    # bounded case via c^2 -> -c^2, checked against the independent oracle
    assert rspt_rational(1, 2).terms[2].coeff == QPolynomial.const(Fraction(-21, 2))


def test_energy_series_double_regenerated():
    e = energy_series(Case.DOUBLE_WELL, 4)
    got = {t.h2_power: (t.coeff, t.sqrt2_power) for t in e.terms}
    assert got[4] == (QPolynomial.const(Fraction(-1, 32)), 0)
    assert got[1] == (Q * Fraction(1, 2), 1)
    assert got[-2] == ((Q * Q * 3 + 1) * Fraction(-1, 2), 0)
    assert got[-5] == (P({3: Fraction(-17, 4), 1: Fraction(-19, 4)}), 1)
    assert got[-8] == (P({4: Fraction(-375, 8), 2: Fraction(-918, 8), 0: Fraction(-131, 8)}), 0)


@pytest.mark.parametrize("q0", [1, 3, 5])
def test_double_series_matches_shifted_well_perturbation_theory(q0):
    assert energy_series(Case.DOUBLE_WELL, 4).at(q0).key() == rspt_rational_double(q0, 3).key()


@pytest.mark.parametrize("q0", [1, 3, 5])
def test_bounded_series_matches_perturbation_theory(q0):
    assert energy_series(Case.BOUNDED, 4).at(q0).key() == rspt_rational(q0, 3).key()


def test_delta_double():
    d1 = delta_series_double(1)
    assert d1.terms[0].coeff == (Q * Q * 3 + 1) * -1
    assert d1.terms[0].coeff(1) == -4
    d2 = delta_series_double(2)
    second = [t for t in d2.terms if t.h2_power == -3][0]
    assert second.sqrt2_power == 1
    assert second.coeff == (Q * Q * 17 + 19) * Q * Fraction(-1, 2)


def test_bounded_is_inverted_with_flipped_c2():
    for order in (1, 2, 3, 5):
        assert energy_series(Case.BOUNDED, order).key() == energy_series(Case.INVERTED, order).flip_c2().key()


@pytest.mark.parametrize("case", [Case.INVERTED, Case.BOUNDED, Case.DOUBLE_WELL])
def test_parity_pairing(case):
    # invariance under q -> -q, h^2 -> -h^2
    for t in energy_series(case, 6).terms:
        assert t.coeff.parity() == t.h2_power % 2


def test_terms_sorted_by_descending_h2_power():
    for case in Case:
        powers = [t.h2_power for t in energy_series(case, 5).terms]
        assert powers == sorted(powers, reverse=True)


def test_a_coefficient_table():
    table = a_coeff_table_double()
    assert table[-2].coefficient(0)(5) == 8
    assert table[1].coefficient(0)(1) == -16
    assert table[-1].coefficient(0)(1) == 0


def test_pcf_recurrence_values():
    up, down = pcf_recurrence_double(3)
    assert up == pytest.approx(math.sqrt(2.0) / math.gamma(1.5), rel=1e-13)
    assert down == pytest.approx(math.sqrt(2.0) / math.sqrt(math.pi), rel=1e-13)
    assert pcf_recurrence_double(1)[1] == 0.0


@pytest.mark.parametrize("q", [0.5, 1.0, 2.0, 3.0, 4.5, 5.0, 7.0])
def test_pcf_recurrence_consistent_at_origin(q):
    # w B_q(w) vanishes at w = 0, so the B_{q+2}, B_{q-2} combination must too
    def b0(p):
        return pcf_origin(p)[0] * rfactorial((p - 1.0) / 4.0) * 2.0 ** (-(p - 1.0) / 4.0)

    up, down = pcf_recurrence_double(q)
    total = up * b0(q + 2) + down * b0(q - 2)
    assert abs(total) <= 1e-12 * max(1.0, abs(up * b0(q + 2)))


def test_series_value_and_derivative():
    e = energy_series(Case.INVERTED, 2)
    spec = PotentialSpec(Case.INVERTED, 100.0, 2.0)
    want = 0.5 * 3 * spec.h2 - 0.75 * (9 + 1) * 2.0 / spec.h4
    assert e.value(3, spec.h4, spec.c2) == pytest.approx(want, rel=1e-15)
    d = e.derivative_q()
    assert d.value(3, spec.h4, spec.c2) == pytest.approx(0.5 * spec.h2 - 1.5 * 3 * 2.0 / spec.h4, rel=1e-15)


def test_render_and_json():
    text = energy_series(Case.INVERTED, 2).render()
    assert text == "E = (1/2) q h^2 - (3/4) (q^2 + 1) c^2 / h^4"
    js = energy_series(Case.DOUBLE_WELL, 1).to_json()
    assert js["terms"][1] == {"h2_power": 1, "c2_power": 0, "sqrt2_power": 1, "q_poly": ["0", "1/2"]}


def test_sqrt2_power_normalised():
    t = SeriesTerm(0, 0, ONE, 3)
    assert t.sqrt2_power == 1 and t.coeff == QPolynomial.const(2)
    t = SeriesTerm(0, 0, ONE, -1)
    assert t.sqrt2_power == 1 and t.coeff == QPolynomial.const(Fraction(1, 2))


def test_zero_terms_dropped():
    s = AsymptoticSeries((SeriesTerm(1, 0, QPolynomial()), SeriesTerm(0, 1, ONE)), 2)
    assert len(s.terms) == 1


def test_invalid_order():
    with pytest.raises(ValueError):
        energy_series(Case.BOUNDED, 0)
