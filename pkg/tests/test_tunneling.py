import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from anharmonic.model import Case, Convention, PotentialSpec, landmarks, map_convention, potential_value
from anharmonic.specfun import RegimeError
from anharmonic.tunneling import (
    SpectralResult,
    branch_conditions,
    complex_eigenvalue,
    delta_wkb,
    eval_wavefunction_leading,
    exponent_pair,
    furry_factor,
    level_splitting,
    matching_constants_double,
    matching_constants_inverted,
    prefactor_identity,
    q_deviation_double,
    q_deviation_inverted,
    splitting_closed_form,
    splitting_from_origin_values,
    splitting_mass_one,
    splitting_mu_lambda,
    taylor_slope,
    turning_points,
    width_closed_form,
    wkb_origin_values,
    wkb_quantization_residual,
)

SQRT2 = math.sqrt(2.0)


def dw(h4, c2=1.0, convention=Convention.HALF):
    return PotentialSpec(Case.DOUBLE_WELL, h4, c2, convention)


def inv(h4, c2=1.0):
    return PotentialSpec(Case.INVERTED, h4, c2)


def inv_eps(h6_over_c2):
    return inv(h6_over_c2 ** (2.0 / 3.0))


# -- turning points ------------------------------------------------------------------


def test_double_turning_point_example():
    tp = turning_points(dw(16.0), 1)
    assert tp.z0 == pytest.approx(2 - 2**0.25 / 2 - SQRT2 / 16, rel=1e-14)
    assert tp.z1 == pytest.approx(2 + 2**0.25 / 2, rel=1e-14)


@pytest.mark.parametrize("h2", [8.0, 16.0, 32.0, 64.0])
def test_double_turning_points_against_numeric_root(h2):
    spec = dw(h2 * h2)
    lm = landmarks(spec)
    q = 1
    energy = SQRT2 / 2 * q * h2 - 0.5 * (3 * q * q + 1) / spec.h4

    def f(z):
        return energy - (potential_value(spec, z) - lm.v_at_extremum)

    root0 = brentq(f, 0.01 * lm.z_plus, lm.z_plus, xtol=1e-15)
    root1 = brentq(f, lm.z_plus, 3 * lm.z_plus, xtol=1e-15)
    tp = turning_points(spec, q)
    assert abs(tp.z0 - root0) <= spec.h**-5
    # two-term outer point: the neglected term is sqrt2 c q / h^4
    assert abs(tp.z1 - root1) <= 2 * SQRT2 / spec.h4


def test_inverted_turning_points_against_numeric_root():
    spec = inv(100.0)
    tp = turning_points(spec, 1)

    def f(z):
        return potential_value(spec, z) - 0.5 * spec.h2

    assert tp.z1 == pytest.approx(10 / SQRT2 * (1 - 2 / 1000), rel=1e-15)
    assert abs(tp.z1 - brentq(f, 1.0, 10.0)) < 1e-4
    assert abs(tp.z0 - brentq(f, 1e-6, 1.0)) < 2e-3


def test_turning_point_regime():
    with pytest.raises(RegimeError):
        turning_points(dw(1.0), 5)


# -- inverted well -------------------------------------------------------------------


def test_inverted_alpha_ground_state():
    spec = inv(4.0, 2.0)
    mc = matching_constants_inverted(spec, 1)
    assert mc.alpha == pytest.approx(math.exp(-spec.h6 / (12 * spec.c2)), rel=1e-14)


def test_inverted_beta_ratio_magnitude():
    mc = matching_constants_inverted(inv(4.0, 2.0), 1)
    assert mc.ratios["beta/beta_bar"] == pytest.approx(2.0, rel=1e-14)
    assert mc.beta / mc.beta_bar == pytest.approx(2.0, rel=1e-14)
    assert mc.phases["beta/beta_bar"] == 0.0


@pytest.mark.parametrize("q0", [1, 3, 5, 7])
def test_origin_condition_magnitude(q0):
    # slope of the vanishing sine/cosine times |q - q0| at the origin stage
    spec = inv(30.0)
    lhs = abs(taylor_slope(q0)["inverted"]) * q_deviation_inverted(spec, q0, stage="origin")
    rhs = (
        math.sqrt(math.pi / 2)
        * spec.h4 ** (q0 / 4)
        * math.exp(-spec.h6 / 6)
        / math.gamma((q0 + 1) / 2)
    )
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_inverted_deviation_example():
    got = q_deviation_inverted(inv_eps(60.0), 1)
    assert got == pytest.approx(math.sqrt(2 / math.pi) * 2 * math.sqrt(30) * math.exp(-10), rel=1e-12)


@pytest.mark.parametrize("x", [60.0, 150.0])
def test_inverted_deviation_level_ratio(x):
    spec = inv_eps(x)
    ratio = q_deviation_inverted(spec, 3) / q_deviation_inverted(spec, 1)
    assert ratio == pytest.approx(4 * x / 2, rel=1e-12)


def test_inverted_deviation_exponential_dominance():
    a, b = q_deviation_inverted(inv_eps(60.0), 1), q_deviation_inverted(inv_eps(120.0), 1)
    assert b / a == pytest.approx(math.exp(-10) * math.sqrt(2), rel=1e-12)


def test_width_ground_state():
    spec = inv(25.0, 2.0)
    eps = spec.h6 / (2 * spec.c2)
    want = 2 * spec.h2 * math.sqrt(eps) * math.exp(-spec.h6 / (6 * spec.c2)) / math.sqrt(2 * math.pi)
    assert width_closed_form(spec, 1) == pytest.approx(want, rel=1e-12)
    assert complex_eigenvalue(spec, 1, order=1).imaginary_part == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("q0", [1, 3, 5])
def test_width_pipeline_matches_closed_form(q0):
    spec = inv(80.0)
    assert complex_eigenvalue(spec, q0, order=1).imaginary_part == pytest.approx(
        width_closed_form(spec, q0), rel=1e-12
    )


def test_complex_eigenvalue_real_part_and_metadata():
    spec = inv(400.0, 1.0)
    r = complex_eigenvalue(spec, 3, order=1)
    assert r.E0 == pytest.approx(1.5 * spec.h2, rel=1e-15)
    assert r.splitting is None
    assert r.metadata["bender_wu"] == {"K": 1, "epsilon": spec.h6 / 2}
    assert r.metadata["sign"] == "+/-"
    r2 = complex_eigenvalue(spec, 3, order=2)
    assert r2.E0 == pytest.approx(1.5 * spec.h2 - 0.75 * 10 / spec.h4, rel=1e-15)


# -- double well: constants and routes -------------------------------------------------


@given(
    st.floats(min_value=2.0, max_value=2000.0),
    st.floats(min_value=0.05, max_value=20.0),
    st.sampled_from([1, 3, 5, 7, 9]),
)
def test_prefactor_identity_and_exponent_ratio(h4, c2, q):
    spec = dw(h4, c2)
    lhs, rhs = prefactor_identity(spec, q)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
    local, full = exponent_pair(spec)
    assert local == pytest.approx(spec.h6 / (4 * SQRT2 * c2), rel=1e-12)
    assert local / full == pytest.approx(1.5, rel=1e-12)


def test_prefactor_identity_symbolic_point():
    lhs, rhs = prefactor_identity(dw(16.0, 2.0), 3)
    assert lhs == pytest.approx(rhs, rel=1e-14)


@pytest.mark.parametrize("q", [1, 3, 5])
def test_gamma_ratio_two_routes(q):
    mc = matching_constants_double(dw(16.0, 2.0), q)
    assert mc.ratios["gamma/gamma_bar"] == pytest.approx(mc.ratios["gamma/gamma_bar[product]"], rel=1e-12)


@pytest.mark.parametrize("q0", [1, 3, 5])
def test_wkb_route_equals_minimum_route(q0):
    spec = dw(16.0)
    assert q_deviation_double(spec, q0, "wkb") == pytest.approx(q_deviation_double(spec, q0, "minimum"), rel=1e-12)


def test_origin_route_ground_state():
    spec = dw(30.0, 1.5)
    x = spec.h6 / (2 * spec.c2)
    want = 4 * math.sqrt(1 / (2 * math.pi)) * 2 * math.sqrt(x) * 2**-0.25 * math.exp(-spec.h6 / (6 * SQRT2 * spec.c2))
    assert q_deviation_double(spec, 1, "origin") == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("q0", [1, 3, 5])
def test_routes_differ_only_in_exponent(q0):
    spec = dw(20.0, 1.0)
    local, full = exponent_pair(spec)
    ratio = q_deviation_double(spec, q0, "minimum") / q_deviation_double(spec, q0, "origin")
    assert ratio == pytest.approx(math.exp(full - local), rel=1e-12)


def test_unknown_route():
    with pytest.raises(ValueError):
        q_deviation_double(dw(16.0), 1, "elsewhere")


# -- splitting ---------------------------------------------------------------------------


def test_ground_state_splitting_closed_form():
    spec = dw(25.0, 1.0)
    want = 2**2.25 * spec.h2 * math.sqrt(spec.h6 / spec.c2) * math.exp(-spec.h6 / (6 * SQRT2 * spec.c2)) / math.sqrt(math.pi)
    assert splitting_closed_form(spec, 1) == pytest.approx(want, rel=1e-12)
    assert level_splitting(spec, 1).splitting == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("q0", [1, 3, 5])
def test_mu_lambda_parametrisation(q0):
    mu, lam = 1.0, 0.1
    one = dw(2 * mu**2, lam / 2, Convention.ONE)
    half, _ = map_convention(one, Convention.HALF)
    ml = splitting_mu_lambda(mu, lam, q0)
    assert ml == pytest.approx(splitting_mass_one(one, q0), rel=1e-12)
    assert level_splitting(one, q0).splitting == pytest.approx(ml, rel=1e-12)
    assert splitting_closed_form(half, q0) == pytest.approx(2 * ml, rel=1e-12)


def test_mu_lambda_prefactor():
    mu, lam, q0 = 1.3, 0.2, 3
    pref = 2 ** (q0 + 2) * mu * (4 * mu**3 / lam) ** (q0 / 2) / (math.sqrt(math.pi) * 2 ** (q0 / 4) * 1.0)
    assert splitting_mu_lambda(mu, lam, q0) == pytest.approx(pref * math.exp(-math.sqrt(8) * mu**3 / (3 * lam)), rel=1e-12)


@pytest.mark.parametrize("q0", [1, 3, 5])
def test_splitting_decreases_with_barrier(q0):
    prev = math.inf
    for x in (20.0, 40.0, 80.0, 160.0, 320.0):
        s = level_splitting(dw(x ** (2 / 3)), q0).splitting
        assert 0 < s < prev
        prev = s


def test_delta_wkb_is_half_splitting():
    spec = dw(30.0)
    r = level_splitting(spec, 3)
    assert r.metadata["delta_wkb"] == pytest.approx(0.5 * r.splitting, rel=1e-15)


# -- origin WKB values ---------------------------------------------------------------------


@pytest.mark.parametrize("q", [1, 3, 5])
def test_origin_wkb_ratio(q):
    spec = dw(16.0)
    v = wkb_origin_values(spec, q)
    origin = matching_constants_double(spec, q).ratios["gamma/gamma_bar[origin]"]
    assert v.y / v.y_bar == pytest.approx(origin, rel=1e-12)
    assert v.y_prime / v.y_bar_prime == pytest.approx(-v.y / v.y_bar, rel=1e-12)


@pytest.mark.parametrize("q0", [1, 3, 5])
def test_splitting_from_origin_values(q0):
    spec = dw(40.0)
    assert splitting_from_origin_values(spec, q0) == pytest.approx(splitting_closed_form(spec, q0), rel=1e-12)
    assert delta_wkb(spec, q0) == pytest.approx(0.5 * splitting_closed_form(spec, q0), rel=1e-12)
    # the series slope differs from h^2/sqrt2 only by truncation terms
    hi = splitting_from_origin_values(spec, q0, order=3)
    assert hi == pytest.approx(splitting_closed_form(spec, q0), rel=3 * (3 * q0 * q0 + 1) / spec.h6)


# -- Furry factor ----------------------------------------------------------------------------


def test_furry_factor_values():
    assert furry_factor(0) == pytest.approx(math.sqrt(math.pi / math.e), rel=1e-14)
    assert furry_factor(0, two_pi=True) == pytest.approx(2 * math.pi / math.sqrt(2 * math.e), rel=1e-14)
    assert furry_factor(0, two_pi=True) == pytest.approx(2.6947, abs=1e-4)
    assert abs(furry_factor(10) - 1) < 0.01


def test_furry_factor_monotone_to_one():
    vals = [furry_factor(n) for n in range(21)]
    assert all(a > b > 1 for a, b in zip(vals, vals[1:]))
    assert furry_factor(2000) == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(ValueError):
        furry_factor(-1)


# -- Bohr-Sommerfeld ------------------------------------------------------------------------


def test_bohr_sommerfeld_residual_shrinks():
    res = [abs(wkb_quantization_residual(dw(h4), 1.0)) for h4 in (16.0, 64.0, 256.0)]
    assert res[0] > res[1] > res[2]
    hs = [2.0, 2 * SQRT2, 4.0]
    slope = math.log(res[0] / res[2]) / math.log(hs[2] / hs[0])
    assert slope >= 1.0


@pytest.mark.parametrize("q", [1.0, 3.0, 5.0])
def test_bohr_sommerfeld_harmonic_exact(q):
    assert abs(wkb_quantization_residual(dw(256.0), q, profile="harmonic")) < 1e-10


# -- parity conditions --------------------------------------------------------------------


@pytest.mark.parametrize("q0", [1, 5, 9])
def test_even_branch_vanishes(q0):
    b = branch_conditions(q0)
    assert abs(b["inverted_even"]) < 1e-14
    assert abs(b["inverted_odd"]) == pytest.approx(1.0)


@pytest.mark.parametrize("q0", [3, 7, 11])
def test_odd_branch_vanishes(q0):
    b = branch_conditions(q0)
    assert abs(b["inverted_odd"]) < 1e-14
    assert abs(b["inverted_even"]) == pytest.approx(1.0)


@pytest.mark.parametrize("q0", [1, 3, 5, 7, 9, 11])
def test_taylor_slope_matches_finite_difference(q0):
    h = 1e-6
    b_hi, b_lo = branch_conditions(q0 + h), branch_conditions(q0 - h)
    key = "inverted_even" if q0 % 4 == 1 else "inverted_odd"
    fd = (b_hi[key] - b_lo[key]) / (2 * h)
    assert taylor_slope(q0)["inverted"] == pytest.approx(fd, rel=1e-8)
    assert abs(taylor_slope(q0)["inverted"]) == pytest.approx(math.pi / 4)


# -- leading wavefunctions ------------------------------------------------------------------


def test_double_a_at_origin():
    spec = dw(100.0)
    zp = landmarks(spec).z_plus
    for kind in ("A", "A_bar"):
        assert eval_wavefunction_leading(spec, 1.0, 0.0, kind).value == pytest.approx(1 / zp, rel=1e-14)


@pytest.mark.parametrize("q", [1.0, 3.0])
def test_parity_combinations(q):
    spec = dw(100.0)
    assert eval_wavefunction_leading(spec, q, 0.0, "odd").value == 0.0
    dz = 1e-6
    e_hi = eval_wavefunction_leading(spec, q, dz, "even").value
    e_lo = eval_wavefunction_leading(spec, q, -dz, "even").value
    assert e_hi == pytest.approx(e_lo, rel=1e-12)
    o_hi = eval_wavefunction_leading(spec, q, dz, "odd").value
    o_lo = eval_wavefunction_leading(spec, q, -dz, "odd").value
    assert o_hi == pytest.approx(-o_lo, rel=1e-12)


@pytest.mark.parametrize("h4, q, tol", [(1e4, 1, 0.01), (1e4, 3, 0.01), (1e6, 5, 0.01)])
def test_double_branches_match_near_minimum(h4, q, tol):
    spec = dw(h4)
    lm = landmarks(spec)
    z = lm.z_plus + 5 / math.sqrt(lm.h_plus_sq)
    a = eval_wavefunction_leading(spec, q, z, "A", form="local")
    b = eval_wavefunction_leading(spec, q, z, "B")
    assert a.in_domain and b.in_domain
    alpha_log = matching_constants_double(spec, q).logs["alpha"]
    assert abs(math.exp(a.log_abs - b.log_abs + alpha_log) - 1) < tol


@pytest.mark.parametrize("q", [1, 3])
def test_inverted_branches_match_near_origin(q):
    spec = inv(1e4)
    z = 5 / spec.h
    a = eval_wavefunction_leading(spec, q, z, "A")
    b = eval_wavefunction_leading(spec, q, z, "B")
    alpha_log = matching_constants_inverted(spec, q).logs["alpha"]
    assert abs(math.exp(a.log_abs - b.log_abs + alpha_log) - 1) < 1e-3


def test_domain_flag():
    spec = dw(100.0)
    lm = landmarks(spec)
    z = lm.z_plus + 0.5 / math.sqrt(lm.h_plus_sq)
    assert not eval_wavefunction_leading(spec, 1.0, z, "A").in_domain
    with pytest.raises(ValueError):
        eval_wavefunction_leading(spec, 1.0, 0.0, "C")


# -- result record -------------------------------------------------------------------------


def test_spectral_result_validation():
    with pytest.raises(ValueError):
        SpectralResult(1, 1.0, 0.1, Convention.HALF, 2, imaginary_part=1.0, splitting=1.0)
    with pytest.raises(ValueError):
        SpectralResult(1, 1.0, 0.1, Convention.HALF, 2, splitting=0.0)


@pytest.mark.parametrize("q0", [0, 2, -1])
def test_even_or_nonpositive_q0_rejected(q0):
    with pytest.raises(ValueError):
        level_splitting(dw(16.0), q0)
