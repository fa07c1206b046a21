"""Matching constants, tunneling deviations q - q0, widths and level splittings.

All results are leading order: the [1 + O(1/h^2)] factors that multiply every
matching constant are dropped.  Complex phases are never carried through
arithmetic.  A magnitude is returned together with a phase expressed in units
of pi (value = magnitude * exp(i*pi*phase)), or with a sign label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import integrate

from .model import Case, Convention, DomainError, LevelIndex, PotentialSpec, landmarks, map_convention
from .series import energy_series
from .specfun import RegimeError, barrier_moduli, factorial, log_gamma, rfactorial

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(math.pi)


def _exp(x: float) -> float:
    # exp that saturates instead of raising on overflow
    return math.exp(x) if x < 709.0 else math.inf


def _log_factorial(x: float) -> float:
    return log_gamma(x + 1.0)


# -- turning points -------------------------------------------------------------


@dataclass(frozen=True)
class TurningPoints:
    z0: float
    z1: float


def turning_points(spec: PotentialSpec, q: float) -> TurningPoints:
    """Closed-form turning points at the energy level labelled by q."""
    if spec.case is Case.DOUBLE_WELL:
        _, u = barrier_moduli(spec, q)
        if u >= 1.0:
            raise RegimeError(f"u = {u:.4g} >= 1: turning points merge with the barrier top")
        h, c = spec.h, spec.c
        root = (2.0 * q * q) ** 0.25 / h
        # the cubic term of V about z+ pushes the inner point further in
        z0 = spec.h2 / (2.0 * c) - root - SQRT2 * c * q / spec.h4
        z1 = spec.h2 / (2.0 * c) + root
        return TurningPoints(z0, z1)
    if spec.case is Case.INVERTED:
        ratio = spec.c2 / spec.h6
        if 2.0 * q * ratio >= 0.5:
            raise RegimeError("level too close to the hump for the large-h^2 turning points")
        z1 = spec.h2 / math.sqrt(2.0 * spec.c2) * (1.0 - 2.0 * q * ratio)
        z0 = math.sqrt(2.0 * q) / spec.h
        return TurningPoints(z0, z1)
    raise DomainError("turning points are defined for the double and inverted wells")


# -- matching constants -----------------------------------------------------------


@dataclass(frozen=True)
class MatchingConstants:
    """Leading-order proportionality factors between solution branches.

    ``phases`` maps a constant's name to its phase in units of pi; names not in
    the map are real and positive.  ``logs`` holds natural logarithms of the
    magnitudes, which stay finite where the magnitudes over- or underflow.
    """

    alpha: float
    alpha_bar: float
    beta: float | None = None
    beta_bar: float | None = None
    gamma: float | None = None
    gamma_bar: float | None = None
    ratios: dict[str, float] = field(default_factory=dict)
    phases: dict[str, float] = field(default_factory=dict)
    logs: dict[str, float] = field(default_factory=dict)
    truncation: str = "leading order; [1 + O(1/h^2)] factors dropped"


def _log_alpha_inverted(spec: PotentialSpec, q: float) -> float:
    return (
        (q - 1.0) / 4.0 * math.log(spec.h2)
        - spec.h6 / (12.0 * spec.c2)
        - _log_factorial((q - 1.0) / 4.0)
        - (q - 1.0) / 4.0 * math.log(2.0)
    )


def matching_constants_inverted(spec: PotentialSpec, q: float) -> MatchingConstants:
    spec.require(Case.INVERTED)
    h2, c2 = spec.h2, spec.c2
    log_alpha = _log_alpha_inverted(spec, q)
    # alpha-bar carries (-h^2)^{-(q+1)/4} and 1/[-(q+1)/4]!; the latter may vanish.
    inv_fact = rfactorial(-(q + 1.0) / 4.0)
    log_abar_rest = (
        -(q + 1.0) / 4.0 * math.log(h2) + spec.h6 / (12.0 * c2) + (q + 1.0) / 4.0 * math.log(2.0)
    )
    alpha_bar = abs(inv_fact) * _exp(log_abar_rest)
    abar_phase = -(q + 1.0) / 4.0 + (1.0 if inv_fact < 0 else 0.0)

    log_beta = 0.5 * math.log(h2 / 2.0) + q / 2.0 * math.log(2.0 * h2 / math.sqrt(2.0 * c2))
    log_beta_bar = 0.5 * math.log(h2 / 2.0) - q / 2.0 * math.log(2.0 * h2 / math.sqrt(2.0 * c2))
    ratio_beta = q * math.log(2.0 * h2 / math.sqrt(2.0 * c2))
    return MatchingConstants(
        alpha=_exp(log_alpha),
        alpha_bar=alpha_bar,
        beta=_exp(log_beta),
        beta_bar=_exp(log_beta_bar),
        ratios={"beta/beta_bar": _exp(ratio_beta)},
        phases={
            "alpha_bar": abar_phase,
            # [-h^2/2]^{1/2} [-1]^{-q/2}
            "beta_bar": 0.5 - q / 2.0,
            "beta/beta_bar": q / 2.0 - 0.5,
        },
        logs={"alpha": log_alpha, "beta": log_beta, "beta_bar": log_beta_bar, "beta/beta_bar": ratio_beta},
    )


def _double_scales(spec: PotentialSpec) -> tuple[float, float, float]:
    lm = landmarks(spec)
    return lm.h_plus_sq, lm.z_plus, 0.25 * lm.h_plus_sq * lm.z_plus**2


def matching_constants_double(spec: PotentialSpec, q: float) -> MatchingConstants:
    spec.require(Case.DOUBLE_WELL)
    hp2, zp, quarter = _double_scales(spec)
    log_hp2 = math.log(hp2)
    log_2zp = math.log(2.0 * zp)

    log_alpha = (
        (q - 1.0) / 4.0 * log_hp2
        + (q + 1.0) / 2.0 * log_2zp
        - quarter
        - (q - 1.0) / 4.0 * math.log(2.0)
        - _log_factorial((q - 1.0) / 4.0)
    )
    inv_fact = rfactorial(-(q + 1.0) / 4.0)
    log_abar_rest = (
        (q + 1.0) / 4.0 * math.log(2.0) + quarter - (q - 1.0) / 2.0 * log_2zp - (q + 1.0) / 4.0 * log_hp2
    )
    alpha_bar = abs(inv_fact) * _exp(log_abar_rest)

    # gamma and gamma-bar are evaluated independently so their ratio is a
    # genuine second route to the closed form below.
    log_gamma_c = (
        math.log(2.0 * SQRT_PI)
        - 0.5 * log_hp2
        - _log_factorial((q - 1.0) / 4.0)
        + q / 4.0 * math.log(0.5 * hp2)
        + (q + 1.0) / 2.0 * log_2zp
        - quarter
    )
    log_gamma_bar = (
        _log_factorial((q - 3.0) / 4.0)
        - math.log(SQRT_PI)
        - 0.5 * log_hp2
        - q / 4.0 * math.log(0.5 * hp2)
        - (q - 1.0) / 2.0 * log_2zp
        + quarter
    )
    log_ratio_min = (
        0.5 * math.log(2.0 * math.pi)
        + q / 2.0 * log_hp2
        + q * log_2zp
        - 2.0 * quarter
        - _log_factorial((q - 1.0) / 2.0)
    )
    log_ratio_origin = (
        0.5 * math.log(2.0 * math.pi)
        + q / 2.0 * math.log(2.0)
        + q / 2.0 * math.log(2.0 * spec.h6 / (2.0**1.5 * spec.c2))
        - spec.h6 / (6.0 * SQRT2 * spec.c2)
        - _log_factorial((q - 1.0) / 2.0)
    )
    return MatchingConstants(
        alpha=_exp(log_alpha),
        alpha_bar=alpha_bar,
        gamma=_exp(log_gamma_c),
        gamma_bar=_exp(log_gamma_bar),
        ratios={
            "gamma/gamma_bar": _exp(log_ratio_min),
            "gamma/gamma_bar[origin]": _exp(log_ratio_origin),
            "gamma/gamma_bar[product]": _exp(log_gamma_c - log_gamma_bar),
        },
        phases={"alpha_bar": -(q + 1.0) / 4.0 + (1.0 if inv_fact < 0 else 0.0)},
        logs={
            "alpha": log_alpha,
            "gamma": log_gamma_c,
            "gamma_bar": log_gamma_bar,
            "gamma/gamma_bar": log_ratio_min,
            "gamma/gamma_bar[origin]": log_ratio_origin,
            "gamma/gamma_bar[product]": log_gamma_c - log_gamma_bar,
        },
    )


def prefactor_identity(spec: PotentialSpec, q: float) -> tuple[float, float]:
    """Both sides of (h+^2)^{q/2} (2 z+)^q = 2^q (h^6 / 2^{3/2} c^2)^{q/2}, in logs."""
    hp2, zp, _ = _double_scales(spec)
    lhs = q / 2.0 * math.log(hp2) + q * math.log(2.0 * zp)
    rhs = q * math.log(2.0) + q / 2.0 * math.log(spec.h6 / (2.0**1.5 * spec.c2))
    return lhs, rhs


def exponent_pair(spec: PotentialSpec) -> tuple[float, float]:
    """(h+^2 z+^2 / 2, full barrier action h^6 / (6 sqrt2 c^2))."""
    hp2, zp, _ = _double_scales(spec)
    return 0.5 * hp2 * zp * zp, spec.h6 / (6.0 * SQRT2 * spec.c2)


# -- inverted well: q - q0 and the complex eigenvalue --------------------------------


def _origin_deviation(log_power: float, q0: int, action: float) -> float:
    """Magnitude (2 sqrt2 / sqrt pi) P / [(q0-1)/2]! e^{-action} with log P supplied."""
    log_val = (
        math.log(2.0 * SQRT2 / SQRT_PI) + log_power - _log_factorial((q0 - 1.0) / 2.0) - action
    )
    return _exp(log_val)


def q_deviation_inverted(spec: PotentialSpec, q0: int, stage: str = "infinity") -> float:
    """|q - q0| for the inverted well.

    stage="origin" keeps only the origin boundary condition, with (h^2)^{q0/2}
    as the power; stage="infinity" substitutes for that power the value
    2^{q0-1} (h^6/2c^2)^{q0/2} forced by the outgoing-wave condition.  The
    result is i times a real magnitude, with an undetermined overall sign.
    """
    spec.require(Case.INVERTED)
    LevelIndex.from_q0(q0)
    action = spec.h6 / (6.0 * spec.c2)
    if stage == "origin":
        log_power = q0 / 2.0 * math.log(spec.h2)
    elif stage == "infinity":
        log_power = (q0 - 1.0) * math.log(2.0) + q0 / 2.0 * math.log(spec.h6 / (2.0 * spec.c2))
    else:
        raise ValueError(f"unknown stage {stage!r}")
    return _origin_deviation(log_power, q0, action)


@dataclass(frozen=True)
class SpectralResult:
    q0: int
    E0: float
    q_deviation: float
    convention: Convention
    truncation_order: int
    imaginary_part: float | None = None
    splitting: float | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.splitting is not None and self.imaginary_part is not None:
            raise ValueError("a result carries either a splitting or a width, not both")
        if self.splitting is not None and not self.splitting > 0:
            raise ValueError("splitting must be positive")


def _slope(case: Case, q0: int, spec: PotentialSpec, order: int) -> float:
    if order <= 1:
        return spec.h2 / 2.0 if case is Case.INVERTED else spec.h2 / SQRT2
    return energy_series(case, order).derivative_q().value(q0, spec.h4, spec.c2)


def complex_eigenvalue(spec: PotentialSpec, q0: int, order: int = 2) -> SpectralResult:
    spec.require(Case.INVERTED)
    level = LevelIndex.from_q0(q0)
    e0 = energy_series(Case.INVERTED, order).value(q0, spec.h4, spec.c2)
    dq = q_deviation_inverted(spec, q0)
    im = dq * _slope(Case.INVERTED, q0, spec, order)
    return SpectralResult(
        q0=q0,
        E0=e0,
        q_deviation=dq,
        convention=spec.convention,
        truncation_order=order,
        imaginary_part=im,
        metadata={
            "sign": "+/-",
            "q_deviation_phase": "+/- i",
            "exponent": spec.h6 / (6.0 * spec.c2),
            "bender_wu": {"K": level.n, "epsilon": spec.h6 / (2.0 * spec.c2)},
            "level": "leading order",
        },
    )


def width_closed_form(spec: PotentialSpec, q0: int) -> float:
    """|Im E| written out directly, for cross-checking the assembled pipeline."""
    eps = spec.h6 / (2.0 * spec.c2)
    log_val = (
        q0 * math.log(2.0)
        + math.log(spec.h2)
        + q0 / 2.0 * math.log(eps)
        - eps / 3.0
        - 0.5 * math.log(2.0 * math.pi)
        - _log_factorial((q0 - 1.0) / 2.0)
    )
    return _exp(log_val)


def branch_conditions(q: float) -> dict[str, float]:
    """Left-hand sides of the origin and minimum parity conditions.

    The inverted-well pair vanishes at q = 1, 5, 9, ... (even) and 3, 7, 11, ...
    (odd); the double-well pair the other way round in terms of sin/cos of
    pi (q+1)/4.
    """
    return {
        "inverted_even": math.sin(math.pi * (q + 3.0) / 4.0),
        "inverted_odd": math.cos(math.pi * (q + 3.0) / 4.0),
        "double_sin": math.sin(math.pi * (q + 1.0) / 4.0),
        "double_cos": math.cos(math.pi * (q + 1.0) / 4.0),
    }


def taylor_slope(q0: int) -> dict[str, float]:
    """Derivatives in q, at q0, of whichever condition vanishes there."""
    LevelIndex.from_q0(q0)
    quarter = math.pi / 4.0
    if q0 % 4 == 1:
        return {
            "inverted": quarter * math.cos(quarter * (q0 + 3)),
            "double": -quarter * math.sin(quarter * (q0 + 1)),
        }
    return {
        "inverted": -quarter * math.sin(quarter * (q0 + 3)),
        "double": quarter * math.cos(quarter * (q0 + 1)),
    }


# -- double well: q - q0 and the splitting -----------------------------------------


def q_deviation_double(spec: PotentialSpec, q0: int, route: str = "origin") -> float:
    """|q - q0| for the double well along one of three routes.

    minimum: conditions imposed at the well minimum with the local exponent
    h+^2 z+^2 / 2.  wkb: 2 gamma / (pi gamma-bar) with gamma and gamma-bar
    evaluated separately.  origin: conditions imposed at z = 0, which replaces
    the local exponent by the full barrier action.
    """
    spec.require(Case.DOUBLE_WELL)
    LevelIndex.from_q0(q0)
    hp2, zp, quarter = _double_scales(spec)
    if route == "minimum":
        log_val = (
            math.log(4.0 / math.sqrt(2.0 * math.pi))
            + q0 / 2.0 * math.log(hp2)
            + q0 * math.log(2.0 * zp)
            - 2.0 * quarter
            - _log_factorial((q0 - 1.0) / 2.0)
        )
        return _exp(log_val)
    if route == "wkb":
        mc = matching_constants_double(spec, q0)
        return _exp(math.log(2.0 / math.pi) + mc.logs["gamma"] - mc.logs["gamma_bar"])
    if route == "origin":
        log_val = (
            math.log(4.0 / math.sqrt(2.0 * math.pi))
            + q0 * math.log(2.0)
            + q0 / 2.0 * math.log(spec.h6 / (2.0 * spec.c2))
            - q0 / 4.0 * math.log(2.0)
            - spec.h6 / (6.0 * SQRT2 * spec.c2)
            - _log_factorial((q0 - 1.0) / 2.0)
        )
        return _exp(log_val)
    raise ValueError(f"unknown route {route!r}")


def splitting_closed_form(spec: PotentialSpec, q0: int) -> float:
    """E_- - E_+ in the mass-1/2 convention, written out as a single closed form."""
    spec.require(Case.DOUBLE_WELL)
    log_val = (
        (q0 + 2.0) * math.log(2.0)
        + math.log(spec.h2)
        - 0.5 * math.log(math.pi)
        - q0 / 4.0 * math.log(2.0)
        - _log_factorial((q0 - 1.0) / 2.0)
        + q0 / 2.0 * math.log(spec.h6 / (2.0 * spec.c2))
        - spec.h6 / (6.0 * SQRT2 * spec.c2)
    )
    return _exp(log_val)


def splitting_mass_one(spec: PotentialSpec, q0: int) -> float:
    """Splitting for a spec whose (h4, c2) are given in the mass-1 convention."""
    spec.require(Case.DOUBLE_WELL)
    log_val = (
        q0 * math.log(2.0)
        + 0.5 * math.log(2.0 / math.pi)
        + math.log(2.0 * spec.h2)
        - q0 / 4.0 * math.log(2.0)
        - _log_factorial((q0 - 1.0) / 2.0)
        + q0 / 2.0 * math.log(spec.h6 / (SQRT2 * spec.c2))
        - spec.h6 / (6.0 * spec.c2)
    )
    return _exp(log_val)


def splitting_mu_lambda(mu: float, lam: float, q0: int) -> float:
    """Splitting for V = (lam/4)(z^2 - mu^2/lam)^2 with unit mass."""
    log_val = (
        (q0 + 2.0) * math.log(2.0)
        + math.log(mu)
        - 0.5 * math.log(math.pi)
        - q0 / 4.0 * math.log(2.0)
        - _log_factorial((q0 - 1.0) / 2.0)
        + q0 / 2.0 * math.log(4.0 * mu**3 / lam)
        - math.sqrt(8.0) * mu**3 / (3.0 * lam)
    )
    return _exp(log_val)


def level_splitting(spec: PotentialSpec, q0: int, order: int = 2) -> SpectralResult:
    """Energy of the pair centre and the splitting E_- - E_+ of level q0.

    The splitting is 2 |q - q0| dE/dq with dE/dq = h^2/sqrt2 at leading order,
    which reproduces the closed form of :func:`splitting_closed_form`.  For a
    spec in the mass-1 convention the parameters are mapped to mass 1/2 first
    and the energies mapped back.
    """
    spec.require(Case.DOUBLE_WELL)
    LevelIndex.from_q0(q0)
    half, factor = map_convention(spec, Convention.HALF)
    dq = q_deviation_double(half, q0, "origin")
    split_half = 2.0 * dq * half.h2 / SQRT2
    e0_half = energy_series(Case.DOUBLE_WELL, order).value(q0, half.h4, half.c2)
    return SpectralResult(
        q0=q0,
        E0=e0_half / factor,
        q_deviation=dq,
        convention=spec.convention,
        truncation_order=order,
        splitting=split_half / factor,
        metadata={
            "exponent": half.h6 / (6.0 * SQRT2 * half.c2),
            "delta_wkb": 0.5 * split_half / factor,
            "sign": "E_+ below E_-",
            "level": "leading order",
        },
    )


def furry_factor(n: int, two_pi: bool = False) -> float:
    """Stirling correction between WKB and perturbative splittings.

    f_n = sqrt(2 pi) (n + 1/2)^{n + 1/2} e^{-(n + 1/2)} / n!, which tends to 1.
    With ``two_pi=True`` the normalisation 2 pi replaces sqrt(2 pi), so the
    value tends to sqrt(2 pi) instead.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    m = n + 0.5
    norm = math.log(2.0 * math.pi) if two_pi else 0.5 * math.log(2.0 * math.pi)
    return math.exp(norm + m * math.log(m) - m - _log_factorial(n))


# -- WKB cross-checks ------------------------------------------------------------------


def wkb_quantization_residual(spec: PotentialSpec, q: float, profile: str = "full") -> float:
    """Half-well phase integral from the inner turning point to z+, minus q pi / 4.

    profile="harmonic" replaces U(z) by (z - z+)^2, for which the residual is
    zero up to quadrature error.
    """
    spec.require(Case.DOUBLE_WELL)
    hp2, zp, _ = _double_scales(spec)
    energy = 0.5 * q * hp2
    if profile == "full":
        shift = math.sqrt(q * hp2) / spec.c
        inner2 = zp * zp - shift
        if inner2 <= 0.0:
            raise RegimeError("inner turning point passes the barrier top")
        z_turn = math.sqrt(inner2)

        def kinetic(z: float) -> float:
            d = z * z - zp * zp
            return energy - 0.5 * spec.c2 * d * d

    elif profile == "harmonic":
        z_turn = zp - math.sqrt(2.0 * q / hp2)

        def kinetic(z: float) -> float:
            return energy - 0.25 * hp2 * hp2 * (z - zp) ** 2

    else:
        raise ValueError(f"unknown profile {profile!r}")

    # z = z_turn + s^2 removes the square-root behaviour at the turning point.
    smax = math.sqrt(zp - z_turn)

    def integrand(s: float) -> float:
        return 2.0 * s * math.sqrt(max(kinetic(z_turn + s * s), 0.0))

    value, err = integrate.quad(integrand, 0.0, smax, epsabs=1e-13, epsrel=1e-12, limit=200)
    if not err < 1e-8 * max(1.0, abs(value)):
        raise ArithmeticError(f"phase integral did not converge (error estimate {err:.3g})")
    return value - q * math.pi / 4.0


@dataclass(frozen=True)
class OriginWKB:
    y: float
    y_bar: float
    y_prime: float
    y_bar_prime: float
    log_ratio: float


def wkb_origin_values(spec: PotentialSpec, q: float) -> OriginWKB:
    """WKB solutions continued from the inner turning point to z = 0 (Stirling form)."""
    spec.require(Case.DOUBLE_WELL)
    x = spec.h6 / (SQRT2 * spec.c2)
    depth = spec.h4 * spec.h4 / (32.0 * spec.c2)
    action = spec.h6 / (12.0 * SQRT2 * spec.c2)
    log_root2pi = 0.5 * math.log(2.0 * math.pi)
    lf1 = _log_factorial((q - 1.0) / 4.0)
    lf3 = _log_factorial((q - 3.0) / 4.0)
    log_y = log_root2pi + q / 4.0 * math.log(x) - 0.25 * math.log(depth) - lf1 - action
    log_yb = -log_root2pi + lf3 - q / 4.0 * math.log(x) - 0.25 * math.log(depth) + action
    log_yp = 0.25 * math.log(depth) + log_root2pi + q / 4.0 * math.log(x) - lf1 - action
    log_ybp = 0.25 * math.log(depth) + lf3 - log_root2pi - q / 4.0 * math.log(x) + action
    sign3 = 1.0 if factorial((q - 3.0) / 4.0) > 0 else -1.0
    return OriginWKB(
        y=_exp(log_y),
        y_bar=sign3 * _exp(log_yb),
        y_prime=_exp(log_yp),
        y_bar_prime=-sign3 * _exp(log_ybp),
        log_ratio=log_y - log_yb,
    )


def splitting_from_origin_values(spec: PotentialSpec, q0: int, order: int = 1) -> float:
    """(4/pi) (dE/dq) y(0)/y-bar(0)."""
    vals = wkb_origin_values(spec, q0)
    return 4.0 / math.pi * _slope(Case.DOUBLE_WELL, q0, spec, order) * _exp(vals.log_ratio)


def delta_wkb(spec: PotentialSpec, q0: int, order: int = 1) -> float:
    """(1/pi) dE/d(n+1/2) y(0)/y-bar(0), which is half the origin-route splitting."""
    vals = wkb_origin_values(spec, q0)
    return 2.0 / math.pi * _slope(Case.DOUBLE_WELL, q0, spec, order) * _exp(vals.log_ratio)


# -- leading-order wavefunctions ----------------------------------------------------------


@dataclass(frozen=True)
class WaveValue:
    value: float
    in_domain: bool
    # log|value|, finite where ``value`` itself over- or underflows
    log_abs: float = math.nan


_KINDS = ("A", "A_bar", "B", "even", "odd")


def _log_double_a(spec: PotentialSpec, q: float, z: float, form: str) -> float:
    lm = landmarks(spec)
    zp = lm.z_plus
    amp = (q - 1.0) / 2.0 * math.log(abs(z - zp)) - (q + 1.0) / 2.0 * math.log(abs(z + zp))
    if form == "full":
        expo = -(1.0 / SQRT2) * (spec.c * z**3 / 3.0 - spec.h4 * z / (4.0 * spec.c))
    elif form == "local":
        hp2 = lm.h_plus_sq
        expo = 0.25 * hp2 * zp * zp - 0.25 * hp2 * (z - zp) ** 2
    else:
        raise ValueError(f"unknown form {form!r}")
    return amp + expo


def _log_inverted_a(spec: PotentialSpec, q: float, z: float, bar: bool) -> float:
    s = 1.0 - 2.0 * spec.c2 * z * z / spec.h4
    expo = spec.h6 / (12.0 * spec.c2) * max(s, 0.0) ** 1.5
    if bar:
        return -(q + 1.0) / 2.0 * math.log(abs(z)) - expo
    return (q - 1.0) / 2.0 * math.log(abs(z)) + expo


def _single(log_abs: float, in_domain: bool) -> WaveValue:
    return WaveValue(_exp(log_abs), in_domain, log_abs)


def _combine(la: float, lb: float, odd: bool, in_domain: bool) -> WaveValue:
    """(e^la +/- e^lb) / 2 without overflow."""
    hi, lo = max(la, lb), min(la, lb)
    if odd:
        if la == lb:
            return WaveValue(0.0, in_domain, -math.inf)
        sign = 1.0 if la > lb else -1.0
        log_abs = hi + math.log1p(-math.exp(lo - hi)) - math.log(2.0)
    else:
        sign = 1.0
        log_abs = hi + math.log1p(math.exp(lo - hi)) - math.log(2.0)
    return WaveValue(sign * _exp(log_abs), in_domain, log_abs)


def _b_leading(q: float, w: float, in_domain: bool) -> WaveValue:
    # D_nu(w) ~ w^nu e^{-w^2/4}, normalised by [(q-1)/4]! 2^{(q-1)/4}
    norm = rfactorial((q - 1.0) / 4.0)
    if norm == 0.0:
        return WaveValue(0.0, in_domain, -math.inf)
    log_abs = (q - 1.0) / 2.0 * math.log(w) - 0.25 * w * w + math.log(abs(norm)) - (q - 1.0) / 4.0 * math.log(2.0)
    return WaveValue(math.copysign(_exp(log_abs), norm), in_domain, log_abs)


def eval_wavefunction_leading(
    spec: PotentialSpec, q: float, z: float, kind: str, form: str = "full"
) -> WaveValue:
    """Leading-order value of one solution branch at a real point z.

    kind is one of A, A_bar, B, even, odd.  For the double well ``form``
    selects the exponential of the type-A branch: "full" integrates the exact
    barrier profile from the origin, "local" uses the quadratic profile about
    z+ that underlies the minimum matching constant.  Values outside the
    declared validity domain are still returned, flagged ``in_domain=False``.
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    spec.require(Case.DOUBLE_WELL, Case.INVERTED)
    if spec.case is Case.DOUBLE_WELL:
        lm = landmarks(spec)
        hp = math.sqrt(lm.h_plus_sq)
        if kind == "B":
            w = hp * (z - lm.z_plus)
            near = w >= 1.0 and abs(z - lm.z_plus) <= 0.5 * lm.z_plus
            return _b_leading(q, abs(w), near)
        away = min(abs(z - lm.z_plus), abs(z + lm.z_plus)) >= 1.0 / hp
        if kind == "A":
            return _single(_log_double_a(spec, q, z, form), away)
        if kind == "A_bar":
            return _single(_log_double_a(spec, q, -z, form), away)
        la, lb = _log_double_a(spec, q, z, form), _log_double_a(spec, q, -z, form)
        return _combine(la, lb, kind == "odd", away)

    tp = turning_points(spec, q)
    if kind == "B":
        w = spec.h * z
        near = w >= 1.0 and abs(z) <= 0.5 * tp.z1
        return _b_leading(q, abs(w), near)
    away = 1.0 / spec.h <= abs(z) < tp.z1
    if kind == "A":
        return _single(_log_inverted_a(spec, q, z, False), away)
    if kind == "A_bar":
        return _single(_log_inverted_a(spec, q, z, True), away)
    la, lb = _log_inverted_a(spec, q, z, False), _log_inverted_a(spec, q, z, True)
    return _combine(la, lb, kind == "odd", away)
