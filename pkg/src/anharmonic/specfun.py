"""Gamma kernel, parabolic-cylinder values at the origin and complete elliptic integrals.

Factorials follow the physics convention x! = Gamma(x + 1) and are allowed at
quarter-integer and negative non-integer arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Case, PotentialSpec


class PoleError(ArithmeticError):
    """Gamma evaluated at a nonpositive integer, or a ratio that diverges."""


class RegimeError(ValueError):
    """Parameters outside the asymptotic regime an expansion is built for."""


# Lanczos approximation, g = 7, nine coefficients (relative error ~1e-15).
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _lanczos_log(x: float) -> float:
    # ln Gamma(x) for x >= 0.5.
    x -= 1.0
    a = _LANCZOS[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(a)


def log_gamma(x: float) -> float:
    """ln|Gamma(x)|; raises PoleError at nonpositive integers."""
    if _is_pole(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x < 0.5:
        # Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.log(math.pi / abs(math.sin(math.pi * x))) - _lanczos_log(1.0 - x)
    return _lanczos_log(x)


def gamma_sign(x: float) -> int:
    if _is_pole(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x > 0:
        return 1
    return -1 if math.floor(x) % 2 else 1


def gamma(x: float) -> float:
    return gamma_sign(x) * math.exp(log_gamma(x))


def rgamma(x: float) -> float:
    """1/Gamma(x), exactly zero at the poles of Gamma."""
    if _is_pole(x):
        return 0.0
    return gamma_sign(x) * math.exp(-log_gamma(x))


def factorial(x: float) -> float:
    return gamma(x + 1.0)


def rfactorial(x: float) -> float:
    return rgamma(x + 1.0)


def factorial_ratio(a: float, b: float) -> float:
    """a!/b!; zero if b! is infinite, PoleError if only a! is."""
    if _is_pole(b + 1.0):
        if _is_pole(a + 1.0):
            raise PoleError(f"{a}!/{b}! is a ratio of two poles")
        return 0.0
    if _is_pole(a + 1.0):
        raise PoleError(f"{a}! is infinite")
    s = gamma_sign(a + 1.0) * gamma_sign(b + 1.0)
    return s * math.exp(log_gamma(a + 1.0) - log_gamma(b + 1.0))


def reflection_ratio(q: float) -> float:
    """[-(q+1)/4]! via (-z)!(z-1)! = pi / sin(pi z) with z = (q+1)/4."""
    s = math.sin(math.pi * (q + 1.0) / 4.0)
    other = (q - 3.0) / 4.0
    if _is_pole(other + 1.0):
        # Both sides of the reflection are singular; use the direct value.
        return factorial(-(q + 1.0) / 4.0)
    if abs(s) < 1e-15:
        raise PoleError(f"[-(q+1)/4]! is infinite at q={q}")
    return math.pi / (factorial(other) * s)


def pcf_origin(q: float) -> tuple[float, float]:
    """D_nu(0) and D_nu'(0) for nu = (q-1)/2."""
    sq = math.sqrt(math.pi)
    value = sq * 2.0 ** ((q - 1.0) / 4.0) * rfactorial(-(q + 1.0) / 4.0)
    slope = -sq * 2.0 ** ((q + 1.0) / 4.0) * rfactorial(-(q + 3.0) / 4.0)
    return value, slope


def pcf_origin_conjugate(q: float) -> float:
    """D_{-(q+1)/2}(0) in closed form."""
    return math.sqrt(math.pi) * 2.0 ** (-(q + 1.0) / 4.0) * rfactorial((q - 1.0) / 4.0)


@dataclass(frozen=True)
class OriginValues:
    b: float
    c_bar: float
    b_prime: float
    # The derivative of C-bar at 0 is purely imaginary: value = 1j * c_bar_prime.
    c_bar_prime: float
    c_bar_prime_imaginary: bool = True

    @property
    def ratio(self) -> float:
        return self.b / self.c_bar


def bq_cq_origin(q: float) -> OriginValues:
    """B_q, C-bar_q and their w-derivatives at w = 0.

    B_q is reached through D_{(q-1)/2}(0); C-bar_q through the circuit relation
    for D_{-(q+1)/2}(0), so the two values are computed along different routes.
    """
    d0, d0p = pcf_origin(q)
    norm_b = rfactorial((q - 1.0) / 4.0) * 2.0 ** (-(q - 1.0) / 4.0)
    b = d0 * norm_b
    b_prime = d0p * norm_b

    cos_term = math.cos(math.pi * (q - 1.0) / 4.0)
    if abs(cos_term) < 1e-15:
        d_conj = pcf_origin_conjugate(q)
    else:
        d_conj = math.sqrt(math.pi / 2.0) * d0 * rfactorial((q - 1.0) / 2.0) / cos_term
    minus_quarter = -(q + 1.0) / 4.0
    if _is_pole(minus_quarter + 1.0):
        raise PoleError(f"C-bar normalisation is singular at q={q}")
    norm_c = 2.0 ** ((q + 1.0) / 4.0) / factorial(minus_quarter)
    c_bar = d_conj * norm_c
    c_bar_prime = -math.sqrt(2.0 * math.pi) * rfactorial(minus_quarter) * rfactorial((q - 3.0) / 4.0)
    return OriginValues(b, c_bar, b_prime, c_bar_prime)


# -- complete elliptic integrals ----------------------------------------------------


def elliptic_KE(k2: float, kprime2: float | None = None) -> tuple[float, float]:
    """K(k) and E(k) by the arithmetic-geometric mean.

    ``kprime2`` may be passed when 1 - k^2 is known more accurately than the
    difference would give.
    """
    if kprime2 is None:
        kprime2 = 1.0 - k2
    if not (0.0 <= k2 < 1.0) or kprime2 <= 0.0:
        if k2 >= 1.0 or kprime2 <= 0.0:
            raise PoleError("K(k) diverges at k^2 = 1")
        raise ValueError(f"k^2 must lie in [0, 1), got {k2}")
    a, b = 1.0, math.sqrt(kprime2)
    c2_sum = 0.5 * k2
    power = 0.5
    for _ in range(64):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2.0
        c2_sum += power * c * c
        if abs(c) <= 1e-17 * a:
            break
    K = math.pi / (2.0 * a)
    return K, K * (1.0 - c2_sum)


def ke_small_kprime(kprime2: float) -> tuple[float, float]:
    """Logarithmic expansions of K and E for a small complementary modulus."""
    if not (0.0 < kprime2 <= 0.2):
        raise RegimeError(f"expansion needs 0 < k'^2 <= 0.2, got {kprime2}")
    L = math.log(4.0) - 0.5 * math.log(kprime2)
    K = L + 0.25 * (L - 1.0) * kprime2
    E = 1.0 + 0.5 * (L - 0.5) * kprime2 + (3.0 / 16.0) * (L - 13.0 / 12.0) * kprime2**2
    return K, E


@dataclass(frozen=True)
class EllipticData:
    G: float
    u: float
    k2: float
    kprime2: float
    a: float
    b: float
    value: float


def barrier_moduli(spec: PotentialSpec, q: float) -> tuple[float, float]:
    """G and u = G sqrt(2q) for the barrier integral."""
    spec.require(Case.DOUBLE_WELL)
    G = math.sqrt(8.0 * math.sqrt(2.0) * spec.c2 / spec.h6)
    return G, G * math.sqrt(2.0 * q)


def i2_exact(spec: PotentialSpec, q: float) -> EllipticData:
    G, u = barrier_moduli(spec, q)
    if u >= 1.0:
        raise RegimeError(f"u = {u:.4g} >= 1: the barrier integral leaves the elliptic regime")
    k2 = (1.0 - u) / (1.0 + u)
    kprime2 = 2.0 * u / (1.0 + u)
    K, E = elliptic_KE(k2, kprime2)
    value = 2.0 / (3.0 * G * G) * math.sqrt(1.0 + u) * (E - u * K)
    zp2 = spec.h4 / (4.0 * spec.c2)
    shift = math.sqrt(q) * math.sqrt(math.sqrt(2.0) * spec.h2) / spec.c
    return EllipticData(G, u, k2, kprime2, math.sqrt(zp2 + shift), math.sqrt(zp2 - shift), value)


def i2_expansion(spec: PotentialSpec, n: int) -> float:
    """Small-G expansion of the barrier integral (positive branch)."""
    q = 2 * n + 1
    G, u = barrier_moduli(spec, q)
    if u > 0.2 * (1.0 + 1e-12):
        raise RegimeError(f"u = {u:.4g} > 0.2: expansion not applicable")
    m = n + 0.5
    return 2.0 / (3.0 * G * G) + m * math.log(G / 4.0) + 0.5 * m * math.log(m) - 0.5 * m
