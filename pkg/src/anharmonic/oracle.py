"""Independent ground truth: a finite-difference eigensolver and exact perturbation theory.

The eigensolver discretises -y'' + V y = E y with second-order central
differences on [-L, L] with Dirichlet walls and locates eigenvalues by Sturm
sequence bisection.  An optional multiprecision pass (gmpy2) refines each
eigenvalue beyond the double-precision floor eps * ||T||, which matters when
the quantity of interest sits near machine precision.  Grid-spacing errors are
removed by Romberg extrapolation over the sequence N, 2N-1, 4N-3, ...
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from scipy import integrate
from scipy.linalg import solve_banded

from .model import Case, PotentialSpec, potential_value
from .series import AsymptoticSeries, QPolynomial, SeriesTerm
from .specfun import barrier_moduli

DEFAULT_RTOL = 1e-10
ENERGY_MARGIN = 20.0


def default_tolerance() -> float:
    """Relative bisection tolerance; ANHARMONIC_PRECISION overrides the default."""
    raw = os.environ.get("ANHARMONIC_PRECISION")
    if raw is None:
        return DEFAULT_RTOL
    value = float(raw)
    if not (0.0 < value < 1.0):
        raise ValueError(f"ANHARMONIC_PRECISION must lie in (0, 1), got {raw!r}")
    return value


class ConvergenceError(ArithmeticError):
    """Bisection stalled before reaching the requested tolerance."""


class UnresolvedError(ArithmeticError):
    """A splitting is not resolved above the solver tolerance."""

    def __init__(self, message: str, bound: float) -> None:
        super().__init__(message)
        self.bound = bound


@dataclass(frozen=True)
class GridConfig:
    half_width_L: float
    points_N: int
    boundary: str = "dirichlet"

    def __post_init__(self) -> None:
        if not self.half_width_L > 0:
            raise ValueError("half_width_L must be positive")
        if int(self.points_N) != self.points_N or self.points_N < 3:
            raise ValueError("points_N must be an integer >= 3")
        if self.boundary != "dirichlet":
            raise ValueError("only Dirichlet walls are supported")

    @property
    def dz(self) -> float:
        return 2.0 * self.half_width_L / (self.points_N - 1)

    @property
    def interior(self) -> int:
        return self.points_N - 2

    def refined(self) -> "GridConfig":
        """Same box with the spacing halved."""
        return GridConfig(self.half_width_L, 2 * self.points_N - 1, self.boundary)


@dataclass(frozen=True)
class OracleResult:
    eigenvalues: tuple[float, ...]
    config: GridConfig
    splitting_pairs: tuple[tuple[float, float], ...] = ()
    richardson_estimate: tuple[float, ...] | None = None
    parities: tuple[int, ...] = field(default=())


# -- operator and Sturm counts ----------------------------------------------------


def _diagonal(spec: PotentialSpec, cfg: GridConfig) -> list[float]:
    dz = cfg.dz
    L = cfg.half_width_L
    kin = 2.0 / (dz * dz)
    return [kin + potential_value(spec, -L + i * dz) for i in range(1, cfg.points_N - 1)]


def sturm_count(diag, off2, x) -> int:
    """Number of eigenvalues below x for a symmetric tridiagonal matrix.

    ``off2`` is the square of the (constant) off-diagonal.  Works for floats and
    for gmpy2 mpfr values alike.
    """
    count = 0
    d = diag[0] - x
    if d < 0:
        count += 1
    tiny = off2 * 1e-300 if isinstance(off2, float) else off2 * gmpy2.mpfr("1e-1000")
    for a in diag[1:]:
        if d == 0:
            d = tiny
        d = a - x - off2 / d
        if d < 0:
            count += 1
    return count


def _bisect(diag, off2, j: int, lo, hi, tol_fn, max_iter: int = 400):
    """Eigenvalue number j (0-based) inside a bracket with count(lo) <= j < count(hi)."""
    for _ in range(max_iter):
        mid = (lo + hi) / 2
        if hi - lo <= tol_fn(mid):
            return mid
        if mid == lo or mid == hi:
            raise ConvergenceError(f"bisection stalled on bracket [{lo}, {hi}] for level {j}")
        if sturm_count(diag, off2, mid) > j:
            hi = mid
        else:
            lo = mid
    raise ConvergenceError(f"bisection did not converge: bracket [{lo}, {hi}] for level {j}")


def _float_levels(diag: list[float], off2: float, k: int, rtol: float) -> list[float]:
    b = math.sqrt(off2)
    lo0 = min(diag) - 2.0 * b
    hi0 = max(diag) + 2.0 * b

    def tol(x: float) -> float:
        return rtol * max(1.0, abs(x))

    out: list[float] = []
    lo = lo0
    for j in range(k):
        # shrink the upper end geometrically above the previous level
        hi = hi0
        step = max(1.0, abs(lo))
        while True:
            trial = lo + step
            if trial >= hi0:
                break
            if sturm_count(diag, off2, trial) > j:
                hi = trial
                break
            step *= 2.0
        e = _bisect(diag, off2, j, lo, hi, tol)
        out.append(e)
        lo = e - 2.0 * tol(e)
    return out


def _diagonal_mp(spec: PotentialSpec, cfg: GridConfig) -> tuple[list, object]:
    # Built from scratch in the working precision: rounding the float diagonal
    # would leave an O(ulp(2/dz^2)) error that no bisection can remove.
    mpfr = gmpy2.mpfr
    L = mpfr(cfg.half_width_L)
    dz = 2 * L / (cfg.points_N - 1)
    kin = 2 / (dz * dz)
    s2 = -1 if spec.case is Case.DOUBLE_WELL else 1
    a2 = s2 * mpfr(spec.h4) / 4
    a4 = mpfr(spec.c2) / 2
    diag = []
    for i in range(1, cfg.points_N - 1):
        z2 = (-L + i * dz) ** 2
        diag.append(kin + a2 * z2 + a4 * z2 * z2)
    return diag, 1 / dz**4


def _mp_refine(spec: PotentialSpec, cfg: GridConfig, levels: list[float], bits: int, rtol: float) -> list:
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        dmp, o2 = _diagonal_mp(spec, cfg)
        out = []
        for j, e in enumerate(levels):
            width = gmpy2.mpfr(1e-7) * max(1.0, abs(e))
            lo, hi = gmpy2.mpfr(e) - width, gmpy2.mpfr(e) + width
            while sturm_count(dmp, o2, lo) > j:
                lo -= width
                width *= 2
            while sturm_count(dmp, o2, hi) <= j:
                hi += width
                width *= 2
            scale = max(1.0, abs(e))
            e_mp = _bisect(dmp, o2, j, lo, hi, lambda _x: rtol * scale)
            # exact hand-off so later extrapolation does not round to 53 bits
            out.append(Fraction(*e_mp.as_integer_ratio()))
        return out


def eig_lowest(
    spec: PotentialSpec,
    config: GridConfig,
    k: int,
    *,
    rtol: float | None = None,
    precision_bits: int | None = None,
    richardson: bool = False,
    parity: bool = False,
) -> OracleResult:
    """Lowest k eigenvalues of the discretised operator.

    With ``precision_bits`` the float bisection is followed by a multiprecision
    bisection to ``rtol``; the returned floats are then correctly rounded values
    of the discrete eigenvalues.  :func:`eig_extrapolated` keeps them exact.  ``richardson`` repeats the solve at 2N-1
    points and reports (4 E_fine - E_coarse)/3.
    """
    spec.require(Case.BOUNDED, Case.DOUBLE_WELL)
    if k < 1 or k > config.interior:
        raise ValueError(f"k must lie in [1, {config.interior}], got {k}")
    rtol = default_tolerance() if rtol is None else rtol
    levels = _levels(spec, config, k, rtol, precision_bits)
    vwall = potential_value(spec, config.half_width_L)
    if vwall < float(levels[-1]) + ENERGY_MARGIN:
        raise ValueError(
            f"box too small: V(L) = {vwall:.4g} is within {ENERGY_MARGIN} of E = {float(levels[-1]):.4g}"
        )
    estimate = None
    if richardson:
        fine = _levels(spec, config.refined(), k, rtol, precision_bits)
        estimate = tuple(float((4 * f - c) / 3) for f, c in zip(fine, levels))
    eigen = tuple(float(e) for e in levels)
    pairs = tuple((eigen[i], eigen[i + 1]) for i in range(0, k - 1, 2)) if spec.case is Case.DOUBLE_WELL else ()
    par = tuple(parities(spec, config, eigen)) if parity else ()
    return OracleResult(eigen, config, pairs, estimate, par)


def _levels(spec: PotentialSpec, config: GridConfig, k: int, rtol: float, bits: int | None) -> list:
    diag = _diagonal(spec, config)
    off2 = 1.0 / config.dz**4
    coarse = _float_levels(diag, off2, k, max(rtol, 1e-13) if bits else rtol)
    if bits:
        return _mp_refine(spec, config, coarse, bits, rtol)
    return coarse


def romberg(values) -> list[list]:
    """Romberg table for values computed with spacings dz, dz/2, dz/4, ...

    Row i holds the estimates built from the first i+1 values; the error
    expansion is in even powers of dz.  Returns the full table.
    """
    table: list[list] = []
    for i, v in enumerate(values):
        row = [v]
        for m in range(1, i + 1):
            f = 4**m
            row.append((f * row[m - 1] - table[i - 1][m - 1]) / (f - 1))
        table.append(row)
    return table


def richardson(coarse, fine):
    return (4 * fine - coarse) / 3


def eig_extrapolated(
    spec: PotentialSpec,
    config: GridConfig,
    k: int,
    levels: int,
    *,
    precision_bits: int | None = None,
    rtol: float | None = None,
) -> tuple[list, list[list[list]]]:
    """Romberg-extrapolated lowest k eigenvalues over ``levels`` grid halvings.

    Returns the best estimate per eigenvalue and the Romberg tables.
    """
    spec.require(Case.BOUNDED, Case.DOUBLE_WELL)
    rtol = default_tolerance() if rtol is None else rtol
    cfg = config
    per_grid = []
    for _ in range(levels):
        per_grid.append(_levels(spec, cfg, k, rtol, precision_bits))
        cfg = cfg.refined()
    tables = [romberg([g[j] for g in per_grid]) for j in range(k)]
    return [t[-1][-1] for t in tables], tables


def splitting_numeric(spec: PotentialSpec, config: GridConfig, n: int, *, rtol: float | None = None) -> float:
    """E_{2n+1} - E_{2n}, Richardson-extrapolated over N and 2N-1."""
    spec.require(Case.DOUBLE_WELL)
    rtol = default_tolerance() if rtol is None else rtol
    res = eig_lowest(spec, config, 2 * n + 2, rtol=rtol, richardson=True)
    assert res.richardson_estimate is not None
    coarse = res.eigenvalues[2 * n + 1] - res.eigenvalues[2 * n]
    fine_est = res.richardson_estimate[2 * n + 1] - res.richardson_estimate[2 * n]
    # bisection error on each eigenvalue enters both grids; 4/3 + 1/3 amplification
    bound = 4.0 * rtol * max(1.0, abs(res.eigenvalues[2 * n]))
    if coarse <= bound or fine_est <= bound:
        raise UnresolvedError(f"pair {n} splitting below the solver bound {bound:.3g}", bound)
    return fine_est


def default_config(spec: PotentialSpec, points: int, energy_max: float | None = None) -> GridConfig:
    """Box wide enough that V(L) exceeds ``energy_max`` by a comfortable margin."""
    spec.require(Case.BOUNDED, Case.DOUBLE_WELL)
    target = (energy_max if energy_max is not None else 0.0) + 4.0 * ENERGY_MARGIN
    L = 1.0 if spec.case is Case.BOUNDED else spec.h2 / (2.0 * spec.c) + 1.0
    while potential_value(spec, L) < target:
        L *= 1.25
    # extra room for the tails beyond the classical turning point
    return GridConfig(1.5 * L, points)


def parities(spec: PotentialSpec, config: GridConfig, eigenvalues) -> list[int]:
    """+1 for even, -1 for odd eigenvectors, by inverse iteration at each eigenvalue."""
    diag = np.array(_diagonal(spec, config))
    off = -1.0 / config.dz**2
    m = diag.size
    out = []
    rng = np.random.default_rng(0)
    for e in eigenvalues:
        shift = e + 1e-9 * max(1.0, abs(e))
        ab = np.zeros((3, m))
        ab[0, 1:] = off
        ab[1, :] = diag - shift
        ab[2, :-1] = off
        x = rng.standard_normal(m)
        for _ in range(4):
            x = solve_banded((1, 1), ab, x)
            x /= np.linalg.norm(x)
        overlap = float(np.dot(x, x[::-1]))
        out.append(1 if overlap > 0 else -1)
    return out


# -- exact Rayleigh-Schroedinger perturbation theory -----------------------------------


def _apply_x(vec: dict[int, Fraction]) -> dict[int, Fraction]:
    # unnormalised oscillator basis: a+|n) = |n+1), a|n) = n|n-1), X = a + a+
    out: dict[int, Fraction] = {}
    for n, c in vec.items():
        out[n + 1] = out.get(n + 1, Fraction(0)) + c
        if n > 0:
            out[n - 1] = out.get(n - 1, Fraction(0)) + n * c
    return out


def _apply_power(vec: dict[int, Fraction], k: int) -> dict[int, Fraction]:
    for _ in range(k):
        vec = _apply_x(vec)
    return vec


def _rspt(n0: int, order: int, pieces: dict[int, list[tuple[int, Fraction]]]) -> list[Fraction]:
    """Energy coefficients E_k of H0 + sum_k lambda^k V_k with H0 |n) = (2n+1)|n).

    ``pieces`` maps a perturbative order to a list of (power of X, coefficient).
    """

    def apply_v(m: int, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for power, coef in pieces.get(m, ()):
            for n, c in _apply_power(vec, power).items():
                out[n] = out.get(n, Fraction(0)) + coef * c
        return out

    psi: list[dict[int, Fraction]] = [{n0: Fraction(1)}]
    energies = [Fraction(2 * n0 + 1)]
    for k in range(1, order + 1):
        rhs: dict[int, Fraction] = {}
        for m in range(1, k + 1):
            for n, c in apply_v(m, psi[k - m]).items():
                rhs[n] = rhs.get(n, Fraction(0)) + c
        ek = rhs.get(n0, Fraction(0))
        energies.append(ek)
        for j in range(1, k + 1):
            for n, c in psi[k - j].items():
                rhs[n] = rhs.get(n, Fraction(0)) - energies[j] * c
        # intermediate normalisation: no |n0) component in corrections
        psi.append({n: c / (2 * (n0 - n)) for n, c in rhs.items() if n != n0 and c != 0})
    return energies


def rspt_rational(q0: int, order: int) -> AsymptoticSeries:
    """E(q0) for the bounded quartic through perturbative order ``order``.

    With z = sqrt2 y / h the operator is (h^2/2)[p^2 + y^2 + g X^4] where
    X = sqrt2 y and g = c^2/h^6, so order k contributes e_k/2 c^{2k} h^{2-6k}.
    """
    if not (0 <= order <= 4):
        raise ValueError("exact perturbation theory is provided for order <= 4")
    if q0 < 1 or q0 % 2 != 1:
        raise ValueError("q0 must be an odd positive integer")
    e = _rspt((q0 - 1) // 2, order, {1: [(4, Fraction(1))]})
    terms = tuple(SeriesTerm(1 - 3 * k, k, QPolynomial.const(ek / 2)) for k, ek in enumerate(e))
    return AsymptoticSeries(terms, order + 1, "E")


def rspt_rational_double(q0: int, order: int) -> AsymptoticSeries:
    """Pair-centre energy of the double well about one minimum.

    With z = z+ + 2^{1/4} y / h the operator is (h^2/sqrt2)[p^2 + y^2 + r X^3 +
    (r^2/2) X^4] plus the constant -h^8/(32 c^2), with r^2 = c^2 / (sqrt2 h^6).
    Odd orders in r vanish; order k here counts powers of r^2.
    """
    if not (0 <= order <= 4):
        raise ValueError("exact perturbation theory is provided for order <= 4")
    if q0 < 1 or q0 % 2 != 1:
        raise ValueError("q0 must be an odd positive integer")
    e = _rspt((q0 - 1) // 2, 2 * order, {1: [(3, Fraction(1))], 2: [(4, Fraction(1, 2))]})
    terms = [SeriesTerm(4, -1, QPolynomial.const(Fraction(-1, 32)))]
    for k in range(order + 1):
        terms.append(SeriesTerm(1 - 3 * k, k, QPolynomial.const(e[2 * k]), -1 - k))
    return AsymptoticSeries(tuple(terms), order + 1, "E")


# -- quadrature oracle for the barrier integral ------------------------------------------


def i2_quadrature(spec: PotentialSpec, q: float) -> float:
    """Barrier integral (c/sqrt2) int_0^b sqrt((a^2 - z^2)(b^2 - z^2)) dz by adaptive quadrature.

    The square-root zero at z = b is carried by an algebraic weight, so the
    remaining integrand is smooth.
    """
    G, u = barrier_moduli(spec, q)
    if u >= 1.0:
        raise ValueError("u >= 1: the inner turning points have merged")
    hp = math.sqrt(math.sqrt(2.0) * spec.h2)
    zp2 = spec.h4 / (4.0 * spec.c2)
    shift = math.sqrt(q) * hp / spec.c
    a2, b = zp2 + shift, math.sqrt(zp2 - shift)

    def smooth(z: float) -> float:
        return math.sqrt((a2 - z * z) * (b + z))

    value, err = integrate.quad(
        smooth, 0.0, b, weight="alg", wvar=(0.0, 0.5), epsabs=0.0, epsrel=1e-13, limit=200
    )
    if err > 1e-10 * abs(value):
        raise ArithmeticError(f"quadrature did not converge (error estimate {err:.3g})")
    return spec.c / math.sqrt(2.0) * value
