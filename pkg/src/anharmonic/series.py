"""Exact-rational large-h^2 expansions of the separation constant and the energy.

The expansions are generated from a three-term (or five-term) ladder: the
unperturbed operator is diagonal on a family of basis functions y_{q+s*t}
(s = 4 for the inverted and bounded wells, s = 2 for the double well) with
eigenvalue proportional to t, and the perturbation couples neighbouring
members through q-polynomial coefficients.  Everything below is carried out
in ``fractions.Fraction`` so regenerated coefficients are exact.

Internal tables are computed with c^2 = 1; the powers of c^2 are restored when
the tables are packaged as an :class:`AsymptoticSeries`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .model import Case, DomainError

Rational = Fraction | int


def _frac(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _fmt_rational(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


@dataclass(frozen=True)
class QPolynomial:
    """Polynomial in q with exact rational coefficients.

    Stored sparsely as sorted (degree, coefficient) pairs; zero coefficients are
    never stored, so equality is structural.
    """

    items: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, Rational] | Iterable[Rational]) -> "QPolynomial":
        if isinstance(coeffs, Mapping):
            pairs = coeffs.items()
        else:
            pairs = enumerate(coeffs)
        acc: dict[int, Fraction] = {}
        for d, c in pairs:
            if d < 0:
                raise ValueError("negative degree")
            acc[d] = acc.get(d, Fraction(0)) + _frac(c)
        return cls(tuple(sorted((d, c) for d, c in acc.items() if c != 0)))

    @classmethod
    def const(cls, c: Rational) -> "QPolynomial":
        return cls.from_coeffs({0: c})

    @classmethod
    def q(cls) -> "QPolynomial":
        return cls.from_coeffs({1: 1})

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self.items)

    @property
    def degree(self) -> int:
        return self.items[-1][0] if self.items else -1

    def is_zero(self) -> bool:
        return not self.items

    def parity(self) -> int | None:
        """0 for even, 1 for odd, None for mixed or zero."""
        ps = {d % 2 for d, _ in self.items}
        return ps.pop() if len(ps) == 1 else None

    def __add__(self, other: "QPolynomial | Rational") -> "QPolynomial":
        other = _as_poly(other)
        acc = dict(self.items)
        for d, c in other.items:
            acc[d] = acc.get(d, Fraction(0)) + c
        return QPolynomial.from_coeffs(acc)

    __radd__ = __add__

    def __neg__(self) -> "QPolynomial":
        return QPolynomial(tuple((d, -c) for d, c in self.items))

    def __sub__(self, other: "QPolynomial | Rational") -> "QPolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other: Rational) -> "QPolynomial":
        return _as_poly(other) - self

    def __mul__(self, other: "QPolynomial | Rational") -> "QPolynomial":
        if not isinstance(other, QPolynomial):
            k = _frac(other)
            return QPolynomial(tuple((d, c * k) for d, c in self.items if c * k != 0))
        acc: dict[int, Fraction] = {}
        for d1, c1 in self.items:
            for d2, c2 in other.items:
                acc[d1 + d2] = acc.get(d1 + d2, Fraction(0)) + c1 * c2
        return QPolynomial.from_coeffs(acc)

    __rmul__ = __mul__

    def __truediv__(self, k: Rational) -> "QPolynomial":
        return self * (Fraction(1) / _frac(k))

    def __call__(self, q):
        """Horner evaluation; exact for Fraction/int input, float otherwise."""
        if not self.items:
            return 0 * q
        dense = self.coeffs
        acc = 0
        for d in range(self.degree, -1, -1):
            acc = acc * q + dense.get(d, 0)
        if isinstance(q, float):
            return float(acc)
        return acc

    def shift(self, a: Rational) -> "QPolynomial":
        """p(q + a)."""
        a = _frac(a)
        out = QPolynomial()
        base = QPolynomial.from_coeffs({0: a, 1: 1})
        power = QPolynomial.const(1)
        dense = self.coeffs
        for d in range(self.degree + 1):
            if d in dense:
                out = out + power * dense[d]
            power = power * base
        return out

    def reflect(self) -> "QPolynomial":
        """p(-q)."""
        return QPolynomial(tuple((d, -c if d % 2 else c) for d, c in self.items))

    def to_list(self) -> list[str]:
        dense = self.coeffs
        return [_fmt_rational(dense.get(d, Fraction(0))) for d in range(self.degree + 1)]

    def __str__(self) -> str:
        if not self.items:
            return "0"
        parts = []
        for d, c in reversed(self.items):
            mag = abs(c)
            mono = "" if d == 0 else ("q" if d == 1 else f"q^{d}")
            if mono and mag == 1:
                body = mono
            else:
                body = _fmt_rational(mag) + ("" if not mono else f" {mono}")
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def _as_poly(x: "QPolynomial | Rational") -> QPolynomial:
    return x if isinstance(x, QPolynomial) else QPolynomial.const(x)


Q = QPolynomial.q()
ONE = QPolynomial.const(1)
ZERO = QPolynomial()


@dataclass(frozen=True)
class DeltaPolynomial:
    """Polynomial in the (c^2-scaled) separation constant with QPolynomial coefficients.

    Used for bracket and P tables where the separation constant is kept
    symbolic until the consistency condition is solved.
    """

    items: tuple[tuple[int, QPolynomial], ...] = ()

    @classmethod
    def from_map(cls, m: Mapping[int, QPolynomial]) -> "DeltaPolynomial":
        return cls(tuple(sorted((k, v) for k, v in m.items() if not v.is_zero())))

    @classmethod
    def lift(cls, p: QPolynomial) -> "DeltaPolynomial":
        return cls.from_map({0: p})

    def __add__(self, other: "DeltaPolynomial") -> "DeltaPolynomial":
        acc = dict(self.items)
        for k, v in other.items:
            acc[k] = acc.get(k, ZERO) + v
        return DeltaPolynomial.from_map(acc)

    def __mul__(self, other: "DeltaPolynomial | QPolynomial | Rational") -> "DeltaPolynomial":
        if not isinstance(other, DeltaPolynomial):
            return DeltaPolynomial.from_map({k: v * other for k, v in self.items})
        acc: dict[int, QPolynomial] = {}
        for k1, v1 in self.items:
            for k2, v2 in other.items:
                acc[k1 + k2] = acc.get(k1 + k2, ZERO) + v1 * v2
        return DeltaPolynomial.from_map(acc)

    __rmul__ = __mul__

    def coefficient(self, power: int) -> QPolynomial:
        return dict(self.items).get(power, ZERO)

    @property
    def delta_degree(self) -> int:
        return self.items[-1][0] if self.items else -1

    def substitute(self, delta: QPolynomial) -> QPolynomial:
        out = ZERO
        for k, v in self.items:
            term = v
            for _ in range(k):
                term = term * delta
            out = out + term
        return out


DELTA = DeltaPolynomial.from_map({1: ONE})


# -- series container ---------------------------------------------------------


@dataclass(frozen=True)
class SeriesTerm:
    """coeff(q) * sqrt(2)^sqrt2_power * (c^2)^c2_power * (h^2)^h2_power."""

    h2_power: int
    c2_power: int
    coeff: QPolynomial
    sqrt2_power: int = 0

    def __post_init__(self) -> None:
        # Normalise the irrational factor to sqrt(2)^0 or sqrt(2)^1.
        p = self.sqrt2_power
        if p not in (0, 1):
            whole = p // 2
            scale = Fraction(2) ** whole
            object.__setattr__(self, "coeff", self.coeff * scale)
            object.__setattr__(self, "sqrt2_power", p - 2 * whole)

    def value(self, q: float, h4: float, c2: float) -> float:
        h2 = math.sqrt(h4)
        return (
            float(self.coeff(float(q)))
            * math.sqrt(2.0) ** self.sqrt2_power
            * c2**self.c2_power
            * h2**self.h2_power
        )

    def to_json(self) -> dict:
        return {
            "h2_power": self.h2_power,
            "c2_power": self.c2_power,
            "sqrt2_power": self.sqrt2_power,
            "q_poly": self.coeff.to_list(),
        }


@dataclass(frozen=True)
class AsymptoticSeries:
    terms: tuple[SeriesTerm, ...]
    truncation_order: int
    label: str = "E"

    def __post_init__(self) -> None:
        kept = tuple(t for t in self.terms if not t.coeff.is_zero())
        ordered = tuple(sorted(kept, key=lambda t: -t.h2_power))
        object.__setattr__(self, "terms", ordered)

    def value(self, q: float, h4: float, c2: float) -> float:
        # Sum smallest terms first.
        return math.fsum(t.value(q, h4, c2) for t in reversed(self.terms))

    def derivative_q(self) -> "AsymptoticSeries":
        out = []
        for t in self.terms:
            d = QPolynomial.from_coeffs({k - 1: k * c for k, c in t.coeff.items if k > 0})
            out.append(SeriesTerm(t.h2_power, t.c2_power, d, t.sqrt2_power))
        return AsymptoticSeries(tuple(out), self.truncation_order, f"d{self.label}/dq")

    def flip_c2(self) -> "AsymptoticSeries":
        """Substitute c^2 -> -c^2 term by term."""
        out = tuple(
            SeriesTerm(t.h2_power, t.c2_power, t.coeff * (-1) ** (t.c2_power % 2), t.sqrt2_power)
            for t in self.terms
        )
        return AsymptoticSeries(out, self.truncation_order, self.label)

    def at(self, q0: int) -> "AsymptoticSeries":
        """Freeze the q-polynomials at an integer q0 (constant coefficients)."""
        out = tuple(
            SeriesTerm(t.h2_power, t.c2_power, QPolynomial.const(t.coeff(Fraction(q0))), t.sqrt2_power)
            for t in self.terms
        )
        return AsymptoticSeries(out, self.truncation_order, self.label)

    def key(self) -> tuple:
        return tuple((t.h2_power, t.c2_power, t.sqrt2_power, t.coeff.items) for t in self.terms)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "truncation_order": self.truncation_order,
            "terms": [t.to_json() for t in self.terms],
        }

    def render(self) -> str:
        pieces = []
        for t in self.terms:
            c = t.coeff
            lead = c.items[-1][1]
            sign = "-" if lead < 0 else "+"
            body = -c if lead < 0 else c
            # Pull out a common rational factor for readability.
            content = _content(body)
            inner = body / content
            factors = []
            if content != 1:
                factors.append(f"({_fmt_rational(content)})")
            if t.sqrt2_power:
                factors.append("sqrt2")
            if inner != ONE:
                factors.append(f"({inner})" if len(inner.items) > 1 else str(inner))
            num, den = [], []
            if t.c2_power:
                (num if t.c2_power > 0 else den).append(_power_str("c", 2 * abs(t.c2_power)))
            if t.h2_power:
                (num if t.h2_power > 0 else den).append(_power_str("h", 2 * abs(t.h2_power)))
            text = " ".join(factors + num) or "1"
            if den:
                text += " / " + " ".join(den)
            pieces.append((sign, text))
        if not pieces:
            return f"{self.label} = 0"
        first_sign, first = pieces[0]
        out = f"{self.label} = " + ("- " if first_sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out


def _power_str(sym: str, p: int) -> str:
    return sym if p == 1 else f"{sym}^{p}"


def _content(p: QPolynomial) -> Fraction:
    nums = [c.numerator for _, c in p.items]
    dens = [c.denominator for _, c in p.items]
    g = 0
    for n in nums:
        g = math.gcd(g, abs(n))
    lcm = 1
    for d in dens:
        lcm = lcm * d // math.gcd(lcm, d)
    return Fraction(g, lcm)


# -- ladder tables: inverted and bounded wells ----------------------------------


def w2_step_coeffs() -> tuple[QPolynomial, QPolynomial, QPolynomial]:
    """Coefficients of y_{q+4}, y_q, y_{q-4} in w^2 y_q."""
    half = Fraction(1, 2)
    return (Q + 3) * half, Q, (Q - 3) * half


@lru_cache(maxsize=None)
def _s_table(i: int) -> tuple[tuple[int, QPolynomial], ...]:
    if i == 0:
        return ((0, ONE),)
    up, mid, down = w2_step_coeffs()
    acc: dict[int, QPolynomial] = {}
    for j, c in _s_table(i - 1):
        shift = 4 * j
        for step, k in ((1, up), (0, mid), (-1, down)):
            acc[j + step] = acc.get(j + step, ZERO) + c * k.shift(shift)
    return tuple(sorted((j, c) for j, c in acc.items()))


def s_coeffs(i: int) -> dict[int, QPolynomial]:
    """S_{2i}(q, 4j): coefficient of y_{q+4j} in w^{2i} y_q, for |j| <= i."""
    if i < 1:
        raise ValueError("power index must be >= 1")
    return dict(_s_table(i))


def bracket(j: int, t: int) -> DeltaPolynomial:
    """[q+4j, q+4t] with c^2 = 1: coefficient of y_{q+4t} in (delta + w^4) y_{q+4j}."""
    s4 = dict(_s_table(2))
    step = t - j
    coeff = s4.get(step, ZERO).shift(4 * j)
    out = DeltaPolynomial.lift(coeff)
    if step == 0:
        out = out + DELTA
    return out


@lru_cache(maxsize=None)
def _p_table(i: int) -> tuple[tuple[int, DeltaPolynomial], ...]:
    if i == 0:
        return ((0, DeltaPolynomial.lift(ONE)),)
    prev = dict(_p_table(i - 1))
    out: dict[int, DeltaPolynomial] = {}
    for t in range(-2 * i, 2 * i + 1):
        if t == 0:
            continue
        acc = DeltaPolynomial()
        for j, pj in prev.items():
            if abs(t - j) <= 2:
                acc = acc + pj * bracket(j, t)
        acc = acc * Fraction(1, 4 * t)
        if acc.items:
            out[t] = acc
    return tuple(sorted(out.items()))


def p_coeffs(i: int) -> dict[int, DeltaPolynomial]:
    """P_i(q, q+4j) with the separation constant kept symbolic (c^2 = 1).

    P_0 = {0: 1}; P_i(q, q) = 0 for i >= 1, and entries vanish for |j| > 2i.
    """
    if i < 0:
        raise ValueError("order must be >= 0")
    return dict(_p_table(i))


def _ps_mul(a: list[QPolynomial], b: list[QPolynomial], n: int) -> list[QPolynomial]:
    out = [ZERO] * n
    for i, ai in enumerate(a[:n]):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b[: n - i]):
            out[i + j] = out[i + j] + ai * bj
    return out


def _substitute_series(dp: DeltaPolynomial, delta: list[QPolynomial], n: int) -> list[QPolynomial]:
    """Evaluate a DeltaPolynomial at a truncated power series for delta."""
    out = [ZERO] * n
    power = [ONE] + [ZERO] * (n - 1)
    for k in range(dp.delta_degree + 1):
        c = dp.coefficient(k)
        if not c.is_zero():
            for m in range(n):
                out[m] = out[m] + c * power[m]
        power = _ps_mul(power, delta, n)
    return out


@lru_cache(maxsize=None)
def _delta_inverted(order: int) -> tuple[QPolynomial, ...]:
    """Coefficients of 1/h^6 powers in delta (c^2 = 1), from the P-table condition.

    The consistency condition sum_i eps^i sum_j P_i(q,q+4j)[q+4j,q] = 0 is solved
    by fixed-point iteration: each sweep substitutes the current truncated
    delta into every bracket and gains one order.
    """
    s4_0 = dict(_s_table(2))[0]
    delta = [-s4_0] + [ZERO] * (order - 1)
    tables = [p_coeffs(i) for i in range(order)]
    for _ in range(order - 1):
        new = [-s4_0] + [ZERO] * (order - 1)
        for i in range(1, order):
            n = order - i
            for j, pij in tables[i].items():
                closing = pij * bracket(j, 0)
                contrib = _substitute_series(closing, delta, n)
                for m in range(n):
                    new[i + m] = new[i + m] - contrib[m]
        delta = new
    return tuple(delta)


# -- generic ladder solver (direct order-by-order recurrence) -------------------


def _solve_ladder(
    eigen: callable,
    coupling: callable,
    kappa: Fraction,
    order: int,
    reach: int,
) -> tuple[QPolynomial, ...]:
    """Order-by-order solution of  eigen(t) a_t = eps (sum_j a_j M(j,t) + kappa delta a_t).

    a is normalised by a_0 = 1 at every order.  Returns delta_0..delta_{order-1}.
    ``reach`` is the largest |t - j| with nonzero coupling.
    """
    a: list[dict[int, QPolynomial]] = [{0: ONE}]
    deltas: list[QPolynomial] = []
    for i in range(1, order + 1):
        prev = a[i - 1]
        closing = ZERO
        for j, aj in prev.items():
            if abs(j) <= reach:
                closing = closing + aj * coupling(j, 0)
        deltas.append(-closing / kappa)
        if i == order:
            break
        span = reach * i
        cur: dict[int, QPolynomial] = {}
        for t in range(-span, span + 1):
            if t == 0:
                continue
            acc = ZERO
            for j, aj in prev.items():
                if abs(t - j) <= reach:
                    acc = acc + aj * coupling(j, t)
            for k in range(i):
                ak = a[i - 1 - k].get(t)
                if ak is not None:
                    acc = acc + deltas[k] * ak * kappa
            if not acc.is_zero():
                cur[t] = acc / eigen(t)
        a.append(cur)
    return tuple(deltas)


def _inverted_coupling(j: int, t: int) -> QPolynomial:
    return dict(_s_table(2)).get(t - j, ZERO).shift(4 * j)


@lru_cache(maxsize=None)
def _delta_inverted_direct(order: int) -> tuple[QPolynomial, ...]:
    return _solve_ladder(lambda t: Fraction(4 * t), _inverted_coupling, Fraction(1), order, 2)


# -- double well -----------------------------------------------------------------


def a_coeff_table_double() -> dict[int, DeltaPolynomial]:
    """(q, q+2i) coefficients of the double-well type-A ladder, separation constant in units of c^2.

    Keys are i in {-2,...,2}; the diagonal carries 2*(3q^2+1) + 2*delta.
    """
    return {
        -2: DeltaPolynomial.lift((Q - 1) * (Q - 3)),
        -1: DeltaPolynomial.lift((Q - 1) * (Q - 1) * (-4)),
        0: DeltaPolynomial.lift((Q * Q * 3 + 1) * 2) + DELTA * 2,
        1: DeltaPolynomial.lift((Q + 1) * (Q + 1) * (-4)),
        2: DeltaPolynomial.lift((Q + 1) * (Q + 3)),
    }


def _double_coupling(j: int, t: int) -> QPolynomial:
    entry = a_coeff_table_double().get(t - j)
    if entry is None:
        return ZERO
    return entry.coefficient(0).shift(2 * j)


@lru_cache(maxsize=None)
def _delta_double(order: int) -> tuple[QPolynomial, ...]:
    # Expansion parameter is eta = -sqrt(2) c^2 / (4 h^6).
    return _solve_ladder(lambda t: Fraction(-2 * t), _double_coupling, Fraction(2), order, 2)


# -- public series builders ---------------------------------------------------------


def delta_series_inverted(order: int) -> AsymptoticSeries:
    """Separation constant of the inverted well through ``order`` powers of 1/h^6."""
    if order < 1:
        raise ValueError("order must be >= 1")
    coeffs = _delta_inverted(order)
    terms = tuple(SeriesTerm(-3 * k, k + 1, c) for k, c in enumerate(coeffs))
    return AsymptoticSeries(terms, order, "Delta")


def delta_series_double(order: int) -> AsymptoticSeries:
    """Separation constant of the double well through ``order`` powers of 1/h^6."""
    if order < 1:
        raise ValueError("order must be >= 1")
    coeffs = _delta_double(order)
    terms = tuple(
        SeriesTerm(-3 * k, k + 1, c * Fraction(-1, 4) ** k, k) for k, c in enumerate(coeffs)
    )
    return AsymptoticSeries(terms, order, "Delta")


def energy_series(case: Case | str, order: int) -> AsymptoticSeries:
    """E(q, h^2) with the leading term plus ``order - 1`` corrections.

    For the double well the constant -h^8/(32 c^2) is carried in addition.
    """
    case = Case(case)
    if order < 1:
        raise ValueError("order must be >= 1")
    if case in (Case.INVERTED, Case.BOUNDED):
        terms = [SeriesTerm(1, 0, Q * Fraction(1, 2))]
        if order > 1:
            for t in delta_series_inverted(order - 1).terms:
                terms.append(SeriesTerm(t.h2_power - 2, t.c2_power, t.coeff * Fraction(1, 2)))
        series = AsymptoticSeries(tuple(terms), order, "E")
        return series.flip_c2() if case is Case.BOUNDED else series
    if case is Case.DOUBLE_WELL:
        terms = [
            SeriesTerm(4, -1, QPolynomial.const(Fraction(-1, 32))),
            SeriesTerm(1, 0, Q * Fraction(1, 2), 1),
        ]
        if order > 1:
            for t in delta_series_double(order - 1).terms:
                terms.append(
                    SeriesTerm(t.h2_power - 2, t.c2_power, t.coeff * Fraction(1, 2), t.sqrt2_power)
                )
        return AsymptoticSeries(tuple(terms), order, "E")
    raise DomainError(f"no energy series for case {case!r}")


# -- parabolic-cylinder ladder for the double well ---------------------------------


def pcf_recurrence_double(q: float) -> tuple[float, float]:
    """Coefficients of B_{q+2} and B_{q-2} in w B_q(w).

    Both carry a factor sqrt(2); see the notes on the origin-value check in the
    test-suite.  A factorial pole in a denominator gives an exact zero.
    """
    from .specfun import factorial_ratio

    root2 = math.sqrt(2.0)
    up = root2 * factorial_ratio((q + 1) / 4.0, (q - 1) / 4.0)
    down = root2 * factorial_ratio((q - 3) / 4.0, (q - 5) / 4.0)
    return up, down
