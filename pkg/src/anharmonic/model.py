"""Potential cases, mass conventions and geometric landmarks.

Every quantity is stored as the pair (h4, c2) of positive reals.  The sign
pattern of the quartic potential lives entirely in the ``Case`` tag.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class Case(str, enum.Enum):
    BOUNDED = "bounded"
    DOUBLE_WELL = "double"
    INVERTED = "inverted"


class Convention(str, enum.Enum):
    # HALF: y'' + (E - V) y = 0, i.e. particle mass 1/2 with hbar = 1.
    HALF = "half"
    ONE = "one"


class DomainError(ValueError):
    """Raised when an operation is asked about a case it does not cover."""


@dataclass(frozen=True)
class PotentialSpec:
    case: Case
    h4: float
    c2: float
    convention: Convention = Convention.HALF

    def __post_init__(self) -> None:
        object.__setattr__(self, "case", Case(self.case))
        object.__setattr__(self, "convention", Convention(self.convention))
        if not (self.h4 > 0 and math.isfinite(self.h4)):
            raise ValueError(f"h4 must be positive and finite, got {self.h4!r}")
        if not (self.c2 > 0 and math.isfinite(self.c2)):
            raise ValueError(f"c2 must be positive and finite, got {self.c2!r}")

    @property
    def h2(self) -> float:
        return math.sqrt(self.h4)

    @property
    def h(self) -> float:
        return math.sqrt(self.h2)

    @property
    def h6(self) -> float:
        return self.h4 * self.h2

    @property
    def c(self) -> float:
        return math.sqrt(self.c2)

    def require(self, *cases: Case) -> None:
        if self.case not in cases:
            names = ", ".join(c.value for c in cases)
            raise DomainError(f"operation needs case in {{{names}}}, got {self.case.value}")


@dataclass(frozen=True)
class Landmarks:
    z_plus: float
    z_minus: float
    v_at_extremum: float
    curvature: float
    h_plus_sq: float
    barrier_or_hump: float


@dataclass(frozen=True)
class LevelIndex:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError(f"level index must be a nonnegative integer, got {self.n!r}")

    @classmethod
    def from_q0(cls, q0: int) -> "LevelIndex":
        if q0 < 1 or q0 % 2 != 1:
            raise ValueError(f"q0 must be an odd positive integer, got {q0!r}")
        return cls((q0 - 1) // 2)

    @property
    def q0(self) -> int:
        return 2 * self.n + 1

    @property
    def even_branch(self) -> bool:
        """True for q0 = 1, 5, 9, ... where the even origin condition selects the level."""
        return self.q0 % 4 == 1


_SIGNS = {
    Case.BOUNDED: (1.0, 1.0),
    Case.DOUBLE_WELL: (-1.0, 1.0),
    Case.INVERTED: (1.0, -1.0),
}


def potential_value(spec: PotentialSpec, z: float) -> float:
    s2, s4 = _SIGNS[spec.case]
    z2 = z * z
    return s2 * 0.25 * spec.h4 * z2 + s4 * 0.5 * spec.c2 * z2 * z2


def landmarks(spec: PotentialSpec) -> Landmarks:
    """Extrema of the double well / humps of the inverted well.

    For the bounded quartic there is no off-centre extremum; the minimum at the
    origin is reported with z_plus set to the same h^2/(2c) scale for reference.
    """
    z_plus = spec.h2 / (2.0 * spec.c)
    height = spec.h4 * spec.h4 / (32.0 * spec.c2)
    if spec.case is Case.DOUBLE_WELL:
        v_ext, curv = -height, spec.h4
    elif spec.case is Case.INVERTED:
        v_ext, curv = height, -spec.h4
    else:
        v_ext, curv = potential_value(spec, z_plus), 0.5 * spec.h4 + 6.0 * spec.c2 * z_plus**2
    return Landmarks(
        z_plus=z_plus,
        z_minus=-z_plus,
        v_at_extremum=v_ext,
        curvature=curv,
        h_plus_sq=math.sqrt(2.0) * spec.h2,
        barrier_or_hump=height,
    )


def shifted_barrier_profile(spec: PotentialSpec, z: float) -> float:
    """U(z) = 4 [V(z) - V(z+)] / h+^4, which is (z - z+)^2 to leading order near z+."""
    spec.require(Case.DOUBLE_WELL)
    lm = landmarks(spec)
    # Written as a perfect square to avoid cancellation near the minima.
    d = z * z - lm.z_plus * lm.z_plus
    return 4.0 * (0.5 * spec.c2 * d * d) / (2.0 * spec.h4)


def map_convention(spec: PotentialSpec, target: Convention | str) -> tuple[PotentialSpec, float]:
    """Translate parameters between the mass-1/2 and mass-1 conventions.

    Returns the mapped spec and the factor by which energies in the source
    convention must be multiplied to land in the target convention.
    """
    target = Convention(target)
    if target is spec.convention:
        return spec, 1.0
    if target is Convention.HALF:
        return replace(spec, h4=2.0 * spec.h4, c2=2.0 * spec.c2, convention=target), 2.0
    return replace(spec, h4=0.5 * spec.h4, c2=0.5 * spec.c2, convention=target), 0.5


def from_mu_lambda(mu: float, lam: float) -> PotentialSpec:
    """Double well written as (lam/4)(z^2 - mu^2/lam)^2 in the mass-1 convention."""
    return PotentialSpec(Case.DOUBLE_WELL, h4=2.0 * mu * mu, c2=0.5 * lam, convention=Convention.ONE)
