"""Large-h^2 asymptotics of the quartic anharmonic oscillator in its three sign cases."""

from .model import Case, Convention, DomainError, LevelIndex, PotentialSpec, landmarks, map_convention
from .series import AsymptoticSeries, QPolynomial, SeriesTerm, energy_series
from .tunneling import SpectralResult, complex_eigenvalue, level_splitting

__all__ = [
    "AsymptoticSeries",
    "Case",
    "Convention",
    "DomainError",
    "LevelIndex",
    "PotentialSpec",
    "QPolynomial",
    "SeriesTerm",
    "SpectralResult",
    "complex_eigenvalue",
    "energy_series",
    "landmarks",
    "level_splitting",
    "map_convention",
]
