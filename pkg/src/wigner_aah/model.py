"""Dimensionless AAH Hamiltonian and its classical (Liouville) flow.

    H(x, k) = w k + cos k + a^2 (w x + cos x)

The Peierls phase plays the role of an effective Planck constant and is fixed
by ``2 pi beta = 1``, i.e. ``[x, k] = i``.  Every closed form in this package
assumes that convention, so it is a module constant rather than a parameter.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "PEIERLS_BETA",
    "THRESHOLD_TOL",
    "AahParams",
    "EnergyClass",
    "PhaseState",
    "UnsupportedRegimeError",
    "aah_energy",
    "classical_velocity",
    "classify_energy",
]

PEIERLS_BETA = 1.0 / (2.0 * math.pi)
THRESHOLD_TOL = 1e-12


class UnsupportedRegimeError(ValueError):
    """Requested a result outside the parameter regime where it is defined."""


class PhaseState(NamedTuple):
    """A point in dimensionless phase space."""

    x: float
    k: float


@dataclass(frozen=True)
class AahParams:
    """Anisotropy ``a`` (enters squared) and linear drift ``w``."""

    a: float = 1.0
    w: float = 0.4

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"anisotropy a must be positive and finite, got {self.a}")
        if not math.isfinite(self.w):
            raise ValueError(f"drift w must be finite, got {self.w}")

    @property
    def a2(self):
        return self.a * self.a


class EnergyClass(enum.Enum):
    CLOSED_POSITIVE = "closed_positive"
    CLOSED_NEGATIVE = "closed_negative"
    OPEN = "open"
    THRESHOLD = "threshold"
    OUT_OF_RANGE = "out_of_range"


def aah_energy(params: AahParams, s: PhaseState) -> float:
    x, k = s
    return params.w * k + math.cos(k) + params.a2 * (params.w * x + math.cos(x))


def classical_velocity(params: AahParams, s: PhaseState):
    """Hamilton's equations ``(dH/dk, -dH/dx)``."""
    x, k = s
    return params.w - math.sin(k), -params.a2 * (params.w - math.sin(x))


def classify_energy(params: AahParams, eps: float) -> EnergyClass:
    """Classify a classical energy level of the pure Harper pattern (w = 0).

    Levels with ``max(a^2 - 1, 0) < |eps| < a^2 + 1`` are closed orbits,
    ``0 < |eps| < a^2 - 1`` are open (only when a^2 > 1) and
    ``|eps| = a^2 - 1`` is the open/closed separatrix.
    """
    if params.w != 0:
        raise UnsupportedRegimeError(
            "energy classes are only defined for the pure Harper pattern (w = 0)"
        )
    a2 = params.a2
    level = abs(eps)
    if abs(level - (a2 - 1.0)) <= THRESHOLD_TOL:
        return EnergyClass.THRESHOLD
    if max(a2 - 1.0, 0.0) < level < a2 + 1.0:
        return EnergyClass.CLOSED_POSITIVE if eps > 0 else EnergyClass.CLOSED_NEGATIVE
    if 0.0 < level < a2 - 1.0:
        return EnergyClass.OPEN
    return EnergyClass.OUT_OF_RANGE
