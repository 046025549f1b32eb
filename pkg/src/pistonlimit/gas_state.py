"""Polytropic gas states in the rescaled piston frame.

All quantities are nondimensional: the undisturbed gas has unit density and
the piston speed is one, so the problem depends only on (gamma, M0).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

VACUUM_RHO = 1e-14
ADMISSIBILITY_TOL = 1e-12


class PistonError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(PistonError, ValueError):
    pass


class InadmissibleStateError(PistonError, ValueError):
    pass


class DomainError(PistonError, ValueError):
    pass


class NumericalError(PistonError, RuntimeError):
    pass


class Direction(enum.Enum):
    RUSH = "rush"
    RECEDE = "recede"

    @property
    def sign(self) -> float:
        """Upstream velocity in the piston frame."""
        return 1.0 if self is Direction.RUSH else -1.0


@dataclass(frozen=True)
class GasState:
    """Pointwise state (density, velocity, total energy per unit mass)."""

    rho: float
    u: float
    E: float

    def __post_init__(self):
        if not self.rho >= 0.0:
            raise InadmissibleStateError(f"negative density {self.rho!r}")
        if self.rho < VACUUM_RHO:
            object.__setattr__(self, "rho", 0.0)
            object.__setattr__(self, "u", 0.0)
            object.__setattr__(self, "E", 0.0)

    @property
    def is_vacuum(self) -> bool:
        return self.rho == 0.0

    @property
    def internal_energy(self) -> float:
        return self.E - 0.5 * self.u * self.u

    def conserved(self) -> np.ndarray:
        return np.array([self.rho, self.rho * self.u, self.rho * self.E])


VACUUM = GasState(0.0, 0.0, 0.0)


def pressure(s: GasState, gamma: float) -> float:
    if s.is_vacuum:
        return 0.0
    p = (gamma - 1.0) * s.rho * (s.E - 0.5 * s.u * s.u)
    scale = max(1.0, s.rho * abs(s.E))
    if p < -ADMISSIBILITY_TOL * scale:
        raise InadmissibleStateError(f"negative pressure {p:.3e} for {s}")
    return max(p, 0.0)


def sound_speed(s: GasState, gamma: float) -> float:
    if s.is_vacuum:
        return 0.0
    return math.sqrt(gamma * pressure(s, gamma) / s.rho)


def lambda1(s: GasState, gamma: float) -> float:
    """First characteristic speed u - c (zero in vacuum)."""
    if s.is_vacuum:
        return 0.0
    return s.u - sound_speed(s, gamma)


def mach_energy(gamma: float, M0: float) -> float:
    """Upstream total energy E0 for a piston of Mach number M0."""
    if M0 == math.inf:
        if gamma <= 1.0:
            raise ParameterError("E0 is undetermined for gamma = 1 and M0 = inf")
        return 0.5
    if not gamma > 1.0:
        raise ParameterError(f"gamma must exceed 1 for finite M0, got {gamma}")
    if not M0 > 0.0:
        raise ParameterError(f"M0 must be positive, got {M0}")
    return 0.5 + 1.0 / (gamma * (gamma - 1.0) * M0 * M0)


def energy_mach(gamma: float, E0: float) -> float:
    """Inverse of :func:`mach_energy`; returns ``math.inf`` on the limit boundary."""
    if gamma < 1.0:
        raise ParameterError(f"gamma must be >= 1, got {gamma}")
    if not E0 >= 0.5:
        raise ParameterError(f"E0 must be >= 1/2, got {E0}")
    if gamma == 1.0 or E0 == 0.5:
        return math.inf
    return 1.0 / math.sqrt(gamma * (gamma - 1.0) * (E0 - 0.5))


def gamma_from_energy(E0: float, M0: float) -> float:
    """Adiabatic exponent that realises (E0, M0); used for Case 2 sweeps."""
    if not E0 > 0.5:
        raise ParameterError(f"E0 must exceed 1/2, got {E0}")
    if not 0.0 < M0 < math.inf:
        raise ParameterError(f"M0 must be finite and positive, got {M0}")
    q = 1.0 / (M0 * M0 * (E0 - 0.5))
    # gamma * (gamma - 1) = q, solved without cancellation in gamma - 1
    return 1.0 + 2.0 * q / (1.0 + math.sqrt(1.0 + 4.0 * q))


@dataclass(frozen=True)
class PistonParams:
    gamma: float
    M0: float
    direction: Direction = Direction.RUSH
    # exact E0 for Case 2 sweeps, where gamma - 1 is too small to round-trip it
    energy: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.direction, str):
            object.__setattr__(self, "direction", Direction(self.direction))
        if not self.gamma >= 1.0:
            raise ParameterError(f"gamma must be >= 1, got {self.gamma}")
        if not self.M0 > 0.0:
            raise ParameterError(f"M0 must be positive, got {self.M0}")
        if self.gamma == 1.0 and self.M0 != math.inf:
            raise ParameterError("gamma = 1 requires M0 = inf")

    @classmethod
    def from_energy(cls, E0: float, M0: float, direction=Direction.RUSH) -> "PistonParams":
        return cls(gamma_from_energy(E0, M0), M0, direction, energy=E0)

    @property
    def E0(self) -> float:
        if self.energy is not None:
            return self.energy
        return mach_energy(self.gamma, self.M0)

    @property
    def p0(self) -> float:
        if self.M0 == math.inf:
            return 0.0
        if self.energy is not None:
            return (self.gamma - 1.0) * (self.energy - 0.5)
        return 1.0 / (self.gamma * self.M0 * self.M0)

    @property
    def c0(self) -> float:
        return 0.0 if self.M0 == math.inf else 1.0 / self.M0

    @property
    def upstream(self) -> GasState:
        return GasState(1.0, self.direction.sign, self.E0)

    def require_finite(self, direction: Direction):
        if self.direction is not direction:
            raise ParameterError(f"expected a {direction.value} problem, got {self.direction.value}")
        if not self.gamma > 1.0:
            raise ParameterError(f"gamma must exceed 1, got {self.gamma}")
        if not 0.0 < self.M0 < math.inf:
            raise ParameterError(f"M0 must lie in (0, inf), got {self.M0}")
