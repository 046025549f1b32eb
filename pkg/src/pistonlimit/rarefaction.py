"""Exact solution of the receding-piston problem (centred 1-rarefaction).

Along the fan the 1-Riemann invariant and the entropy are constant, which makes
R = rho**((gamma - 1) / 2) an affine function of eta = x/t:

    R(eta) = 1 - (gamma - 1) * (1 + M0 * (1 + eta)) / (gamma + 1)

The fan is therefore inverted in closed form; densities are recovered as
exp(2/(gamma-1) * log R) so that gamma close to 1 does not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gas_state import VACUUM, Direction, DomainError, GasState, PistonParams, sound_speed


@dataclass(frozen=True)
class RarefactionSolution:
    params: PistonParams
    eta_head: float
    eta_tail: float
    vacuum: bool
    wall_state: GasState
    s_max: float

    @property
    def p1(self) -> float:
        """Pressure on the piston (zero when vacuum touches it)."""
        if self.wall_state.is_vacuum:
            return 0.0
        return self.params.p0 * _power(self.wall_R, 2.0 * self.params.gamma / (self.params.gamma - 1.0))

    @property
    def wall_R(self) -> float:
        gm1, M0 = self.params.gamma - 1.0, self.params.M0
        return max(1.0 - 0.5 * gm1 * M0, 0.0)

    @property
    def log_wall_density(self) -> float:
        """log of the wall density; finite whenever no vacuum region forms.

        In Case 2 the wall density behaves like exp(-M0) and drops below the
        vacuum cutoff long before a vacuum region appears.
        """
        gm1, M0 = self.params.gamma - 1.0, self.params.M0
        arg = 0.5 * gm1 * M0
        return 2.0 / gm1 * math.log1p(-arg) if arg < 1.0 else -math.inf

    @property
    def breakpoints(self) -> tuple:
        return (self.eta_head, self.eta_tail)

    def sample(self, eta: float) -> GasState:
        return fan_state(self, eta)

    def fan_R(self, eta):
        """rho**((gamma-1)/2) on the fan, clipped at the vacuum edge."""
        gamma, M0 = self.params.gamma, self.params.M0
        eta = np.asarray(eta, dtype=float)
        return np.maximum(1.0 - (gamma - 1.0) * (1.0 + M0 * (1.0 + eta)) / (gamma + 1.0), 0.0)

    def fan_profile(self, eta):
        """(rho, u, E, p) from the closed-form fan, valid for eta in the fan."""
        gamma, M0 = self.params.gamma, self.params.M0
        eta = np.asarray(eta, dtype=float)
        arg = (gamma - 1.0) * (1.0 + M0 * (1.0 + eta)) / (gamma + 1.0)
        R = np.maximum(1.0 - arg, 0.0)
        with np.errstate(divide="ignore"):
            log_rho = np.where(arg < 1.0, 2.0 / (gamma - 1.0) * np.log1p(-np.minimum(arg, 1.0)), -np.inf)
        rho = np.exp(log_rho)
        u = -1.0 + 2.0 * (eta + 1.0 + 1.0 / M0) / (gamma + 1.0)
        e = (self.params.E0 - 0.5) * R * R
        p = self.params.p0 * np.exp(gamma * log_rho)
        vac = rho < 1e-14
        u = np.where(vac, 0.0, u)
        E = np.where(vac, 0.0, 0.5 * u * u + e)
        rho = np.where(vac, 0.0, rho)
        p = np.where(vac, 0.0, p)
        return rho, u, E, p

    def profile(self, eta):
        eta = np.asarray(eta, dtype=float)
        rho, u, E, p = (np.array(a, dtype=float) for a in self.fan_profile(np.clip(eta, self.eta_head, self.eta_tail)))
        up = self.params.upstream
        head = eta <= self.eta_head
        rho[head], u[head], E[head], p[head] = up.rho, up.u, up.E, self.params.p0
        tail = eta >= self.eta_tail
        w = self.wall_state
        rho[tail], u[tail], E[tail], p[tail] = w.rho, w.u, w.E, self.p1
        return rho, u, E, p


def _power(base: float, exponent: float) -> float:
    if base <= 0.0:
        return 0.0
    return math.exp(exponent * math.log(base))


def solve_rarefaction(params: PistonParams) -> RarefactionSolution:
    params.require_finite(Direction.RECEDE)
    gamma, M0 = params.gamma, params.M0
    gm1 = gamma - 1.0
    head = -1.0 - 1.0 / M0
    vacuum = gm1 * M0 > 2.0
    if vacuum:
        tail = -1.0 + 2.0 / (gm1 * M0)
        wall = VACUUM
        s_max = math.inf
    else:
        R1 = max(1.0 - 0.5 * gm1 * M0, 0.0)
        tail = -R1 / M0
        rho1 = _power(R1, 2.0 / gm1)
        e1 = (params.E0 - 0.5) * R1 * R1
        wall = GasState(rho1, 0.0, e1)
        s_max = -2.0 * gamma / gm1 * math.log(R1) if R1 > 0.0 else math.inf
    return RarefactionSolution(params, head, tail, vacuum, wall, s_max)


def fan_state(sol: RarefactionSolution, eta: float) -> GasState:
    if eta > 0.0:
        raise DomainError(f"eta = {eta} lies behind the piston")
    if eta <= sol.eta_head:
        return sol.params.upstream
    if eta >= sol.eta_tail:
        return sol.wall_state
    rho, u, E, _ = sol.fan_profile(eta)
    return GasState(float(rho), float(u), float(E))


def riemann_invariant(s: GasState, gamma: float) -> float:
    """u + 2c/(gamma-1), constant across a 1-rarefaction."""
    return s.u + 2.0 * sound_speed(s, gamma) / (gamma - 1.0)
