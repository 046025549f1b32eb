"""Exact solution of the rushing-piston problem (single reflected shock)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gas_state import (
    Direction,
    DomainError,
    GasState,
    NumericalError,
    PistonParams,
    lambda1,
    pressure,
)


@dataclass(frozen=True)
class ShockSolution:
    params: PistonParams
    sigma: float
    upstream: GasState
    downstream: GasState
    p1: float
    # rho1 - 1, kept separately so huge densities near gamma = 1 stay accurate
    rho1_minus_one: float

    @property
    def rho1(self) -> float:
        return self.downstream.rho

    @property
    def E1(self) -> float:
        return self.downstream.E

    @property
    def rho1_sigma(self) -> float:
        return -1.0 - 1.0 / self.rho1_minus_one

    @property
    def breakpoints(self) -> tuple:
        return (self.sigma,)

    def sample(self, eta: float) -> GasState:
        return sample_shock(self, eta)

    def profile(self, eta):
        """Vectorised (rho, u, E, p) at similarity coordinates ``eta``."""
        eta = np.asarray(eta, dtype=float)
        down = eta >= self.sigma
        up, dn = self.upstream, self.downstream
        rho = np.where(down, dn.rho, up.rho)
        u = np.where(down, dn.u, up.u)
        E = np.where(down, dn.E, up.E)
        p = np.where(down, self.p1, self.params.p0)
        return rho, u, E, p

    def check(self, tol: float = 1e-10):
        """Raise :class:`NumericalError` if any structural invariant fails."""
        gamma = self.params.gamma
        if not self.rho1_minus_one > 0.0:
            raise NumericalError(f"entropy violation: rho1 - 1 = {self.rho1_minus_one}")
        if abs(self.sigma * self.rho1_minus_one + 1.0) > 1e-12:
            raise NumericalError("shock speed inconsistent with mass jump")
        if not lambda1(self.downstream, gamma) < self.sigma < lambda1(self.upstream, gamma):
            raise NumericalError("Lax inequalities violated")
        p_eos = pressure(self.downstream, gamma)
        if abs(p_eos - self.p1) > tol * max(1.0, self.p1):
            raise NumericalError(f"p1 = {self.p1} disagrees with EOS {p_eos}")


def solve_shock(params: PistonParams) -> ShockSolution:
    params.require_finite(Direction.RUSH)
    gm1 = params.gamma - 1.0
    E0, p0 = params.E0, params.p0
    # quadratic a*y**2 + b*y - 1 = 0 in y = rho1 - 1; take the positive root
    a = gm1 * (E0 + p0)
    b = gm1 * E0 - p0 - 1.0
    disc = b * b + 4.0 * a
    if disc < 0.0:
        raise NumericalError(f"negative discriminant {disc} for {params}")
    root = math.sqrt(disc)
    y = (root - b) / (2.0 * a) if b <= 0.0 else 2.0 / (root + b)
    rho1 = 1.0 + y
    sigma = -1.0 / y
    p1 = p0 + 1.0 + 1.0 / y
    E1 = (y * (E0 + p0) + E0) / rho1
    if not y > 0.0:
        raise NumericalError(f"non-entropic root rho1 = {rho1}")
    return ShockSolution(
        params=params,
        sigma=sigma,
        upstream=params.upstream,
        downstream=GasState(rho1, 0.0, E1),
        p1=p1,
        rho1_minus_one=y,
    )


def sample_shock(sol: ShockSolution, eta: float) -> GasState:
    if eta > 0.0:
        raise DomainError(f"eta = {eta} lies behind the piston")
    # the measure-zero tie eta == sigma resolves to the downstream state
    return sol.downstream if eta >= sol.sigma else sol.upstream


def rh_residual(up: GasState, down: GasState, sigma: float, gamma: float) -> np.ndarray:
    """sigma*[U] - [F(U)] for mass, momentum and energy ([q] = q_down - q_up)."""
    pu, pd = pressure(up, gamma), pressure(down, gamma)
    jump_u = down.conserved() - up.conserved()
    jump_f = _flux(down, pd) - _flux(up, pu)
    return sigma * jump_u - jump_f


def scaled_rh_residual(up: GasState, down: GasState, sigma: float, gamma: float) -> np.ndarray:
    """Residuals divided by max(1, |lhs|, |rhs|) of each jump relation."""
    pu, pd = pressure(up, gamma), pressure(down, gamma)
    lhs = sigma * (down.conserved() - up.conserved())
    rhs = _flux(down, pd) - _flux(up, pu)
    terms = np.stack([
        np.abs(sigma * down.conserved()), np.abs(sigma * up.conserved()),
        np.abs(_flux(down, pd)), np.abs(_flux(up, pu)),
    ])
    scale = np.maximum(1.0, terms.max(axis=0))
    return (lhs - rhs) / scale


def _flux(s: GasState, p: float) -> np.ndarray:
    return np.array([s.rho * s.u, s.rho * s.u * s.u + p, s.rho * s.u * s.E + s.u * p])


def entropy_indicator(s: GasState, gamma: float) -> float:
    """p / rho**gamma, which a compressive shock must increase."""
    return pressure(s, gamma) / s.rho ** gamma


__all__ = [
    "ShockSolution", "solve_shock", "sample_shock", "rh_residual",
    "scaled_rh_residual", "entropy_indicator",
]
