"""First-order Godunov finite-volume solver for the piston problems.

The tube [-X, 0] is covered by N equal cells. The piston sits at x = 0 and is
imposed through two mirrored ghost cells (velocity negated); the left end is
fed with the constant upstream state. Interface fluxes use HLLC with
Einfeldt-Roe wave speeds, whose contact speed vanishes exactly at the mirrored
wall face, so the wall flux carries no mass and no energy.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .. import __version__
from ..gas_state import Direction, NumericalError, ParameterError, PistonParams
from ..rarefaction import solve_rarefaction
from ..shock import solve_shock
from ._backend import get_evolve

LEDGER_TOL = 1e-12


class FvError(NumericalError):
    """Raised when the scheme produces an inadmissible state; carries a state dump."""

    def __init__(self, message, t=None, cell=None, state=None, x=None):
        super().__init__(message)
        self.t = t
        self.cell = cell
        self.state = state
        self.x = x


@dataclass(frozen=True)
class FvConfig:
    params: PistonParams
    N: int = 400
    X: float = 2.0
    cfl: float = 0.8
    T: float = 0.5
    backend: str | None = None

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 4:
            raise ParameterError(f"need at least 4 cells, got {self.N}")
        if not 0.0 < self.cfl < 1.0:
            raise ParameterError(f"CFL number must lie in (0, 1), got {self.cfl}")
        if not (self.X > 0.0 and math.isfinite(self.X)):
            raise ParameterError(f"domain length must be positive, got {self.X}")
        if not (self.T >= 0.0 and math.isfinite(self.T)):
            raise ParameterError(f"end time must be finite and >= 0, got {self.T}")
        p = self.params
        if not (p.gamma > 1.0 and math.isfinite(p.M0)):
            raise ParameterError("finite-volume runs need gamma > 1 and finite M0")
        reach = self.T * max_wave_speed(p)
        if not reach < self.X:
            raise ParameterError(
                f"waves travel {reach:.4g} by T = {self.T}, beyond the domain length {self.X}")

    @property
    def dx(self) -> float:
        return self.X / self.N

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(-self.X, 0.0, self.N + 1)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[1:] + e[:-1])

    def refined(self, factor: int = 2) -> "FvConfig":
        return replace(self, N=self.N * factor)


def max_wave_speed(params: PistonParams) -> float:
    """Speed of the leftmost wave, the one that must not reach x = -X."""
    if params.direction is Direction.RUSH:
        return abs(solve_shock(params).sigma)
    return abs(solve_rarefaction(params).eta_head)


def exact_solution(params: PistonParams):
    if params.direction is Direction.RUSH:
        return solve_shock(params)
    return solve_rarefaction(params)


def _conserved(rho, u, E):
    return np.stack([rho, rho * u, rho * E], axis=-1)


def exact_cell_averages(params: PistonParams, edges, T: float, order: int = 8) -> np.ndarray:
    """Cell averages of (rho, rho u, rho E) of the exact solution at time T."""
    edges = np.asarray(edges, dtype=float)
    n = len(edges) - 1
    if T == 0.0:
        up = params.upstream
        return np.tile(up.conserved(), (n, 1))
    sol = exact_solution(params)
    cuts = [b * T for b in sol.breakpoints if edges[0] < b * T < edges[-1]]
    nodes = np.union1d(edges, cuts)
    owner = np.clip(np.searchsorted(edges, 0.5 * (nodes[1:] + nodes[:-1])) - 1, 0, n - 1)
    xg, wg = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(nodes)
    mid = 0.5 * (nodes[1:] + nodes[:-1])
    x = mid[:, None] + half[:, None] * xg[None, :]
    rho, u, E, _ = sol.profile(x / T)
    q = _conserved(np.asarray(rho), np.asarray(u), np.asarray(E))
    sub = np.einsum("ijk,j->ik", q, wg) * half[:, None]
    out = np.zeros((n, 3))
    np.add.at(out, owner, sub)
    return out / np.diff(edges)[:, None]


def primitives(U: np.ndarray, gamma: float):
    rho = U[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(rho > 0.0, U[:, 1] / rho, 0.0)
        E = np.where(rho > 0.0, U[:, 2] / rho, 0.0)
    p = (gamma - 1.0) * (U[:, 2] - 0.5 * rho * u * u)
    return rho, u, E, p


@dataclass
class FvResult:
    config: FvConfig
    U: np.ndarray
    t: float
    steps: int
    backend: str
    initial_totals: np.ndarray
    boundary_flux: np.ndarray     # time-integrated fluxes through x = -X and x = 0
    max_step_imbalance: float
    wall_pressure_avg: float
    exact: np.ndarray = field(repr=False, default=None)

    @property
    def x(self) -> np.ndarray:
        return self.config.centers

    @property
    def rho(self):
        return self.U[:, 0]

    def primitives(self):
        return primitives(self.U, self.config.params.gamma)

    @property
    def totals(self) -> np.ndarray:
        return self.U.sum(axis=0) * self.config.dx

    @property
    def ledger_residual(self) -> np.ndarray:
        """Relative mismatch between total change and net boundary inflow."""
        expected = self.initial_totals + self.boundary_flux[0] - self.boundary_flux[1]
        scale = np.maximum(np.abs(self.initial_totals), np.abs(self.totals))
        return np.abs(self.totals - expected) / np.maximum(scale, 1e-300)

    @property
    def wall_flux(self) -> np.ndarray:
        return self.boundary_flux[1]

    def l1_errors(self, exclude=None) -> np.ndarray:
        """L1 error of each conserved component against exact cell averages."""
        diff = np.abs(self.U - self.exact)
        if exclude is not None:
            diff = diff[~exclude]
        return diff.sum(axis=0) * self.config.dx

    @property
    def l1_error(self) -> float:
        return float(self.l1_errors()[0])

    def shock_band(self, cells: int) -> np.ndarray:
        """Mask of cells within ``cells`` of an exact discontinuity at time t."""
        mask = np.zeros(self.config.N, dtype=bool)
        if cells <= 0 or self.t == 0.0:
            return mask
        sol = exact_solution(self.config.params)
        jumps = sol.breakpoints if isinstance(sol.breakpoints, tuple) and self.config.params.direction is Direction.RUSH else ()
        for b in jumps:
            xs = b * self.t
            mask |= np.abs(self.x - xs) <= cells * self.config.dx
        return mask

    def wall_mass_fraction(self, fraction: float = 0.05) -> float:
        k = max(1, int(round(fraction * self.config.N)))
        return float(self.U[-k:, 0].sum() / self.U[:, 0].sum())

    def plateau_density(self) -> float:
        """Density at the middle of the exact constant state next to the wall.

        The wall cell itself carries a grid-invariant start-up entropy layer
        when a rarefaction is centred on the wall, so it is not sampled.
        """
        sol = exact_solution(self.config.params)
        edge = sol.breakpoints[-1] * self.t
        i = int(np.argmin(np.abs(self.x - 0.5 * edge)))
        return float(self.U[i, 0])

    def to_csv(self) -> str:
        rho, u, E, p = self.primitives()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_center", "rho", "u", "E", "p"])
        for row in zip(self.x, rho, u, E, p):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def metadata(self) -> dict:
        c = self.config
        p = c.params
        return {
            "schema": 1,
            "version": __version__,
            "gamma": p.gamma,
            "M0": p.M0,
            "E0": p.E0,
            "direction": p.direction.value,
            "N": c.N,
            "X": c.X,
            "cfl": c.cfl,
            "T": c.T,
            "t": self.t,
            "steps": self.steps,
            "backend": self.backend,
            "l1_error": {k: float(v) for k, v in zip(("rho", "m", "energy"), self.l1_errors())},
            "ledger_residual": [float(v) for v in self.ledger_residual],
            "max_step_imbalance": self.max_step_imbalance,
            "wall_flux": [float(v) for v in self.wall_flux],
            "wall_pressure_avg": self.wall_pressure_avg,
        }

    def to_json(self) -> str:
        return json.dumps(self.metadata(), indent=2, sort_keys=True)


def run_fv(config: FvConfig) -> FvResult:
    params = config.params
    backend, evolve = get_evolve(config.backend)
    exact0 = exact_cell_averages(params, config.edges, 0.0)
    U = exact0.copy()
    left = params.upstream.conserved()
    totals0 = U.sum(axis=0) * config.dx
    if config.T == 0.0:
        out = (0.0, 0, np.zeros((2, 3)), 0.0, 0.0, 0.0, 0, -1)
    else:
        out = evolve(U, params.gamma, config.dx, config.T, config.cfl, left, 0.5 * config.T)
    t, steps, bflux, wall_int, wall_time, imbalance, status, bad = out
    if status:
        what = "density" if status == 1 else "internal energy"
        raise FvError(
            f"non-positive {what} in cell {bad} (x = {config.centers[bad]:.6g}) at t = {t:.6g}"
            f" after {steps} steps: state {U[bad].tolist()}",
            t=t, cell=int(bad), state=U.copy(), x=config.centers)
    if not np.all(np.isfinite(U)):
        raise FvError(f"non-finite state at t = {t:.6g}", t=t, state=U.copy(), x=config.centers)
    p_avg = wall_int / wall_time if wall_time > 0.0 else math.nan
    return FvResult(config, U, float(t), int(steps), backend, totals0, np.asarray(bflux),
                    float(imbalance), float(p_avg),
                    exact=exact_cell_averages(params, config.edges, float(t)))


@dataclass
class GridStudy:
    cells: list
    errors: list
    order: float
    results: list = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {"schema": 1, "cells": list(self.cells),
                "l1_errors": [float(e) for e in self.errors], "order": self.order}


def grid_study(config: FvConfig, cells, exclude_cells: int = 0) -> GridStudy:
    cells = [int(n) for n in cells]
    if len(cells) < 2:
        raise ParameterError("a grid study needs at least two resolutions")
    results, errors = [], []
    for n in cells:
        res = run_fv(replace(config, N=n))
        errors.append(float(res.l1_errors(res.shock_band(exclude_cells) if exclude_cells else None)[0]))
        results.append(res)
    if any(b >= a for a, b in zip(errors, errors[1:])):
        warnings.warn(f"L1 errors do not decrease monotonically: {errors}", RuntimeWarning, stacklevel=2)
    slope = np.polyfit(np.log(cells), np.log(errors), 1)[0]
    return GridStudy(cells, errors, float(-slope), results)


def concentration_trend(E0: float, machs, X: float = 0.04, T: float = 0.5, N: int = 1600,
                        fraction: float = 0.05, backend=None):
    """Mass fraction held by the cells nearest the wall, one entry per Mach number."""
    out = []
    for M0 in machs:
        params = PistonParams.from_energy(E0, float(M0))
        out.append(run_fv(FvConfig(params, N=N, X=X, T=T, backend=backend)).wall_mass_fraction(fraction))
    return out


def convergence_order(config: FvConfig, refinements: int = 3, exclude_cells: int = 0) -> float:
    """Observed L1 order of the density on N, 2N, ..., 2**(refinements-1) N."""
    if refinements < 3:
        raise ParameterError(f"need at least 3 refinements, got {refinements}")
    cells = [config.N * 2 ** k for k in range(refinements)]
    return grid_study(config, cells, exclude_cells).order
