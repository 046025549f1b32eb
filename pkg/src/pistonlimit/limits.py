"""High-Mach-number limits and weak convergence of the finite-M0 measure solutions.

Case 1 fixes gamma > 1 (so E0 -> 1/2); Case 2 fixes E0 > 1/2 (so gamma -> 1,
with gamma recovered from (E0, M0) at every finite Mach number).
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .gas_state import VACUUM, Direction, GasState, ParameterError, PistonParams
from .measure import MEASURE_NAMES, build_bundle, pair, standard_family
from .rarefaction import solve_rarefaction
from .shock import solve_shock


class Regime(enum.Enum):
    CASE1_RUSH = "rush1"
    CASE2_RUSH = "rush2"
    CASE1_RECEDE = "recede1"
    CASE2_RECEDE = "recede2"

    @property
    def fixed_gamma(self) -> bool:
        return self in (Regime.CASE1_RUSH, Regime.CASE1_RECEDE)

    @property
    def direction(self) -> Direction:
        return Direction.RUSH if self in (Regime.CASE1_RUSH, Regime.CASE2_RUSH) else Direction.RECEDE


@dataclass(frozen=True)
class LimitSolution:
    regime: Regime
    parameter: float
    gamma: float
    E0: float
    left: GasState
    right: GasState
    split: float
    left_p: float
    right_p: float
    wall_pressure: float
    concentration: bool = False
    rho1: float = math.nan
    sigma: float = math.nan
    p1: float = math.nan
    E1: float = math.nan
    rho1_sigma: float = math.nan
    fan_internal_energy: float = math.nan

    @property
    def breakpoints(self) -> tuple:
        return (self.split,)

    @property
    def pressureless(self) -> bool:
        return self.left_p == 0.0 and self.right_p == 0.0 and self.wall_pressure == 0.0

    def profile(self, eta):
        eta = np.asarray(eta, dtype=float)
        # rush limits put the tie on the downstream side, recede limits on the gas side
        right = eta >= self.split if self.regime.direction is Direction.RUSH else eta > self.split
        out = []
        for a, b in ((self.left.rho, self.right.rho), (self.left.u, self.right.u),
                     (self.left.E, self.right.E), (self.left_p, self.right_p)):
            out.append(np.where(right, b, a))
        return tuple(out)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, float) and math.isinf(v):
                return "inf" if v > 0 else "-inf"
            if isinstance(v, float) and math.isnan(v):
                return None
            return v

        return {
            "schema": 1,
            "regime": self.regime.value,
            "parameter": self.parameter,
            "gamma": self.gamma,
            "E0": self.E0,
            "left": _state_dict(self.left, self.left_p),
            "right": _state_dict(self.right, self.right_p),
            "split": self.split,
            "wall_pressure": self.wall_pressure,
            "concentration": self.concentration,
            "pressureless": self.pressureless,
            "rho1": enc(self.rho1), "sigma": enc(self.sigma), "p1": enc(self.p1),
            "E1": enc(self.E1), "rho1_sigma": enc(self.rho1_sigma),
            "fan_internal_energy": enc(self.fan_internal_energy),
        }


def _state_dict(s: GasState, p: float) -> dict:
    return {"rho": s.rho, "u": s.u, "E": s.E, "p": p}


def _regime(regime) -> Regime:
    return regime if isinstance(regime, Regime) else Regime(regime)


def shock_limits(regime, parameter: float) -> LimitSolution:
    """M0 = inf limit of the rushing piston; ``parameter`` is gamma (Case 1) or E0 (Case 2)."""
    regime = _regime(regime)
    if regime is Regime.CASE1_RUSH:
        gamma = parameter
        if not gamma > 1.0:
            raise ParameterError(f"Case 1 needs gamma > 1, got {gamma}")
        rho1 = (gamma + 1.0) / (gamma - 1.0)
        p1 = 0.5 * (gamma + 1.0)
        sigma = 0.5 * (1.0 - gamma)
        return LimitSolution(
            regime, parameter, gamma, 0.5,
            left=GasState(1.0, 1.0, 0.5), right=GasState(rho1, 0.0, 0.5),
            split=sigma, left_p=0.0, right_p=p1, wall_pressure=p1,
            rho1=rho1, sigma=sigma, p1=p1, E1=0.5, rho1_sigma=rho1 * sigma,
        )
    if regime is Regime.CASE2_RUSH:
        E0 = parameter
        if not E0 > 0.5:
            raise ParameterError(f"Case 2 needs E0 > 1/2, got {E0}")
        background = GasState(1.0, 1.0, E0)
        # the shock sits on the piston; its mass and energy become t*delta_P, E0*t*delta_P
        return LimitSolution(
            regime, parameter, 1.0, E0,
            left=background, right=background, split=0.0,
            left_p=0.0, right_p=0.0, wall_pressure=1.0, concentration=True,
            rho1=math.inf, sigma=0.0, p1=1.0, E1=E0, rho1_sigma=-1.0,
        )
    raise ParameterError(f"{regime.value} is not a rushing-piston regime")


def recede_limits(regime, parameter: float) -> LimitSolution:
    """M0 = inf limit of the receding piston: a contact at eta = -1 backed by vacuum."""
    regime = _regime(regime)
    if regime is Regime.CASE1_RECEDE:
        gamma = parameter
        if not gamma > 1.0:
            raise ParameterError(f"Case 1 needs gamma > 1, got {gamma}")
        E0, e_fan = 0.5, 0.0
    elif regime is Regime.CASE2_RECEDE:
        gamma, E0 = 1.0, parameter
        if not E0 > 0.5:
            raise ParameterError(f"Case 2 needs E0 > 1/2, got {E0}")
        e_fan = E0 - 0.5
    else:
        raise ParameterError(f"{regime.value} is not a receding-piston regime")
    return LimitSolution(
        regime, parameter, gamma, E0,
        left=GasState(1.0, -1.0, E0), right=VACUUM, split=-1.0,
        left_p=0.0, right_p=0.0, wall_pressure=0.0, fan_internal_energy=e_fan,
    )


def limit_solution(regime, parameter: float) -> LimitSolution:
    regime = _regime(regime)
    if regime.direction is Direction.RUSH:
        return shock_limits(regime, parameter)
    return recede_limits(regime, parameter)


def finite_params(regime, parameter: float, M0: float) -> PistonParams:
    regime = _regime(regime)
    if regime.fixed_gamma:
        return PistonParams(parameter, M0, regime.direction)
    return PistonParams.from_energy(parameter, M0, regime.direction)


def finite_solution(regime, parameter: float, M0: float):
    params = finite_params(regime, parameter, M0)
    if params.direction is Direction.RUSH:
        return solve_shock(params)
    return solve_rarefaction(params)


@dataclass
class ConvergenceReport:
    regime: Regime
    parameter: float
    M0_sequence: list
    phi_names: list
    gaps: np.ndarray          # (n_M0, 7, n_phi)
    wp_gaps: np.ndarray       # (n_M0,) L1 distance of w_p on [0, T]
    T: float
    tolerances: list
    finite_vacuum: list = field(default_factory=list)

    @property
    def measure_names(self) -> tuple:
        return MEASURE_NAMES

    def column(self, measure: str, phi_index: int) -> np.ndarray:
        return self.gaps[:, MEASURE_NAMES.index(measure), phi_index]

    def monotone(self) -> np.ndarray:
        """(7, n_phi) flags: non-increasing from the second M0 on, up to quadrature noise."""
        tail = self.gaps[1:]
        slack = 2.0 * np.asarray(self.tolerances[1:])[:, None, None]
        ok = tail[1:] <= tail[:-1] + slack[1:]
        return ok.all(axis=0) if len(tail) > 1 else np.ones(self.gaps.shape[1:], dtype=bool)

    def observed_rates(self) -> np.ndarray:
        """Least-squares slope of -log(gap) against log(M0), per measure (max over phi)."""
        logm = np.log(np.asarray(self.M0_sequence, dtype=float))
        worst = self.gaps.max(axis=2)
        rates = np.full(worst.shape[1], math.nan)
        for j in range(worst.shape[1]):
            col = worst[:, j]
            if len(col) >= 2 and np.all(col > 0):
                rates[j] = -np.polyfit(logm, np.log(col), 1)[0]
        return rates

    def rows(self):
        for i, M0 in enumerate(self.M0_sequence):
            for j, name in enumerate(MEASURE_NAMES):
                for k, phi in enumerate(self.phi_names):
                    yield M0, name, phi, float(self.gaps[i, j, k])
            yield M0, "w_p", "L1[0,T]", float(self.wp_gaps[i])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["M0", "measure", "phi", "gap"])
        for M0, name, phi, gap in self.rows():
            w.writerow([repr(float(M0)), name, phi, repr(gap)])
        return buf.getvalue()

    def summary(self) -> dict:
        mono = self.monotone()
        final = self.gaps[-1]
        return {
            "schema": 1,
            "regime": self.regime.value,
            "parameter": self.parameter,
            "M0_sequence": [float(m) for m in self.M0_sequence],
            "T": self.T,
            "quadrature_tolerances": list(self.tolerances),
            "max_final_gap": {n: float(final[j].max()) for j, n in enumerate(MEASURE_NAMES)},
            "monotone": {n: bool(mono[j].all()) for j, n in enumerate(MEASURE_NAMES)},
            "observed_rates": {n: (None if math.isnan(r) else float(r))
                               for n, r in zip(MEASURE_NAMES, self.observed_rates())},
            "wp_gaps": [float(g) for g in self.wp_gaps],
            "finite_vacuum": list(self.finite_vacuum),
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def quadrature_tolerance(M0: float) -> float:
    return 1e-11 if M0 >= 1e3 else 1e-10


def convergence_study(regime, parameter: float, M0_sequence, phi_family=None, T: float = 2.0) -> ConvergenceReport:
    regime = _regime(regime)
    seq = [float(m) for m in M0_sequence]
    if not seq:
        raise ParameterError("empty Mach sequence")
    if any(not 0.0 < m < math.inf for m in seq):
        raise ParameterError("Mach numbers must be finite and positive")
    if any(b <= a for a, b in zip(seq, seq[1:])):
        raise ParameterError("Mach sequence must be strictly increasing")

    limit = limit_solution(regime, parameter)
    if phi_family is None:
        phi_family = standard_family(limit.breakpoints)
    limit_bundle = build_bundle(limit)
    tol_lim = quadrature_tolerance(seq[-1])
    ref = np.array([[pair(mu, phi, tol_lim) for phi in phi_family]
                    for mu in limit_bundle.measures().values()])

    gaps = np.empty((len(seq), len(MEASURE_NAMES), len(phi_family)))
    wp_gaps = np.empty(len(seq))
    vacuum = []
    tols = []
    for i, M0 in enumerate(seq):
        tol = quadrature_tolerance(M0)
        tols.append(tol)
        sol = finite_solution(regime, parameter, M0)
        vacuum.append(bool(getattr(sol, "vacuum", False)))
        bundle = build_bundle(sol)
        for j, mu in enumerate(bundle.measures().values()):
            for k, phi in enumerate(phi_family):
                gaps[i, j, k] = abs(pair(mu, phi, tol) - ref[j, k])
        wp_gaps[i] = T * abs(bundle.w_p.intercept - limit_bundle.w_p.intercept)
    return ConvergenceReport(regime, parameter, seq, [p.name for p in phi_family],
                             gaps, wp_gaps, T, tols, vacuum)
