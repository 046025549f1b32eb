"""Radon measures on the quarter plane {x < 0, t > 0} and their pairings.

A measure here is a finite sum of self-similar densities g(x/t) dx dt and
weighted Dirac measures on curves.  Pairings with compactly supported C^1
bumps are evaluated by quadrature; nothing is ever discretised on a grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import _quadrature as quad
from .gas_state import GasState, NumericalError, PistonParams
from .rarefaction import RarefactionSolution
from .shock import ShockSolution

QUANTITIES = ("rho", "mom", "momflux", "energy", "energyflux", "pressurework", "pressure")
MEASURE_NAMES = ("rho", "m", "n", "m1", "n1", "n2", "p")
PAIR_TOL = 1e-10


# -- test functions ---------------------------------------------------------

@dataclass(frozen=True)
class Bump:
    """phi(t, x) = cos^2(pi d / 2r) inside the disk of radius r, zero outside."""

    t0: float
    x0: float
    radius: float
    name: str = ""

    def __call__(self, t, x):
        t, x = np.asarray(t, dtype=float), np.asarray(x, dtype=float)
        z = np.hypot(t - self.t0, x - self.x0) / self.radius
        return np.where(z < 1.0, 0.5 * (1.0 + np.cos(np.pi * z)), 0.0)

    def _grad_factor(self, t, x):
        z = np.hypot(t - self.t0, x - self.x0) / self.radius
        # d/dd of cos^2 divided by d, written with sinc so the centre is regular
        k = -0.5 * math.pi ** 2 / self.radius ** 2
        return np.where(z < 1.0, k * np.sinc(z), 0.0)

    @property
    def dt(self) -> "Partial":
        return Partial(self, "t")

    @property
    def dx(self) -> "Partial":
        return Partial(self, "x")

    @property
    def center(self) -> tuple:
        return (self.t0, self.x0)

    def meets_domain(self) -> bool:
        """False when the support misses the closed quarter plane."""
        return self.t0 + self.radius > 0.0 and self.x0 - self.radius < 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "t0": self.t0, "x0": self.x0, "radius": self.radius}


@dataclass(frozen=True)
class Partial:
    bump: Bump
    axis: str

    def __call__(self, t, x):
        t, x = np.asarray(t, dtype=float), np.asarray(x, dtype=float)
        offset = t - self.bump.t0 if self.axis == "t" else x - self.bump.x0
        return self.bump._grad_factor(t, x) * offset

    @property
    def t0(self):
        return self.bump.t0

    @property
    def x0(self):
        return self.bump.x0

    @property
    def radius(self):
        return self.bump.radius

    def meets_domain(self) -> bool:
        return self.bump.meets_domain()


def standard_family(features=()) -> list:
    """Deterministic bumps covering the initial line, the piston path and the corner.

    ``features`` are similarity speeds (shock, fan edges, contact) that get
    extra bumps centred on the corresponding rays.
    """
    base = [
        (0.0, -1.0, 0.5), (0.2, -0.6, 0.5), (0.1, -2.0, 0.4), (0.0, -0.3, 0.45),
        (0.5, 0.0, 0.3), (1.0, 0.0, 0.5), (1.5, 0.0, 0.8), (0.3, 0.0, 0.6), (1.0, -0.1, 0.4),
        (0.0, 0.0, 0.5), (0.1, -0.1, 0.3), (0.25, -0.2, 1.0),
        (1.0, -1.0, 0.5), (1.5, -0.5, 0.7), (2.0, -2.0, 1.0), (1.0, -0.25, 0.5),
        (0.8, -1.2, 0.6), (2.0, -0.3, 0.5),
        (1.0, 1.0, 0.5), (-1.0, -1.0, 0.5),
    ]
    family = [Bump(t, x, r, f"b{i:02d}") for i, (t, x, r) in enumerate(base)]
    for j, eta in enumerate(sorted(set(float(e) for e in features if math.isfinite(e)))):
        for k, (t, r) in enumerate(((1.0, 0.25), (0.6, 0.5), (2.0, 0.4))):
            family.append(Bump(t, eta * t, r, f"f{j}{k}"))
    return family


# -- measures ---------------------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """Dirac weight w(t) = intercept + slope * t."""

    intercept: float = 0.0
    slope: float = 0.0

    def __call__(self, t):
        return self.intercept + self.slope * np.asarray(t, dtype=float)

    def scaled(self, c: float) -> "Weight":
        return Weight(c * self.intercept, c * self.slope)

    def to_dict(self) -> dict:
        if self.slope == 0.0:
            return {"kind": "constant", "value": self.intercept}
        return {"kind": "linear-in-t", "intercept": self.intercept, "slope": self.slope}


@dataclass(frozen=True)
class CurveDirac:
    """w(t) * delta_L for a curve x = path(t), t in [0, T).

    Straight lines through the origin are given by ``speed``; any other
    Lipschitz path may be passed as callables ``path`` and ``path_speed``.
    """

    weight: Weight
    speed: float = 0.0
    T: float = math.inf
    path: Optional[Callable] = None
    path_speed: Optional[Callable] = None

    def scaled(self, c: float) -> "CurveDirac":
        return replace(self, weight=self.weight.scaled(c))

    def pair(self, f, t_range=None, tol: float = PAIR_TOL) -> float:
        if self.path is not None:
            return self._pair_general(f, t_range, tol)
        arc = math.sqrt(1.0 + self.speed ** 2)
        if t_range is None:
            span = quad.chord(f.t0, f.x0, f.radius, self.speed)
            if span is None:
                return 0.0
            t_range = span
        lo, hi = max(t_range[0], 0.0), min(t_range[1], self.T)
        if not hi > lo:
            return 0.0
        g = lambda t: self.weight(t) * f(t, self.speed * t) * arc
        return quad.adaptive_gauss(g, lo, hi, tol)[0]

    def _pair_general(self, f, t_range, tol):
        if t_range is None:
            t_range = (f.t0 - f.radius, f.t0 + f.radius)
        lo, hi = max(t_range[0], 0.0), min(t_range[1], self.T)
        if not hi > lo:
            return 0.0

        def g(t):
            return float(self.weight(t) * f(t, self.path(t)) * math.sqrt(1.0 + self.path_speed(t) ** 2))

        val, err = integrate.quad(g, lo, hi, epsabs=tol, epsrel=0.0, limit=400)
        if err > 10 * tol:
            raise NumericalError(f"curve pairing reached error {err:.2e} > {tol:.1e}")
        return val

    def to_dict(self) -> dict:
        curve = {"kind": "line", "speed": self.speed} if self.path is None else {"kind": "path"}
        return {"curve": curve, "T": _num(self.T), "weight": self.weight.to_dict()}


@dataclass(frozen=True)
class Piece:
    """Profile of a self-similar density on lo < eta < hi."""

    lo: float
    hi: float
    value: float = 0.0
    fan: Optional[RarefactionSolution] = None
    quantity: str = ""
    scale: float = 1.0

    def __call__(self, eta):
        if self.fan is None:
            return np.full(np.shape(eta), self.value)
        return self.scale * quantity_of(self.quantity, *self.fan.fan_profile(eta))

    def subdivisions(self) -> list:
        """Interior eta breaks for fan pieces, graded toward the head.

        log(rho) falls off at rate 2*M0 / ((gamma+1) R) behind the head, a
        layer of width ~1/M0 that a plain adaptive rule can step over.
        """
        if self.fan is None or not math.isfinite(self.lo):
            return []
        prm = self.fan.params
        width = (prm.gamma + 1.0) / (2.0 * prm.M0)
        breaks = []
        step = width
        while self.lo + step < self.hi and step < 0.25 * (self.hi - self.lo):
            breaks.append(self.lo + step)
            step *= 2.0
        return breaks

    def scaled(self, c: float) -> "Piece":
        if self.fan is None:
            return replace(self, value=c * self.value)
        return replace(self, scale=c * self.scale)

    def to_dict(self) -> dict:
        out = {"lo": _num(self.lo), "hi": _num(self.hi)}
        if self.fan is None:
            out.update(kind="constant", value=self.value)
        else:
            p = self.fan.params
            out.update(kind="fan", quantity=self.quantity, scale=self.scale, gamma=p.gamma, M0=_num(p.M0))
        return out


@dataclass(frozen=True)
class SelfSimilarDensity:
    pieces: tuple

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=float)
        out = np.zeros(eta.shape)
        for pc in self.pieces:
            mask = (eta > pc.lo) & (eta <= pc.hi)
            if np.any(mask):
                out[mask] = pc(eta[mask])
        return out

    def scaled(self, c: float) -> "SelfSimilarDensity":
        return SelfSimilarDensity(tuple(pc.scaled(c) for pc in self.pieces))

    def pair(self, f, tol: float = PAIR_TOL) -> float:
        if not f.meets_domain():
            return 0.0
        total = 0.0
        for pc in self.pieces:
            if pc.fan is None and pc.value == 0.0:
                continue
            edges = [pc.lo, *pc.subdivisions(), min(pc.hi, 0.0)]
            density = None if pc.fan is None else pc
            val = 0.0
            for lo, hi in zip(edges, edges[1:]):
                a, b = quad.eta_to_alpha(lo), quad.eta_to_alpha(hi)
                val += quad.disk_wedge_integral(f, f.t0, f.x0, f.radius, a, b, density=density, tol=tol)
            total += val * pc.value if pc.fan is None else val
        return total

    def to_dict(self) -> dict:
        return {"pieces": [pc.to_dict() for pc in self.pieces]}


@dataclass(frozen=True)
class Measure:
    densities: tuple = ()
    diracs: tuple = ()

    def __add__(self, other: "Measure") -> "Measure":
        return Measure(self.densities + other.densities, self.diracs + other.diracs)

    def __mul__(self, c: float) -> "Measure":
        return Measure(tuple(d.scaled(c) for d in self.densities), tuple(d.scaled(c) for d in self.diracs))

    __rmul__ = __mul__

    def __neg__(self) -> "Measure":
        return self * -1.0

    @property
    def is_singular_free(self) -> bool:
        return not self.diracs

    def to_dict(self) -> dict:
        return {
            "densities": [d.to_dict() for d in self.densities],
            "diracs": [d.to_dict() for d in self.diracs],
        }


def pair(mu, f, tol: float = PAIR_TOL, t_range=None) -> float:
    """<mu, f> for a Measure, SelfSimilarDensity or CurveDirac."""
    if isinstance(mu, CurveDirac):
        return mu.pair(f, t_range=t_range, tol=tol)
    if isinstance(mu, SelfSimilarDensity):
        return mu.pair(f, tol=tol)
    total = 0.0
    for d in mu.densities:
        total += d.pair(f, tol=tol)
    for d in mu.diracs:
        total += d.pair(f, t_range=t_range, tol=tol)
    return total


def initial_line_integral(f, tol: float = PAIR_TOL) -> float:
    """Integral of f(0, x) over x < 0."""
    if f.t0 - f.radius >= 0.0 or f.t0 + f.radius <= 0.0:
        return 0.0
    h = math.sqrt(f.radius ** 2 - f.t0 ** 2)
    lo, hi = f.x0 - h, min(f.x0 + h, 0.0)
    if not hi > lo:
        return 0.0
    return quad.adaptive_gauss(lambda x: f(np.zeros_like(x), x), lo, hi, tol)[0]


def quantity_of(name: str, rho, u, E, p):
    if name == "rho":
        return rho
    if name == "mom":
        return rho * u
    if name == "momflux":
        return rho * u * u
    if name == "energy":
        return rho * E
    if name == "energyflux":
        return rho * u * E
    if name == "pressurework":
        return u * p
    if name == "pressure":
        return p
    raise KeyError(name)


# -- bundles ----------------------------------------------------------------

@dataclass(frozen=True)
class MeasureBundle:
    """The seven measures of a measure solution plus the piston pressure weight."""

    rho: Measure
    m: Measure
    n: Measure
    m1: Measure
    n1: Measure
    n2: Measure
    p: Measure
    w_p: Weight
    initial: GasState
    breakpoints: tuple = ()
    velocity: Optional[Callable] = None
    energy: Optional[Callable] = None
    wall_velocity: float = 0.0
    wall_energy: float = 0.0
    label: str = ""
    meta: dict = field(default_factory=dict)

    def measures(self) -> dict:
        return {name: getattr(self, name) for name in MEASURE_NAMES}

    def piston_dirac(self) -> CurveDirac:
        return CurveDirac(self.w_p)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "label": self.label,
            "meta": {k: _num(v) if isinstance(v, float) else v for k, v in self.meta.items()},
            "initial": {"rho": self.initial.rho, "u": self.initial.u, "E": self.initial.E},
            "breakpoints": [_num(b) for b in self.breakpoints],
            "measures": {name: mu.to_dict() for name, mu in self.measures().items()},
            "w_p": self.w_p.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def weak_residuals(bundle: MeasureBundle, phi: Bump, params: Optional[PistonParams] = None,
                   tol: float = PAIR_TOL) -> np.ndarray:
    """Left-hand sides of the mass, momentum and energy identities for ``phi``."""
    v0 = params.upstream if params is not None else bundle.initial
    ft, fx = phi.dt, phi.dx
    line = initial_line_integral(phi, tol)
    mass = pair(bundle.rho, ft, tol) + pair(bundle.m, fx, tol) + v0.rho * line
    mom = (pair(bundle.m, ft, tol) + pair(bundle.n, fx, tol) + pair(bundle.p, fx, tol)
           - pair(bundle.piston_dirac(), phi, tol) + v0.rho * v0.u * line)
    energy = (pair(bundle.m1, ft, tol) + pair(bundle.n1, fx, tol) + pair(bundle.n2, fx, tol)
              + v0.rho * v0.E * line)
    return np.array([mass, mom, energy])


def certify(bundle: MeasureBundle, family=None, tol: float = PAIR_TOL) -> np.ndarray:
    """Residuals for every member of ``family``; shape (len(family), 3)."""
    if family is None:
        family = standard_family(bundle.breakpoints)
    return np.array([weak_residuals(bundle, phi, tol=tol) for phi in family])


def _constant_measures(lo: float, hi: float, state: GasState, p: float) -> dict:
    vals = {q: float(quantity_of(q, state.rho, state.u, state.E, p)) for q in QUANTITIES}
    return {q: Piece(lo, hi, value=v) for q, v in vals.items()}


def _fan_measures(lo: float, hi: float, sol: RarefactionSolution) -> dict:
    return {q: Piece(lo, hi, fan=sol, quantity=q) for q in QUANTITIES}


def _assemble(pieces: list, w_p: Weight, initial: GasState, breakpoints, diracs=None, **kw) -> MeasureBundle:
    diracs = diracs or {}
    measures = {}
    for q, name in zip(QUANTITIES, MEASURE_NAMES):
        dens = SelfSimilarDensity(tuple(p[q] for p in pieces))
        measures[name] = Measure((dens,), tuple(diracs.get(name, ())))
    return MeasureBundle(w_p=w_p, initial=initial, breakpoints=tuple(breakpoints), **measures, **kw)


def _state_functions(profile):
    def velocity(eta):
        return profile(eta)[1]

    def energy(eta):
        return profile(eta)[2]

    return velocity, energy


def build_bundle(sol) -> MeasureBundle:
    """Measure-solution bundle of a shock, rarefaction or limit solution."""
    from .limits import LimitSolution

    if isinstance(sol, ShockSolution):
        prm = sol.params
        pieces = [
            _constant_measures(-math.inf, sol.sigma, sol.upstream, prm.p0),
            _constant_measures(sol.sigma, 0.0, sol.downstream, sol.p1),
        ]
        vel, en = _state_functions(sol.profile)
        return _assemble(pieces, Weight(sol.p1), sol.upstream, sol.breakpoints,
                         velocity=vel, energy=en, wall_energy=sol.E1, label="shock",
                         meta={"gamma": prm.gamma, "M0": prm.M0, "direction": prm.direction.value})
    if isinstance(sol, RarefactionSolution):
        prm = sol.params
        pieces = [
            _constant_measures(-math.inf, sol.eta_head, prm.upstream, prm.p0),
            _fan_measures(sol.eta_head, sol.eta_tail, sol),
        ]
        if sol.eta_tail < 0.0:
            pieces.append(_constant_measures(sol.eta_tail, 0.0, sol.wall_state, sol.p1))
        vel, en = _state_functions(sol.profile)
        return _assemble(pieces, Weight(sol.p1), prm.upstream, sol.breakpoints,
                         velocity=vel, energy=en, wall_energy=sol.wall_state.E, label="rarefaction",
                         meta={"gamma": prm.gamma, "M0": prm.M0, "direction": prm.direction.value})
    if isinstance(sol, LimitSolution):
        pieces = [_constant_measures(-math.inf, sol.split, sol.left, sol.left_p)]
        if sol.split < 0.0:
            pieces.append(_constant_measures(sol.split, 0.0, sol.right, sol.right_p))
        diracs = {}
        if sol.concentration:
            diracs = {"rho": (CurveDirac(Weight(slope=1.0)),),
                      "m1": (CurveDirac(Weight(slope=sol.E0)),)}
        vel, en = _state_functions(sol.profile)
        return _assemble(pieces, Weight(sol.wall_pressure), sol.left, sol.breakpoints, diracs=diracs,
                         velocity=vel, energy=en, wall_energy=sol.E0 if sol.concentration else sol.right.E,
                         label=sol.regime.value,
                         meta={"regime": sol.regime.value, "gamma": sol.gamma, "E0": sol.E0})
    raise TypeError(f"cannot build a measure bundle from {type(sol).__name__}")


def _num(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


__all__ = [
    "Bump", "Partial", "standard_family", "Weight", "CurveDirac", "Piece",
    "SelfSimilarDensity", "Measure", "MeasureBundle", "pair", "weak_residuals",
    "certify", "build_bundle", "initial_line_integral",
]
