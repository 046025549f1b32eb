"""Command-line front end.

Every subcommand prints a JSON document on stdout and, with ``--out DIR``,
also writes it (plus any CSV tables) into DIR. Exit codes: 0 success,
1 usage error, 2 numerical failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .gas_state import (
    Direction, DomainError, NumericalError, ParameterError, PistonError, PistonParams,
)
from .limits import Regime, convergence_study, finite_solution, limit_solution
from .measure import build_bundle, certify, standard_family
from .rarefaction import solve_rarefaction
from .shock import ShockSolution, scaled_rh_residual, solve_shock

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
DEFAULT_VERIFY_TOL = 5e-9

CSV_HELP = {
    "solve": "profile.csv columns: eta, rho, u, E, p (similarity coordinate eta = x/t)",
    "converge": "convergence.csv columns: M0, measure, phi, gap",
    "validate-fv": "fv_N<cells>.csv columns: x_center, rho, u, E, p (cell averages at t = T)",
    "sweep": "sweep.csv columns: M0, gamma, then the regime's scalar quantities",
}


class UsageError(PistonError):
    pass


class Parser(argparse.ArgumentParser):
    """argparse with exit code 1 for usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- output helpers ------------------------------------------------------------

def encode(v):
    """JSON-safe copy with +-inf as strings and nan as null."""
    if isinstance(v, dict):
        return {str(k): encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode(x) for x in v]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        v = v.item()
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return None
    if isinstance(v, (Direction, Regime)):
        return v.value
    return v


def dumps(doc) -> str:
    return json.dumps(encode(doc), indent=2, sort_keys=True) + "\n"


def atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def header(args, parameters: dict, tolerances: dict) -> dict:
    h = {
        "schema": 1,
        "tool": "pistonlimit",
        "version": __version__,
        "command": args.command,
        "parameters": parameters,
        "tolerances": tolerances,
    }
    if getattr(args, "timestamp", False):
        h["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return h


def emit(args, doc: dict, name: str, tables=()):
    text = dumps(doc)
    sys.stdout.write(text)
    if args.out:
        atomic_write(os.path.join(args.out, name), text)
        for fname, body in tables:
            atomic_write(os.path.join(args.out, fname), body)


def table(header_row, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header_row)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# -- argument parsing helpers --------------------------------------------------

def float_list(text: str) -> list:
    items = [s for s in text.replace(" ", "").split(",") if s]
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    try:
        return [float(s) for s in items]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def int_list(text: str) -> list:
    vals = float_list(text)
    if any(v != int(v) or v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"cell counts must be positive integers: {text}")
    return [int(v) for v in vals]


def direction_of(args) -> Direction:
    return Direction.RECEDE if args.recede else Direction.RUSH


def params_of(args) -> PistonParams:
    """PistonParams from --gamma/--mach or --E0/--mach."""
    d = direction_of(args)
    if args.mach is None:
        raise UsageError("--mach is required")
    if args.E0 is not None and args.gamma is not None:
        raise UsageError("give either --gamma or --E0, not both")
    if args.E0 is not None:
        return PistonParams.from_energy(args.E0, args.mach, d)
    if args.gamma is None:
        raise UsageError("--gamma or --E0 is required")
    return PistonParams(args.gamma, args.mach, d)


def regime_parameter(args) -> tuple:
    regime = Regime(args.case)
    if regime.fixed_gamma:
        if args.gamma is None:
            raise UsageError(f"--gamma is required for case {regime.value}")
        return regime, args.gamma
    if args.E0 is None:
        raise UsageError(f"--E0 is required for case {regime.value}")
    return regime, args.E0


def params_dict(p: PistonParams) -> dict:
    return {"gamma": p.gamma, "M0": p.M0, "E0": p.E0, "p0": p.p0, "direction": p.direction.value}


def state_dict(s, p=None) -> dict:
    d = {"rho": s.rho, "u": s.u, "E": s.E}
    if p is not None:
        d["p"] = p
    return d


def solution_dict(sol) -> dict:
    if isinstance(sol, ShockSolution):
        return {
            "type": "shock",
            "sigma": sol.sigma, "rho1": sol.rho1, "p1": sol.p1, "E1": sol.E1,
            "rho1_sigma": sol.rho1_sigma,
            "upstream": state_dict(sol.upstream, sol.params.p0),
            "downstream": state_dict(sol.downstream, sol.p1),
            "rh_residual_scaled": scaled_rh_residual(sol.upstream, sol.downstream, sol.sigma,
                                                     sol.params.gamma).tolist(),
            "vacuum": False,
        }
    return {
        "type": "rarefaction",
        "eta_head": sol.eta_head, "eta_tail": sol.eta_tail,
        "vacuum": sol.vacuum,
        "vacuum_boundary": sol.eta_tail if sol.vacuum else None,
        "upstream": state_dict(sol.params.upstream, sol.params.p0),
        "wall_state": state_dict(sol.wall_state, sol.p1),
        "wall_density": sol.wall_state.rho,
        "p1": sol.p1,
    }


# -- subcommands ---------------------------------------------------------------

def cmd_solve(args) -> int:
    p = params_of(args)
    sol = solve_shock(p) if p.direction is Direction.RUSH else solve_rarefaction(p)
    lo = min(sol.breakpoints) - 0.5 if args.eta_min is None else args.eta_min
    if not lo < 0.0:
        raise UsageError("--eta-min must be negative")
    eta = np.linspace(lo, 0.0, args.samples)
    prof = sol.profile(eta)
    doc = header(args, params_dict(p), {})
    doc["solution"] = solution_dict(sol)
    emit(args, doc, "solution.json",
         [("profile.csv", table(["eta", "rho", "u", "E", "p"], zip(eta, *prof)))])
    return EXIT_OK


def cmd_limit(args) -> int:
    regime, par = regime_parameter(args)
    lim = limit_solution(regime, par)
    doc = header(args, {"case": regime.value, "parameter": par}, {})
    doc["limit"] = lim.to_dict()
    emit(args, doc, "limit.json")
    return EXIT_OK


def _family(args, breakpoints):
    if args.phi_family == "standard":
        return standard_family(breakpoints)
    if args.phi_family == "base":
        return standard_family(())
    raise UsageError(f"unknown test-function family {args.phi_family!r}")


def cmd_verify(args) -> int:
    if args.case:
        regime, par = regime_parameter(args)
        sol = limit_solution(regime, par)
        params = {"case": regime.value, "parameter": par}
    else:
        p = params_of(args)
        sol = solve_shock(p) if p.direction is Direction.RUSH else solve_rarefaction(p)
        params = params_dict(p)
    if args.perturb_sigma:
        if not isinstance(sol, ShockSolution):
            raise UsageError("--perturb-sigma applies to finite rushing-piston bundles only")
        sol = dataclasses.replace(sol, sigma=sol.sigma * (1.0 + args.perturb_sigma))
        params["perturb_sigma"] = args.perturb_sigma
    bundle = build_bundle(sol)
    family = _family(args, bundle.breakpoints)
    res = np.abs(certify(bundle, family))
    worst = res.max(axis=0)
    names = ("mass", "momentum", "energy")
    ok = bool(np.all(worst <= args.tol))
    doc = header(args, params, {"residual": args.tol})
    doc["verify"] = {
        "family_size": len(family),
        "max_residual": dict(zip(names, worst.tolist())),
        "dominant": names[int(np.argmax(worst))],
        "worst_phi": {n: family[int(np.argmax(res[:, j]))].name for j, n in enumerate(names)},
        "pass": ok,
    }
    emit(args, doc, "verify.json")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_converge(args) -> int:
    regime, par = regime_parameter(args)
    seq = args.mach_seq
    if not seq:
        raise UsageError("empty Mach sequence")
    limit = limit_solution(regime, par)
    family = _family(args, limit.breakpoints)
    rep = convergence_study(regime, par, seq, family, T=args.tend)
    doc = header(args, {"case": regime.value, "parameter": par, "mach_seq": seq, "T": args.tend},
                 {"quadrature": rep.tolerances})
    doc["convergence"] = rep.summary()
    emit(args, doc, "convergence.json", [("convergence.csv", rep.to_csv())])
    return EXIT_OK


def cmd_validate_fv(args) -> int:
    from .fv import FvConfig, grid_study

    p = params_of(args)
    cells = args.cells
    if len(cells) < 2:
        raise UsageError("--cells needs at least two resolutions")
    cfg = FvConfig(p, N=cells[0], X=args.length, cfl=args.cfl, T=args.tend)
    study = grid_study(cfg, cells, exclude_cells=args.exclude_cells)
    runs = []
    tables = []
    for res in study.results:
        meta = res.metadata()
        meta.pop("version", None)
        meta.pop("schema", None)
        if p.direction is Direction.RECEDE:
            meta["plateau_density"] = res.plateau_density()
        runs.append(meta)
        tables.append((f"fv_N{res.config.N}.csv", res.to_csv()))
    exact = solve_shock(p) if p.direction is Direction.RUSH else solve_rarefaction(p)
    doc = header(args, dict(params_dict(p), cells=cells, cfl=args.cfl, T=args.tend, X=args.length),
                 {"ledger": 1e-12})
    doc["fv"] = {
        "order": study.order,
        "l1_errors": study.errors,
        "exact_wall_pressure": exact.p1,
        "runs": runs,
    }
    emit(args, doc, "fv.json", tables)
    return EXIT_OK


def _sweep_row(regime, par, M0):
    sol = finite_solution(regime, par, M0)
    prm = sol.params
    if isinstance(sol, ShockSolution):
        return [M0, prm.gamma, sol.rho1, sol.sigma, sol.p1, sol.E1, sol.rho1_sigma]
    return [M0, prm.gamma, sol.eta_head, sol.eta_tail, sol.wall_state.rho, sol.p1, int(sol.vacuum)]


def cmd_sweep(args) -> int:
    regime, par = regime_parameter(args)
    seq = args.mach_seq
    if not seq:
        raise UsageError("empty Mach sequence")
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(lambda m: _sweep_row(regime, par, m), seq))
    if regime.direction is Direction.RUSH:
        cols = ["M0", "gamma", "rho1", "sigma", "p1", "E1", "rho1_sigma"]
    else:
        cols = ["M0", "gamma", "eta_head", "eta_tail", "wall_density", "p1", "vacuum"]
    doc = header(args, {"case": regime.value, "parameter": par, "mach_seq": seq}, {})
    doc["limit"] = limit_solution(regime, par).to_dict()
    doc["sweep"] = [dict(zip(cols, r)) for r in rows]
    emit(args, doc, "sweep.json", [("sweep.csv", table(cols, rows))])
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = Parser(prog="pistonlimit", description=__doc__.splitlines()[0],
                epilog="Exit codes: 0 success, 1 usage, 2 numerical failure, 3 verification failure.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=Parser, metavar="COMMAND")
    sub.required = True

    def common(p, gas=True, case=False):
        p.add_argument("--out", help="directory for JSON/CSV output (stdout only if omitted)")
        p.add_argument("--timestamp", action="store_true", help="add a wall-clock timestamp to the JSON")
        if gas:
            p.add_argument("--gamma", type=float)
            p.add_argument("--mach", type=float)
            p.add_argument("--E0", type=float, help="upstream total energy (gamma then follows from --mach)")
            g = p.add_mutually_exclusive_group()
            g.add_argument("--rush", action="store_true", help="piston moves into the gas (default)")
            g.add_argument("--recede", action="store_true", help="piston moves away from the gas")
        if case:
            p.add_argument("--case", choices=[r.value for r in Regime],
                           required=case == "required")

    p = sub.add_parser("solve", help="exact self-similar solution", epilog=CSV_HELP["solve"])
    common(p)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--eta-min", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("limit", help="infinite-Mach limit solution")
    common(p, case="required")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("verify", help="check the weak-form identities over a test-function family")
    common(p, case=True)
    p.add_argument("--tol", type=float, default=DEFAULT_VERIFY_TOL)
    p.add_argument("--phi-family", default="standard", choices=["standard", "base"])
    p.add_argument("--perturb-sigma", type=float, default=0.0,
                   help="relative perturbation of the shock speed (builds a corrupted bundle)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("converge", help="pairing gaps to the limit along a Mach sequence",
                       epilog=CSV_HELP["converge"])
    common(p, case="required")
    p.add_argument("--mach-seq", type=float_list, default=[10.0, 100.0, 1000.0, 10000.0])
    p.add_argument("--phi-family", default="standard", choices=["standard", "base"])
    p.add_argument("--tend", type=float, default=2.0, help="time horizon for the w_p gap")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("validate-fv", help="finite-volume grid study against the exact solution",
                       epilog=CSV_HELP["validate-fv"])
    common(p)
    p.add_argument("--cells", type=int_list, default=[200, 400, 800])
    p.add_argument("--cfl", type=float, default=0.8)
    p.add_argument("--tend", type=float, default=0.5)
    p.add_argument("--length", type=float, default=2.0, help="domain length X of [-X, 0]")
    p.add_argument("--exclude-cells", type=int, default=0,
                   help="drop cells this close to a shock from the L1 error")
    p.set_defaults(func=cmd_validate_fv)

    p = sub.add_parser("sweep", help="finite-Mach scalars along a Mach sequence",
                       epilog=CSV_HELP["sweep"])
    common(p, case="required")
    p.add_argument("--mach-seq", type=float_list, default=[10.0, 100.0, 1000.0, 10000.0])
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParameterError, DomainError) as exc:
        print(f"pistonlimit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"pistonlimit {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
