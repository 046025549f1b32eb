import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pistonlimit.gas_state import Direction, ParameterError
from pistonlimit.limits import (
    Regime, convergence_study, finite_params, finite_solution, limit_solution, recede_limits,
    shock_limits,
)
from pistonlimit.measure import MEASURE_NAMES, Bump, build_bundle, pair, standard_family
from pistonlimit.rarefaction import solve_rarefaction


def test_case1_rush_limit():
    s = shock_limits(Regime.CASE1_RUSH, 1.4)
    assert (s.rho1, s.sigma, s.p1, s.E1) == pytest.approx((6.0, -0.2, 1.2, 0.5), abs=1e-14)
    assert s.right.rho == pytest.approx(6.0) and s.right.u == 0.0 and s.right.E == 0.5
    assert not s.pressureless and not s.concentration


def test_case2_rush_limit():
    s = shock_limits(Regime.CASE2_RUSH, 1.0)
    assert (s.p1, s.E1, s.sigma, s.rho1_sigma) == (1.0, 1.0, 0.0, -1.0)
    assert s.rho1 == math.inf and s.concentration and s.wall_pressure == 1.0


def test_case1_sigma_degenerates_toward_piston():
    sig = [shock_limits("rush1", 1.0 + 10.0 ** -k).sigma for k in range(1, 8)]
    assert all(abs(b) < abs(a) for a, b in zip(sig, sig[1:]))
    assert abs(sig[-1]) < 1e-7


def test_recede_limits():
    r1 = recede_limits(Regime.CASE1_RECEDE, 1.4)
    assert (r1.left.rho, r1.left.u, r1.left.E) == (1.0, -1.0, 0.5)
    assert r1.right.is_vacuum and r1.split == -1.0 and r1.pressureless
    r2 = recede_limits(Regime.CASE2_RECEDE, 1.0)
    assert (r2.left.rho, r2.left.u, r2.left.E) == (1.0, -1.0, 1.0)
    assert r2.right.is_vacuum and r2.split == -1.0 and r2.pressureless
    assert r2.fan_internal_energy == 0.5


def test_case2_fan_internal_energy_trend():
    # internal energy at the fan point where rho_m = 1/2 tends to E0 - 1/2
    gaps = []
    for M0 in (10.0, 1e2, 1e3, 1e4):
        sol = finite_solution(Regime.CASE2_RECEDE, 1.0, M0)
        g = sol.params.gamma
        R = 0.5 ** (0.5 * (g - 1.0))
        eta = ((1.0 - R) * (g + 1.0) / (g - 1.0) - 1.0) / M0 - 1.0
        rho, u, E, p = sol.fan_profile(eta)
        assert float(rho) == pytest.approx(0.5, rel=1e-6)
        gaps.append(abs(float(E - 0.5 * u * u) - 0.5))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_profiles_and_ties():
    c1 = limit_solution("rush1", 1.4)
    rho, u, E, p = c1.profile(np.array([-1.0, c1.split, -0.1]))
    assert rho == pytest.approx([1.0, 6.0, 6.0]) and p == pytest.approx([0.0, 1.2, 1.2])
    r1 = limit_solution("recede1", 1.4)
    rho, u, E, p = r1.profile(np.array([-2.0, -1.0, -0.5]))
    assert rho.tolist() == [1.0, 1.0, 0.0] and u.tolist() == [-1.0, -1.0, 0.0]


@pytest.mark.parametrize("call,args", [
    (shock_limits, ("rush1", 1.0)), (shock_limits, ("rush2", 0.5)), (shock_limits, ("recede1", 1.4)),
    (recede_limits, ("recede1", 0.9)), (recede_limits, ("recede2", 0.4)), (recede_limits, ("rush2", 1.0)),
])
def test_limit_parameter_errors(call, args):
    with pytest.raises(ParameterError):
        call(*args)


def test_finite_params():
    p = finite_params(Regime.CASE2_RUSH, 1.0, 100.0)
    assert p.E0 == 1.0 and p.M0 == 100.0 and p.direction is Direction.RUSH
    assert p.gamma * (p.gamma - 1.0) * 1e4 * 0.5 == pytest.approx(1.0, rel=1e-9)
    q = finite_params(Regime.CASE1_RECEDE, 1.4, 3.0)
    assert q.gamma == 1.4 and q.direction is Direction.RECEDE


def test_case2_rush_dirac_weights():
    b = build_bundle(limit_solution(Regime.CASE2_RUSH, 1.0))
    for t_star in (0.5, 1.0, 2.5):
        phi = Bump(t_star, 0.0, 0.2)
        unit = pair(b.piston_dirac(), phi)      # w_p = 1 gives <delta_P, phi>
        assert pair(b.rho.diracs[0], phi) / unit == pytest.approx(t_star, rel=1e-6)
        assert pair(b.m1.diracs[0], phi) / unit == pytest.approx(1.0 * t_star, rel=1e-6)
    b3 = build_bundle(limit_solution(Regime.CASE2_RUSH, 3.0))
    phi = Bump(1.0, 0.0, 0.2)
    assert pair(b3.m1.diracs[0], phi) / pair(b3.piston_dirac(), phi) == pytest.approx(3.0, rel=1e-6)


def test_pressure_content_of_limits():
    c1 = build_bundle(limit_solution(Regime.CASE1_RUSH, 1.4))
    assert pair(c1.p, Bump(1.0, -0.1, 0.08)) > 0.0
    for reg in (Regime.CASE1_RECEDE, Regime.CASE2_RECEDE):
        b = build_bundle(limit_solution(reg, 1.4 if reg.fixed_gamma else 1.0))
        for phi in standard_family(b.breakpoints):
            assert pair(b.p, phi) == 0.0
            assert b.w_p.intercept == 0.0


def test_case2_recede_no_finite_vacuum():
    for M0 in (10.0, 1e2, 1e3, 1e4):
        sol = finite_solution(Regime.CASE2_RECEDE, 1.0, M0)
        g = sol.params.gamma
        assert M0 < 2.0 / (g - 1.0)
        assert not sol.vacuum
    lim = limit_solution(Regime.CASE2_RECEDE, 1.0)
    assert lim.right.is_vacuum and lim.split == -1.0


def test_case1_recede_vacuum_for_large_mach():
    for M0 in (10.0, 1e2, 1e3):
        assert finite_solution(Regime.CASE1_RECEDE, 1.4, M0).vacuum


def test_convergence_study_case2_rush():
    rep = convergence_study(Regime.CASE2_RUSH, 1.0, [10.0, 100.0, 1000.0])
    assert rep.gaps.shape == (3, 7, len(rep.phi_names))
    assert rep.monotone().all()
    assert rep.column("rho", 0).shape == (3,)
    final = rep.gaps[-1]
    assert final[MEASURE_NAMES.index("rho")].max() < 1e-3
    assert final[MEASURE_NAMES.index("m1")].max() < 1e-3
    # disjoint bumps give exactly zero
    fam = standard_family((0.0,))
    for k, phi in enumerate(fam):
        if not phi.meets_domain():
            assert np.all(rep.gaps[:, :, k] == 0.0)
    rates = rep.observed_rates()
    assert np.all(rates[np.isfinite(rates)] > 0.5)


def test_convergence_study_case1_rush_pressure_and_wp():
    rep = convergence_study(Regime.CASE1_RUSH, 1.4, [10.0, 100.0, 1000.0], T=2.0)
    p_col = rep.gaps[:, MEASURE_NAMES.index("p"), :].max(axis=1)
    assert p_col[2] < p_col[1] < p_col[0]
    p1 = [finite_solution("rush1", 1.4, m).p1 for m in (10.0, 100.0, 1000.0)]
    assert rep.wp_gaps == pytest.approx([2.0 * abs(v - 1.2) for v in p1], rel=1e-12)
    assert rep.wp_gaps[-1] < rep.wp_gaps[0]


@pytest.mark.parametrize("regime,par", [(Regime.CASE1_RECEDE, 1.4), (Regime.CASE2_RECEDE, 1.0)])
def test_convergence_study_recede(regime, par):
    rep = convergence_study(regime, par, [10.0, 100.0, 1000.0])
    assert rep.monotone().all()
    assert rep.gaps[-1].max() < rep.gaps[0].max()
    assert rep.gaps[-1].max() < 1e-2


def test_report_serialisation():
    rep = convergence_study("rush2", 1.0, [10.0, 100.0])
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["M0", "measure", "phi", "gap"]
    assert len(rows) == 1 + 2 * (7 * len(rep.phi_names) + 1)
    doc = json.loads(rep.to_json())
    assert doc["schema"] == 1 and doc["regime"] == "rush2"
    assert set(doc["monotone"]) == set(MEASURE_NAMES)
    assert rep.to_csv() == convergence_study("rush2", 1.0, [10.0, 100.0]).to_csv()


@pytest.mark.parametrize("seq", [[], [10.0, 10.0], [100.0, 10.0], [10.0, math.inf], [0.0, 1.0]])
def test_convergence_study_rejects(seq):
    with pytest.raises(ParameterError):
        convergence_study("rush2", 1.0, seq)


@given(st.floats(1.05, 3.0))
def test_case1_limit_formulae(gamma):
    s = shock_limits("rush1", gamma)
    assert s.rho1 == pytest.approx((gamma + 1) / (gamma - 1))
    assert s.sigma * (s.rho1 - 1.0) == pytest.approx(-1.0)
    big = finite_solution("rush1", gamma, 1e6)
    assert big.rho1 == pytest.approx(s.rho1, rel=1e-6)
    assert big.p1 == pytest.approx(s.p1, rel=1e-6)
