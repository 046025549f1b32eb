import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import bump as bump_oracle, disk_integral_cartesian, disk_integral_radial
from pistonlimit.gas_state import Direction, PistonParams
from pistonlimit.limits import Regime, limit_solution
from pistonlimit.measure import (
    MEASURE_NAMES, Bump, CurveDirac, Measure, Piece, SelfSimilarDensity, Weight, build_bundle,
    certify, initial_line_integral, pair, standard_family, weak_residuals,
)
from pistonlimit.rarefaction import solve_rarefaction
from pistonlimit.shock import solve_shock

BUMP_INTEGRAL = 0.25 * (math.pi ** 2 - 4.0) / (2.0 * math.pi)   # radius 1/2


def lebesgue():
    return SelfSimilarDensity((Piece(-math.inf, 0.0, value=1.0),))


def finite_bundles():
    out = []
    for g, M0 in ((1.4, 2.0), (1.4, 10.0), (2.0, 2.0), (2.0, 10.0)):
        out.append(build_bundle(solve_shock(PistonParams(g, M0))))
    for g, M0 in ((1.4, 2.0), (1.4, 5.0), (1.4, 10.0), (1.67, 0.8)):
        out.append(build_bundle(solve_rarefaction(PistonParams(g, M0, Direction.RECEDE))))
    return out


def limit_bundles():
    return [build_bundle(limit_solution(r, 1.4 if r.fixed_gamma else 1.0)) for r in Regime]


# -- test functions -----------------------------------------------------------

def test_bump_shape_and_support():
    b = Bump(1.0, -1.0, 0.5)
    assert b(1.0, -1.0) == 1.0
    assert b(1.0, -0.5) == 0.0 and b(2.0, 0.0) == 0.0
    assert b.meets_domain()
    assert not Bump(1.0, 1.0, 0.5).meets_domain()
    assert not Bump(-1.0, -1.0, 0.5).meets_domain()


def test_bump_derivatives_match_finite_differences():
    b = Bump(0.7, -0.4, 0.6)
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(50):
        t, x = 0.7 + rng.uniform(-0.6, 0.6), -0.4 + rng.uniform(-0.6, 0.6)
        ft = (b(t + h, x) - b(t - h, x)) / (2 * h)
        fx = (b(t, x + h) - b(t, x - h)) / (2 * h)
        assert b.dt(t, x) == pytest.approx(ft, abs=1e-7)
        assert b.dx(t, x) == pytest.approx(fx, abs=1e-7)
    # C1: gradient vanishes at the rim and at the centre
    assert b.dt(0.7 + 0.6 - 1e-12, -0.4) == pytest.approx(0.0, abs=1e-9)
    assert b.dt(0.7, -0.4) == 0.0 and b.dx(0.7, -0.4) == 0.0


def test_standard_family_size():
    assert len(standard_family()) >= 20
    fam = standard_family((-0.3, -1.5))
    assert len(fam) == 26 and len({p.name for p in fam}) == 26
    assert sum(not p.meets_domain() for p in fam) >= 2


# -- pairings -----------------------------------------------------------------

def test_lebesgue_bump_pairing_three_ways():
    phi = Bump(1.0, -1.0, 0.5)
    ours = pair(lebesgue(), phi)
    cart = disk_integral_cartesian(bump_oracle(1.0, -1.0, 0.5), 1.0, -1.0, 0.5)
    radial = disk_integral_radial(lambda s: math.cos(0.5 * math.pi * s / 0.5) ** 2, 0.5)
    assert ours == pytest.approx(BUMP_INTEGRAL, abs=1e-12)
    assert cart == pytest.approx(BUMP_INTEGRAL, abs=1e-10)
    assert radial == pytest.approx(BUMP_INTEGRAL, abs=1e-13)
    assert BUMP_INTEGRAL == pytest.approx(0.2335441386, abs=1e-10)


def test_curve_dirac_auxiliary_path():
    d = CurveDirac(Weight(slope=1.0))
    val = d.pair(lambda t, x: np.asarray(t) * (1.0 - np.asarray(t)), t_range=(0.0, 1.0))
    assert val == pytest.approx(1.0 / 12.0, abs=1e-14)


def test_curve_dirac_general_path_matches_line():
    line = CurveDirac(Weight(2.0, 0.5), speed=-0.3)
    path = CurveDirac(Weight(2.0, 0.5), path=lambda t: -0.3 * t, path_speed=lambda t: -0.3)
    phi = Bump(1.0, -0.3, 0.5)
    assert path.pair(phi) == pytest.approx(line.pair(phi), abs=1e-10)


def test_disjoint_support_pairings_vanish():
    phi = Bump(1.0, -1.0, 0.5)
    assert CurveDirac(Weight(1.0, 1.0)).pair(phi) == 0.0
    for b in limit_bundles() + finite_bundles():
        for far in (Bump(1.0, 1.0, 0.5), Bump(-1.0, -1.0, 0.5)):
            for mu in b.measures().values():
                assert pair(mu, far) == 0.0
                assert pair(mu, far.dt) == 0.0


def test_fan_pairing_matches_dblquad():
    sol = solve_rarefaction(PistonParams(1.4, 2.0, Direction.RECEDE))
    b = build_bundle(sol)
    phi = Bump(1.0, -0.8, 0.6)
    f = bump_oracle(1.0, -0.8, 0.6)
    head, tail = sol.eta_head, sol.eta_tail
    up = disk_integral_cartesian(f, 1.0, -0.8, 0.6, x_hi=lambda t: head * t)
    wall = sol.wall_state.rho * disk_integral_cartesian(f, 1.0, -0.8, 0.6, x_lo=lambda t: tail * t)
    fan = disk_integral_cartesian(lambda t, x: f(t, x) * float(sol.fan_profile(x / t)[0]), 1.0, -0.8, 0.6,
                                  x_lo=lambda t: head * t, x_hi=lambda t: tail * t)
    assert pair(b.rho, phi) == pytest.approx(up + fan + wall, abs=1e-9)


def test_shock_pairing_matches_dblquad():
    sol = solve_shock(PistonParams(1.4, 2.0))
    b = build_bundle(sol)
    phi = Bump(1.0, sol.sigma, 0.4)
    f = bump_oracle(1.0, sol.sigma, 0.4)
    shock = lambda t: sol.sigma * t
    ref = (disk_integral_cartesian(f, 1.0, sol.sigma, 0.4, x_hi=shock)
           + sol.rho1 * disk_integral_cartesian(f, 1.0, sol.sigma, 0.4, x_lo=shock))
    assert pair(b.rho, phi) == pytest.approx(ref, abs=1e-9)


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 19))
def test_pairing_linearity(alpha, beta, k):
    sh = build_bundle(solve_shock(PistonParams(1.4, 2.0)))
    lim = build_bundle(limit_solution(Regime.CASE2_RUSH, 1.0))
    phi = standard_family()[k]
    mu = sh.rho * alpha + lim.rho * beta
    lhs = pair(mu, phi)
    rhs = alpha * pair(sh.rho, phi) + beta * pair(lim.rho, phi)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    assert pair(-sh.m, phi) == pytest.approx(-pair(sh.m, phi), abs=1e-12)


def test_density_positivity():
    for b in finite_bundles() + limit_bundles():
        for phi in standard_family(b.breakpoints):
            assert pair(b.rho, phi) >= -1e-10


def test_radon_nikodym_consistency():
    eta = np.linspace(-4.0, -1e-9, 801)
    for b in finite_bundles() + limit_bundles():
        dens = {n: b.measures()[n].densities[0](eta) for n in MEASURE_NAMES}
        u, E = b.velocity(eta), b.energy(eta)
        assert np.allclose(dens["m"], u * dens["rho"], atol=1e-14)
        assert np.allclose(dens["n"], u * dens["m"], atol=1e-14)
        assert np.allclose(dens["m1"], E * dens["rho"], atol=1e-14)
        assert np.allclose(dens["n1"], u * dens["m1"], atol=1e-14)
        assert np.allclose(dens["n2"], u * dens["p"], atol=1e-14)
        # singular parts live on the piston only for rho and m1, where u = 0
        for name in ("m", "n", "n1", "n2", "p"):
            assert b.measures()[name].diracs == ()
        for d in b.rho.diracs:
            assert d.speed == 0.0
        if b.rho.diracs:
            assert b.m1.diracs[0].weight.slope == pytest.approx(b.wall_energy * b.rho.diracs[0].weight.slope)


def test_initial_line_integral():
    phi = Bump(0.0, -1.0, 0.5)
    ref = 0.5                      # int cos^2(pi s / 1) ds over (-1/2, 1/2)
    assert initial_line_integral(phi) == pytest.approx(ref, abs=1e-14)
    assert initial_line_integral(Bump(1.0, -1.0, 0.5)) == 0.0
    half = initial_line_integral(Bump(0.0, 0.0, 0.5))
    assert half == pytest.approx(0.25, abs=1e-14)


# -- residual certification ---------------------------------------------------

@pytest.mark.parametrize("idx", range(8))
def test_finite_bundles_certify(idx):
    b = finite_bundles()[idx]
    res = certify(b)
    assert res.shape[0] >= 20
    assert np.max(np.abs(res)) <= 5e-9


@pytest.mark.parametrize("regime", list(Regime))
def test_limit_bundles_certify(regime):
    b = build_bundle(limit_solution(regime, 1.4 if regime.fixed_gamma else 1.0))
    assert np.max(np.abs(certify(b))) <= 5e-9


def test_interior_bump_residual_is_zero():
    sol = solve_shock(PistonParams(1.4, 2.0))
    b = build_bundle(sol)
    for phi in (Bump(2.0, -2.0, 0.5), Bump(2.0, -0.2, 0.3)):
        # inside the upstream / downstream constant regions, away from t = 0 and the piston
        assert np.max(np.abs(weak_residuals(b, phi))) <= 1e-12


def test_corrupted_bundle_fails_with_mass_dominant():
    sol = solve_shock(PistonParams(1.4, 10.0))
    bad = build_bundle(dataclasses.replace(sol, sigma=sol.sigma * 1.01))
    worst = np.max(np.abs(certify(bad)), axis=0)
    assert worst.max() > 5e-9
    assert np.argmax(worst) == 0


def test_bundle_structure():
    c2 = build_bundle(limit_solution(Regime.CASE2_RUSH, 1.0))
    assert c2.w_p(np.array([0.0, 3.0])).tolist() == [1.0, 1.0]
    assert c2.rho.diracs[0].weight == Weight(slope=1.0)
    assert c2.m1.diracs[0].weight == Weight(slope=1.0)
    c1 = limit_solution(Regime.CASE1_RUSH, 1.4)
    b1 = build_bundle(c1)
    assert all(mu.is_singular_free for mu in b1.measures().values())
    assert c1.rho1 == pytest.approx(6.0) and c1.sigma == pytest.approx(-0.2)
    r1 = limit_solution(Regime.CASE1_RECEDE, 1.4)
    assert (r1.left.rho, r1.left.u, r1.left.E) == (1.0, -1.0, 0.5) and r1.right.is_vacuum
    br = build_bundle(r1)
    assert br.p.densities[0](np.linspace(-5, 0, 11)).max() == 0.0 and br.w_p.intercept == 0.0


def test_bundle_json():
    for b in finite_bundles()[:1] + limit_bundles():
        text = b.to_json()
        doc = json.loads(text)
        assert doc["schema"] == 1
        assert text == b.to_json()
        assert "Infinity" not in text and "NaN" not in text
        assert doc["measures"]["rho"]["densities"][0]["pieces"][0]["lo"] == "-inf"
    d = build_bundle(limit_solution(Regime.CASE2_RUSH, 1.0)).to_dict()
    assert d["measures"]["rho"]["diracs"][0]["weight"] == {"kind": "linear-in-t", "intercept": 0.0, "slope": 1.0}
    assert d["w_p"] == {"kind": "constant", "value": 1.0}


def test_build_bundle_rejects_unknown():
    with pytest.raises(TypeError):
        build_bundle(object())
