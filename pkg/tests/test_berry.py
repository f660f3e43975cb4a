"""Berry connection and discrete holonomy."""
import math

import numpy as np
import pytest

from pointflux import berry, krein
from pointflux.backgrounds import LandauBackground, ZeroRangeDotBackground
from pointflux.model import LoopPath, PointPerturbation, SystemConfig

CFG = SystemConfig(b0=1.0)
LANDAU = LandauBackground(CFG)
XI0 = CFG.xi0


def test_landau_connection_is_symmetric_gauge_potential():
    rho = 1.3
    conn = berry.berry_connection(LANDAU, PointPerturbation(0.0, (rho, 0.0)))
    assert conn.v_theta == pytest.approx(math.pi * XI0 * rho, rel=1e-8)
    assert abs(conn.v_rho) < 1e-8
    assert conn.de0_dxi0_fd == pytest.approx(conn.de0_dxi0_hf, rel=1e-6)


def test_landau_connection_opposite_charge():
    cfg = SystemConfig(charge_sign=-1, b0=1.0)
    bg = LandauBackground(cfg)
    conn = berry.berry_connection(bg, PointPerturbation(0.0, (1.0, 0.0)))
    assert cfg.xi0 < 0
    assert conn.v_theta == pytest.approx(math.pi * cfg.xi0, rel=1e-8)


def test_hellmann_feynman_matches_finite_difference_in_higher_gap():
    sol = krein.solve_level(LANDAU, PointPerturbation(0.5, (0.8, 0.0)), LANDAU.gap(1))
    fd = berry.de0_dxi0_finite_difference(sol)
    hf = 2 * math.pi * berry.hellmann_feynman_dE0_dB0(sol)
    assert fd == pytest.approx(hf, rel=1e-6)


def test_gap_index_roundtrip():
    for k in range(4):
        assert berry.gap_index(LANDAU, LANDAU.gap(k)) == k


@pytest.mark.parametrize("radius", [0.5, 1.0])
def test_landau_holonomy_is_flux_through_loop(radius):
    loop = LoopPath.circle(radius, n_points=48)
    res = berry.discrete_holonomy(LANDAU, 0.0, loop, LANDAU.gap(0))
    assert res.phase == pytest.approx(2 * math.pi * XI0 * math.pi * radius ** 2, rel=1e-5)
    assert res.diagnostics["min_overlap"] > 0.5


def test_formula_route_matches_oracle_on_landau():
    formula = berry.berry_phase_circle(LANDAU, PointPerturbation(0.4, (1.0, 0.0)), 1.0,
                                       LANDAU.gap(1))
    oracle = berry.discrete_holonomy(LANDAU, 0.4, LoopPath.circle(1.0, n_points=48),
                                     LANDAU.gap(1))
    assert formula.phase == pytest.approx(oracle.phase, rel=1e-5)


def test_holonomy_is_gauge_invariant():
    loop = LoopPath.circle(0.8, n_points=32)
    plain = berry.discrete_holonomy(LANDAU, 0.0, loop, LANDAU.gap(0), richardson=False)
    rng = np.random.default_rng(7)
    # any phases keeping each segment below pi/2
    phases = np.exp(1j * rng.uniform(-0.6, 0.6, 32))
    twisted = berry.discrete_holonomy(LANDAU, 0.0, loop, LANDAU.gap(0), rephase=phases)
    assert twisted.phase == pytest.approx(plain.phase, abs=1e-12)


def test_reversed_loop_flips_sign():
    loop = LoopPath.circle(0.8, center=(0.3, -0.2), n_points=32)
    fwd = berry.discrete_holonomy(LANDAU, 0.0, loop, LANDAU.gap(0))
    bwd = berry.discrete_holonomy(LANDAU, 0.0, loop.reversed(), LANDAU.gap(0))
    assert bwd.phase == pytest.approx(-fwd.phase, abs=1e-10)


def test_zero_area_loop_has_no_phase():
    loop = LoopPath.polyline([(0.5, 0.0), (1.5, 0.5), (1.0, 0.25)], n_points=24)
    res = berry.discrete_holonomy(LANDAU, 0.0, loop, LANDAU.gap(0))
    assert abs(res.phase) < 1e-10


def test_square_loop_phase_is_area():
    loop = LoopPath.square(1.0, center=(0.2, 0.1), n_points=48)
    res = berry.discrete_holonomy(LANDAU, 0.0, loop, LANDAU.gap(0))
    assert res.phase == pytest.approx(2 * math.pi * XI0, rel=1e-5)


def test_radial_connection_vanishes_on_landau():
    v = berry.radial_connection(LANDAU, PointPerturbation(0.0, (1.0, 0.0)), LANDAU.gap(0))
    assert abs(v) < 1e-8


def test_zero_range_dot_connection_routes_agree():
    bg = ZeroRangeDotBackground(CFG, alpha0=0.5)
    rho = 1.0
    pert = PointPerturbation.polar(0.0, rho)
    sol = krein.solve_level(bg, pert, bg.gap(1))
    conn = berry.berry_connection(bg, pert, sol)
    ratio = bg.berry_ratio(sol.energy, rho)
    assert conn.v_theta == pytest.approx(ratio * math.pi * XI0 * rho, rel=1e-5)
    assert abs(conn.v_rho) < 1e-8
    oracle = berry.discrete_holonomy(bg, 0.0, LoopPath.circle(rho, n_points=64), bg.gap(1))
    assert oracle.phase == pytest.approx(2 * math.pi * rho * conn.v_theta, rel=1e-3)


def test_site_on_circle():
    p = berry.site_on_circle(0.3, 2.0, math.pi / 2)
    assert p.alpha == 0.3
    np.testing.assert_allclose(p.site, [0.0, 2.0], atol=1e-15)
