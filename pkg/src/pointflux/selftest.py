"""Reduced acceptance checks runnable from the command line (``--selftest``).

Each check is a cheaper version of the full acceptance test (fewer sites,
looser tolerances) so that an installation can be validated in seconds.
"""
from __future__ import annotations

import math
import time

import numpy as np

from . import berry, krein, ring, wz
from . import numerics as nm
from .backgrounds import LandauBackground, landau_level
from .model import LoopPath, PointPerturbation, SystemConfig


def _landau_phase():
    cfg = SystemConfig(b0=1.0)
    bg = LandauBackground(cfg)
    res = berry.discrete_holonomy(bg, 0.0, LoopPath.circle(1.0, n_points=48), bg.gap(0),
                                  richardson=False)
    err = abs(res.phase / math.pi - 1.0)
    return err < 5e-3, f"gamma/pi - 1 = {err:.2e}"


def _one_level_per_gap():
    cfg = SystemConfig(b0=1.0)
    bg = LandauBackground(cfg)
    ok = True
    for alpha in (-1.0, 0.0, 1.0):
        for k in range(3):
            sol = krein.solve_level(bg, PointPerturbation(alpha), bg.gap(k))
            ok &= sol.energy in bg.gap(k) and sol.q_deriv > 0
    return ok, f"levels below {landau_level(2, cfg)} found in gaps 0..2"


def _ring_routes():
    sol = ring.ring_solve(0.0, 0.25, 1)
    pot = ring.ring_berry_potential(sol)
    gamma, _ = ring.ring_holonomy_oracle(0.0, 0.25, 1.0, 1, n_steps=64)
    err = abs(gamma / (2 * math.pi) - pot.value)
    return err < 1e-4, f"|V_oracle - V_series| = {err:.2e}"


def _wz_small_loop():
    cfg = SystemConfig(b0=1.0)
    eps = 1e-3
    u = wz.wilson_loop(LoopPath.square(eps), wz.DEFAULT_N, 4, cfg)
    err = abs(u[0, 0] - np.exp(-2j * math.pi * cfg.xi0 * eps * eps))
    return err < 1e-6, f"|U11 - exp(-2 pi i xi0 eps^2)| = {err:.2e}"


def _normalisation():
    bg = LandauBackground(SystemConfig(b0=1.0))
    sol = krein.solve_level(bg, PointPerturbation(0.0), bg.gap(0))
    err = abs(krein.norm_quadrature(sol) - 1.0)
    return err < 1e-3, f"|norm - 1| = {err:.2e}"


def _special_functions():
    x = 1.37
    err = max(abs(nm.digamma(x + 1) - nm.digamma(x) - 1 / x),
              abs(nm.trigamma(x) - nm.trigamma(x + 1) - 1 / x ** 2))
    return err < 1e-11, f"recurrence residual {err:.2e}"


CHECKS = [
    ("homogeneous-field Berry phase", _landau_phase),
    ("one level per Landau gap", _one_level_per_gap),
    ("ring persistent-current formula", _ring_routes),
    ("Wilczek-Zee small loop", _wz_small_loop),
    ("normalisation identity", _normalisation),
    ("special-function recurrences", _special_functions),
]


def run_selftest(stream) -> int:
    """Run all checks, print one line each, return 0 if all pass else 3."""
    failed = 0
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as exc:  # noqa: BLE001 - reported, not raised
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail} "
                     f"({time.perf_counter() - start:.1f} s)\n")
    return 0 if failed == 0 else 3
