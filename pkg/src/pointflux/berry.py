r"""Berry connection and Berry phase of the bound state of a moving point.

Three independent routes are provided:

* the formula route,
  ``rho V_theta = -(1/pi) dE0/dxi0 + pi xi0 <r^2> + sgn(e) <r A_phi>``,
  with ``dE0/dxi0`` from re-solving the level at shifted field or from the
  Hellmann-Feynman theorem;
* the direct expectation ``rho V_theta = <-i d/dphi>`` (rotation covariance
  of the Green function in the symmetric gauge);
* the discrete holonomy ``gamma = -sum_k arg <psi_k | psi_{k+1}>`` over sites
  along a loop, which is gauge invariant and serves as the oracle.

``V = i <psi | grad_s psi>`` and loops are counterclockwise-positive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import krein
from . import numerics as nm
from .model import Background, Gap, LoopPath, PointPerturbation, polar_point
from .numerics import DEFAULT_TOL, Tolerance


class RouteDisagreementError(RuntimeError):
    """Two evaluation routes of the same quantity disagree beyond tolerance."""


class OverlapTooSmallError(RuntimeError):
    """Neighbouring sites too far apart: the overlap phase is not resolvable."""


@dataclass(frozen=True)
class BerryConnection:
    """Polar components of the Berry connection at distance ``rho``.

    ``v_theta`` is the physical (per unit length) angular component; the
    phase gained on a centred circle is ``2 pi rho v_theta``.
    """

    rho: float
    v_theta: float
    v_rho: float
    de0_dxi0_fd: float | None = None
    de0_dxi0_hf: float | None = None
    expectations: dict = field(default_factory=dict)


@dataclass(frozen=True)
class HolonomyResult:
    """Berry phase of a loop (radians, not wrapped).

    ``route`` is ``"formula"`` or ``"oracle"``; ``phase`` is the Richardson
    extrapolation when ``n`` and ``2n`` sites were both run.
    """

    phase: float
    route: str
    diagnostics: dict = field(default_factory=dict)


def gap_index(background: Background, gap: Gap, max_index: int = 64) -> int:
    """Index ``k`` with ``background.gap(k) == gap``."""
    for k in range(max_index):
        try:
            g = background.gap(k)
        except nm.DomainError:
            break
        if math.isclose(g.upper, gap.upper, rel_tol=1e-12, abs_tol=1e-300) and (
                g.lower == gap.lower or math.isclose(g.lower, gap.lower, rel_tol=1e-12)):
            return k
    raise nm.DomainError(f"gap {gap} is not a gap of {background!r}")


# ---------------------------------------------------------------------------
# expectation values
# ---------------------------------------------------------------------------

def angular_momentum(sol: krein.SpectralSolution, method: str = "auto") -> float:
    """``<psi | -i d/dphi | psi>`` about the origin.

    ``method="auto"`` uses the partial-wave closed forms where a background
    provides them (flux line, parabolic dot) and planar quadrature otherwise.
    """
    bg = sol.background
    if method == "auto" and hasattr(bg, "angular_momentum"):
        return bg.angular_momentum(sol.energy, sol.perturbation.rho)
    return krein.angular_momentum_quadrature(sol)


def radius_squared(sol: krein.SpectralSolution, rule=None) -> float:
    """``<psi | r^2 | psi>`` by planar quadrature."""
    return krein.expectation(sol, lambda p: (p ** 2).sum(axis=-1), rule)


def r_times_potential(sol: krein.SpectralSolution) -> float:
    """``<psi | r A_phi | psi>``; the flux line gives ``r A_phi = eta`` identically."""
    return float(sol.background.config.eta)


def hellmann_feynman_dE0_dB0(sol: krein.SpectralSolution, tol: Tolerance = DEFAULT_TOL,
                             l_expect: float = None, r2_expect: float = None) -> float:
    r"""``dE0/dB0`` as the expectation of ``dH/dB0``.

    .. math::
        \frac{\partial E_0}{\partial B_0} = \frac{e}{2}\langle i\partial_\varphi\rangle
            + \frac{e^2 B_0}{4}\langle r^2\rangle + \frac{e^2}{2}\langle r A_{1\varphi}\rangle

    The ``<r^2>`` term is skipped when ``B0 = 0``.
    """
    cfg = sol.background.config
    e = cfg.charge_sign
    if l_expect is None:
        l_expect = angular_momentum(sol)
    if cfg.b0 != 0 and r2_expect is None:
        r2_expect = radius_squared(sol)
    value = -0.5 * e * l_expect + 0.5 * r_times_potential(sol)
    if cfg.b0 != 0:
        value += 0.25 * cfg.b0 * r2_expect
    return value


def de0_dxi0_finite_difference(sol: krein.SpectralSolution,
                               tol: Tolerance = DEFAULT_TOL) -> float:
    """``dE0/dxi0`` by re-solving the level at ``xi0 +- h`` (one Richardson halving).

    ``h = max(1e-4 |xi0|, 1e-6)``; the gap index is held fixed.
    """
    bg = sol.background
    cfg = bg.config
    k = gap_index(bg, sol.gap)
    xi0 = cfg.xi0
    h = max(1e-4 * abs(xi0), 1e-6)

    def level(x):
        shifted = bg.with_config(cfg.with_xi0(x))
        return krein.solve_level(shifted, sol.perturbation, shifted.gap(k), tol).energy

    return nm.central_difference(level, xi0, h)


def berry_connection(background: Background, pert: PointPerturbation,
                     sol: krein.SpectralSolution = None, tol: Tolerance = DEFAULT_TOL,
                     route_rtol: float = 1e-4, radial_step: float = None) -> BerryConnection:
    """Berry connection at the perturbation site (formula route).

    ``dE0/dxi0`` is evaluated by finite differences where the background can
    be re-parametrised in ``xi0`` and always by Hellmann-Feynman; when both
    exist they must agree to ``route_rtol`` and the finite-difference value
    is used. ``v_rho`` is the numerically evaluated radial component.

    Raises
    ------
    RouteDisagreementError
    """
    if sol is None:
        sol = krein.solve_level(background, pert, background.gap(0), tol)
    cfg = background.config
    rho = pert.rho
    l_expect = angular_momentum(sol)
    r2 = radius_squared(sol) if cfg.b0 != 0 else None
    hf_b = hellmann_feynman_dE0_dB0(sol, tol, l_expect, r2)
    hf = 2 * math.pi / cfg.charge_sign * hf_b
    fd = None
    try:
        fd = de0_dxi0_finite_difference(sol, tol)
    except (NotImplementedError, nm.DomainError):
        fd = None
    if fd is not None:
        scale = max(abs(fd), abs(hf), math.pi * abs(cfg.xi0) * rho * rho, 1e-12)
        if abs(fd - hf) > route_rtol * scale:
            raise RouteDisagreementError(
                f"dE0/dxi0: finite difference {fd!r} vs Hellmann-Feynman {hf!r}")
    de0 = fd if fd is not None else hf
    r2_term = math.pi * cfg.xi0 * r2 if r2 is not None else 0.0
    v_theta = (-de0 / math.pi + r2_term
               + cfg.charge_sign * r_times_potential(sol)) / rho
    v_rho = radial_connection(background, pert, sol.gap, h=radial_step, tol=tol)
    return BerryConnection(rho=rho, v_theta=v_theta, v_rho=v_rho, de0_dxi0_fd=fd,
                           de0_dxi0_hf=hf,
                           expectations={"L": l_expect, "r2": r2,
                                         "rA": r_times_potential(sol)})


# ---------------------------------------------------------------------------
# overlaps and holonomy
# ---------------------------------------------------------------------------

def overlap(sol1: krein.SpectralSolution, sol2: krein.SpectralSolution, cache=None) -> complex:
    """``<psi_1|psi_2>``; angular-harmonic route for the flux line, planar otherwise."""
    bg = sol1.background
    if hasattr(bg, "partial_wave_overlap"):
        return bg.partial_wave_overlap(sol1, sol2, cache)
    return krein.overlap(sol1, sol2)


def radial_connection(background: Background, pert: PointPerturbation, gap: Gap,
                      h: float = None, tol: Tolerance = DEFAULT_TOL) -> float:
    """``V_rho ~ -arg <psi(rho - h/2) | psi(rho + h/2)> / h`` at fixed angle."""
    rho, theta = pert.rho, pert.theta
    h = h or 1e-3 * rho
    s1 = krein.solve_level(background, PointPerturbation.polar(pert.alpha, rho - h / 2, theta),
                           gap, tol)
    s2 = krein.solve_level(background, PointPerturbation.polar(pert.alpha, rho + h / 2, theta),
                           gap, tol)
    ov = overlap(s1, s2)
    return -math.atan2(ov.imag, ov.real) / h


def _holonomy_once(background, alpha, sites, gap, tol, rephase, cache):
    # the level depends on the site only through |s| (rotational symmetry)
    levels = {}
    sols = []
    for p in sites:
        pert = PointPerturbation(alpha, p)
        key = round(pert.rho, 13)
        ref = levels.get(key)
        if ref is None:
            ref = levels[key] = krein.solve_level(background, pert, gap, tol)
        sols.append(krein.SpectralSolution(ref.energy, ref.gap, ref.q_deriv, pert,
                                           background, ref.residual))
    n = len(sols)
    phases = np.empty(n)
    mags = np.empty(n)
    for k in range(n):
        ov = overlap(sols[k], sols[(k + 1) % n], cache)
        if rephase is not None:
            ov = ov * np.conj(rephase[k]) * rephase[(k + 1) % n]
        mags[k] = abs(ov)
        if mags[k] < 1e-3:
            raise OverlapTooSmallError(f"overlap {abs(ov):.2e} between sites {k} and {k + 1}")
        phases[k] = math.atan2(ov.imag, ov.real)
        if abs(phases[k]) > 0.5 * math.pi:
            raise OverlapTooSmallError(
                f"segment phase {phases[k]:.3f} exceeds pi/2 at site {k}; refine the loop")
    return -math.fsum(phases.tolist()), float(mags.min())


def discrete_holonomy(background: Background, alpha: float, loop: LoopPath, gap: Gap,
                      tol: Tolerance = DEFAULT_TOL, n: int = None, richardson: bool = True,
                      rephase=None) -> HolonomyResult:
    """Gauge-invariant discrete Berry phase around ``loop``.

    ``gamma = -sum_k arg <psi_{s_k} | psi_{s_{k+1}}>`` with ``s_n = s_0``;
    per-segment phases must stay below ``pi/2``, so no unwrapping is needed.
    With ``richardson`` the loop is also run with ``2n`` sites and the
    ``O(n^-2)`` error is extrapolated away.

    ``rephase`` (length ``n``, unit complex numbers) multiplies each state by
    an arbitrary phase; the result is unchanged (gauge invariance).
    """
    n = n or loop.n_points
    cache = {}
    g1, m1 = _holonomy_once(background, alpha, loop.points(n), gap, tol, rephase, cache)
    diag = {"n": n, "gamma_n": g1, "min_overlap": m1}
    if not richardson or rephase is not None:
        return HolonomyResult(g1, "oracle", diag)
    g2, _ = _holonomy_once(background, alpha, loop.points(2 * n), gap, tol, None, cache)
    diag["gamma_2n"] = g2
    return HolonomyResult((4 * g2 - g1) / 3, "oracle", diag)


def berry_phase_circle(background: Background, pert: PointPerturbation, radius: float,
                       gap: Gap = None, tol: Tolerance = DEFAULT_TOL,
                       orientation: int = 1) -> HolonomyResult:
    """Formula-route phase ``2 pi R V_theta(R)`` for a circle centred at the origin.

    For a flux line the persistent-current decomposition
    ``gamma = -2 dE0/dxi0 + 2 pi sgn(e) eta`` is reported as well.
    """
    gap = gap or background.gap(0)
    site = PointPerturbation.polar(pert.alpha, radius, pert.theta)
    sol = krein.solve_level(background, site, gap, tol)
    conn = berry_connection(background, site, sol, tol)
    phase = orientation * 2 * math.pi * radius * conn.v_theta
    cfg = background.config
    de0 = conn.de0_dxi0_fd if conn.de0_dxi0_fd is not None else conn.de0_dxi0_hf
    diag = {"v_theta": conn.v_theta, "v_rho": conn.v_rho, "energy": sol.energy,
            "de0_dxi0": de0}
    if cfg.eta != 0:
        diag["persistent_current_term"] = orientation * (-2.0 * de0)
        diag["flux_term"] = orientation * 2 * math.pi * cfg.charge_sign * cfg.eta
    return HolonomyResult(phase, "formula", diag)


def site_on_circle(alpha, radius, theta):
    return PointPerturbation(alpha, polar_point(radius, theta))
