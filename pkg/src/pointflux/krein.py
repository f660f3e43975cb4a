"""Gap-wise spectral solver and normalised eigenfunctions.

A point interaction of strength ``alpha`` at ``s`` produces a level wherever
``Q(E; s) + alpha = 0`` inside a gap of the unperturbed spectrum. Because
``dQ/dE > 0`` there is at most one such level per gap; the eigenfunction is
``G(r, s; E0) / sqrt(dQ/dE)``.

The module also provides the planar quadrature used for norms, overlaps and
expectation values of these logarithmically singular functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nm
from .model import Background, Gap, PointPerturbation, as_point
from .numerics import DEFAULT_TOL, DomainError, NoSignChangeError, Tolerance

E_MIN = -1.0e6


class NoSolutionInGap(Exception):
    """``Q + alpha`` has no zero in the requested gap (a legal outcome)."""

    def __init__(self, gap: Gap, reason: str):
        super().__init__(f"no level in gap ({gap.lower}, {gap.upper}): {reason}")
        self.gap = gap
        self.reason = reason


@dataclass(frozen=True)
class SpectralSolution:
    """A level of the point-perturbed operator.

    Attributes
    ----------
    energy : float
        The level ``E0``.
    gap : Gap
        Gap of the unperturbed spectrum containing it.
    q_deriv : float
        ``dQ/dE`` at ``E0`` (positive).
    perturbation : PointPerturbation
    background : Background
    residual : float
        ``Q(E0) + alpha`` actually achieved.
    """

    energy: float
    gap: Gap
    q_deriv: float
    perturbation: PointPerturbation
    background: Background
    residual: float = 0.0

    @property
    def site(self) -> np.ndarray:
        return self.perturbation.site


def _guard(gap: Gap) -> float:
    width = gap.width if math.isfinite(gap.width) else abs(gap.upper)
    return 1e-9 * max(width, 1.0)


def _bracket_root(f, gap: Gap, tol: Tolerance = DEFAULT_TOL,
                  e_min: float = E_MIN) -> float:
    """Root of an increasing function ``f`` inside ``gap``.

    Bounded gaps: start at the midpoint and move geometrically toward the
    edge indicated by the sign of ``f``, stopping at a guard distance from
    the (pole) edges. Semi-infinite gaps: probe ``upper - 2^k`` downward to
    ``e_min`` and ``upper - 2^-k`` upward to the guard.

    Raises
    ------
    NoSolutionInGap
    """
    guard = _guard(gap)
    hi_edge = gap.upper - guard
    if gap.semi_infinite:
        start = gap.upper - 1.0
        f_start = f(start)
        if f_start > 0:
            hi, k = start, 1
            while True:
                lo = gap.upper - 2.0 ** k
                if lo < e_min:
                    raise NoSolutionInGap(gap, f"Q + alpha > 0 down to E = {e_min}")
                if f(lo) < 0:
                    break
                hi, k = lo, k + 1
        else:
            lo, k = start, 1
            while True:
                hi = max(gap.upper - 2.0 ** -k, hi_edge)
                if f(hi) > 0:
                    break
                if hi <= hi_edge or hi == hi_edge:
                    raise NoSolutionInGap(gap, "Q + alpha < 0 up to the gap edge")
                lo, k = hi, k + 1
    else:
        lo_edge = gap.lower + guard
        mid = 0.5 * (gap.lower + gap.upper)
        half = 0.5 * gap.width
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        k = 1
        if f_mid > 0:
            hi = mid
            while True:
                lo = max(gap.lower + half * 2.0 ** -k, lo_edge)
                if f(lo) < 0:
                    break
                if lo == lo_edge:
                    raise NoSolutionInGap(gap, "Q + alpha > 0 down to the gap edge")
                hi, k = lo, k + 1
        else:
            lo = mid
            while True:
                hi = min(gap.upper - half * 2.0 ** -k, hi_edge)
                if f(hi) > 0:
                    break
                if hi == hi_edge:
                    raise NoSolutionInGap(gap, "Q + alpha < 0 up to the gap edge")
                lo, k = hi, k + 1
    try:
        return nm.find_root_bracketed(f, lo, hi, Tolerance(abs_tol=1e-15, rel_tol=4e-16,
                                                           max_iter=tol.max_iter))
    except NoSignChangeError as exc:  # pragma: no cover - bracket verified above
        raise NoSolutionInGap(gap, str(exc)) from exc


def solve_level(background: Background, pert: PointPerturbation, gap: Gap,
                tol: Tolerance = DEFAULT_TOL) -> SpectralSolution:
    """Solve ``Q(E; s) + alpha = 0`` inside ``gap``.

    Raises
    ------
    NoSolutionInGap
        If the gap holds no level (allowed: e.g. the flux line with a
        repulsive point).
    DomainError
        If the site sits on the flux line of a punctured background.
    """
    rho = pert.rho
    if background.singular_origin and rho == 0.0:
        raise DomainError("perturbation site must avoid the flux line")

    def f(e):
        return background.q_function(e, rho) + pert.alpha

    energy = _bracket_root(f, gap, tol)
    qd = background.q_derivative(energy, rho)
    if not qd > 0:
        raise nm.NonConvergenceError(f"dQ/dE = {qd} is not positive at E0 = {energy}")
    return SpectralSolution(energy=energy, gap=gap, q_deriv=qd, perturbation=pert,
                            background=background, residual=f(energy))


def eigenfunction(sol: SpectralSolution, r):
    """Normalised bound state ``G(r, s; E0) / sqrt(dQ/dE)``.

    Raises
    ------
    DomainError
        At ``r = s`` (logarithmic singularity).
    """
    return sol.background.green(r, sol.site, sol.energy) / math.sqrt(sol.q_deriv)


# ---------------------------------------------------------------------------
# planar quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneRule:
    """Quadrature nodes and weights on the plane."""

    points: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> complex:
        return complex(np.dot(self.weights, values))


def _radial_rule(r_max, r_first, n_per, ratio):
    """Gauss panels on ``[0, r_max]``: ``r = r_first u^2`` first, then geometric."""
    u, wu = nm.gauss_legendre(n_per, 0.0, 1.0)
    nodes = [r_first * u * u]
    weights = [2 * r_first * u * wu]
    a = r_first
    while a < r_max:
        b = min(a * ratio, r_max)
        if r_max - b < 0.25 * (b - a):
            b = r_max
        x, w = nm.gauss_legendre(n_per, a, b)
        nodes.append(x)
        weights.append(w)
        a = b
    return np.concatenate(nodes), np.concatenate(weights)


def plane_rule(centers, r_max, length_scale, align_angle=0.0, n_angle=96,
               n_per=12, ratio=2.0) -> PlaneRule:
    """Polar product rules around each singular centre, glued by a partition of unity.

    Each centre ``c_i`` gets a polar grid (radial Gauss panels refined
    geometrically toward the centre, uniform angles). Its weights are
    multiplied by ``w_i = prod_{k != i} d_k^2 / sum_j prod_{k != j} d_k^2``,
    which equals one at ``c_i``, vanishes quadratically at the other
    centres, and sums to one everywhere.

    Angles start at ``align_angle + pi / n_angle`` with ``n_angle`` even, so
    every grid is symmetric under reflection in the line at ``align_angle``
    and under the point reflection through its centre.
    """
    if n_angle % 2:
        raise DomainError("n_angle must be even")
    centers = [as_point(c) for c in centers]
    if len(centers) > 1:
        sep = min(np.hypot(*(ci - cj)) for i, ci in enumerate(centers)
                  for cj in centers[i + 1:])
        if sep == 0:
            raise DomainError("coincident quadrature centres")
    else:
        sep = math.inf
    r_first = min(length_scale, sep) / 64.0
    rr, wr = _radial_rule(r_max, r_first, n_per, ratio)
    phi = align_angle + math.pi / n_angle + 2 * math.pi * np.arange(n_angle) / n_angle
    wphi = 2 * math.pi / n_angle
    offsets = np.stack([np.outer(rr, np.cos(phi)), np.outer(rr, np.sin(phi))], axis=-1)
    base_w = np.outer(rr * wr, np.full(n_angle, wphi))
    all_pts, all_w = [], []
    for i, c in enumerate(centers):
        pts = (c + offsets).reshape(-1, 2)
        w = base_w.reshape(-1).copy()
        if len(centers) > 1:
            d2 = np.stack([((pts - ck) ** 2).sum(axis=1) for ck in centers], axis=1)
            # products over all-but-one centre
            prods = np.stack([np.prod(np.delete(d2, j, axis=1), axis=1)
                              for j in range(len(centers))], axis=1)
            w = w * prods[:, i] / prods.sum(axis=1)
        all_pts.append(pts)
        all_w.append(w)
    return PlaneRule(np.concatenate(all_pts), np.concatenate(all_w))


def _length_scale(sol: SpectralSolution) -> float:
    kappa = math.sqrt(max(-2.0 * sol.energy, 0.0))
    scale = 1.0 / kappa if kappa > 0 else math.inf
    try:
        scale = min(scale, sol.background.config.a0)
    except DomainError:
        pass
    return scale if math.isfinite(scale) else 1.0


def rule_for(solutions, rel=1e-14, n_angle=96, n_per=12, align_angle=None) -> PlaneRule:
    """Plane rule adapted to one or more bound states."""
    centers = []
    for sol in solutions:
        for p in sol.background.singular_points(sol.site):
            if not any(np.allclose(p, q, rtol=0, atol=1e-15) for q in centers):
                centers.append(p)
    scale = min(_length_scale(s) for s in solutions)
    radius = max(s.background.decay_radius(s.energy, rel) for s in solutions)
    extent = max(np.hypot(*(c - centers[0])) for c in centers)
    if align_angle is None:
        site = solutions[0].site
        align_angle = math.atan2(site[1], site[0]) if np.any(site) else 0.0
    return plane_rule(centers, radius + extent, scale, align_angle, n_angle, n_per)


def norm_quadrature(sol: SpectralSolution, tol: float = 1e-14, rule: PlaneRule = None,
                    raw: bool = False) -> float:
    """``int |psi_s|^2`` over the plane (``raw=True``: ``int |G|^2`` instead).

    Truncated where the radial envelope falls below ``tol`` of its peak.
    """
    rule = rule or rule_for([sol], rel=tol)
    g = sol.background.green(rule.points, sol.site, sol.energy)
    value = float(np.dot(rule.weights, np.abs(g) ** 2))
    return value if raw else value / sol.q_deriv


def overlap(sol1: SpectralSolution, sol2: SpectralSolution, rule: PlaneRule = None,
            n_angle=96, n_per=12) -> complex:
    """``<psi_1 | psi_2>`` by planar quadrature (conjugate-linear in the first slot)."""
    if rule is None:
        d = sol2.site - sol1.site
        align = math.atan2(d[1], d[0]) if np.any(d) else 0.0
        rule = rule_for([sol1, sol2], n_angle=n_angle, n_per=n_per, align_angle=align)
    g1 = eigenfunction(sol1, rule.points)
    g2 = eigenfunction(sol2, rule.points)
    return complex(np.dot(rule.weights, np.conj(g1) * g2))


def expectation(sol: SpectralSolution, weight, rule: PlaneRule = None) -> float:
    """``<psi | weight(r) | psi>`` for a real multiplicative ``weight``."""
    rule = rule or rule_for([sol])
    psi = eigenfunction(sol, rule.points)
    return float(np.dot(rule.weights, weight(rule.points) * np.abs(psi) ** 2))


def angular_momentum_quadrature(sol: SpectralSolution, rule: PlaneRule = None) -> float:
    """``<psi | -i d/dphi | psi>`` by planar quadrature."""
    bg = sol.background
    rule = rule or rule_for([sol])
    g = bg.green(rule.points, sol.site, sol.energy)
    dg = bg.green_dphi(rule.points, sol.site, sol.energy)
    val = np.dot(rule.weights, np.conj(g) * (-1j) * dg) / sol.q_deriv
    return float(val.real)
