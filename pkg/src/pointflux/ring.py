r"""Electron on an infinitely thin ring threaded by ``eta`` flux quanta.

The ring Hamiltonian is ``H = (-i d/dphi + eta)^2 / (2 R^2)`` on
``L^2(R dphi)``. With ``D_m = (m + eta)^2 - 2 R^2 E`` the Green and Krein
functions are

.. math::
    G(\varphi, \varphi'; E) = \frac{R}{\pi}\sum_m \frac{e^{im(\varphi-\varphi')}}{D_m},
    \qquad Q(E) = \frac{R}{\pi}\sum_m D_m^{-1}.

A point interaction at angle ``theta`` produces one level in every gap of
the free spectrum (and one below it when ``alpha < 0``); its Berry potential
(per radian of ``theta``) is

.. math::
    V = \frac{\sum_m m D_m^{-2}}{\sum_m D_m^{-2}}
      = R^2 \frac{\partial E_0}{\partial \eta} - \eta ,

the second form following from ``dE0/deta = <m + eta> / R^2``
(Hellmann-Feynman).

All series are summed symmetrically about ``c = round(-eta)``; the parts
beyond ``|m - c| > M`` are added exactly through a convergent expansion in
Hurwitz zeta functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as _sps

from . import krein
from . import numerics as nm
from .model import Background, Gap, PointPerturbation, polar_point
from .numerics import DEFAULT_TOL, DomainError, PoleError, Tolerance

#: tolerance on the agreement of the two routes for the Berry potential
ROUTE_RTOL = 1e-6


def _check_ring(radius, eta):
    if not (radius > 0 and math.isfinite(radius)):
        raise DomainError(f"ring radius must be positive, got {radius}")
    if not math.isfinite(eta):
        raise DomainError("eta must be finite")


def free_level(m: int, eta: float, radius: float = 1.0) -> float:
    """Free ring level ``(m + eta)^2 / (2 R^2)``."""
    return (m + eta) ** 2 / (2.0 * radius ** 2)


def free_levels(eta: float, radius: float = 1.0, count: int = 8) -> np.ndarray:
    """The lowest ``count`` distinct free levels in ascending order."""
    _check_ring(radius, eta)
    c = -round(eta)
    m = np.arange(c - count - 1, c + count + 2)
    levels = np.unique(np.round(free_level(m, eta, radius), 14))
    return levels[:count]


def _default_cut(k2: float) -> int:
    return max(48, int(math.ceil(4.0 * math.sqrt(abs(k2)))) + 16)


def _zeta_tail(power, shift, k2, odd):
    """``sum_{j>M} [g(j + d) +- g(j - d)]`` for ``g(y) = y^odd / (y^2 - k2)^power``.

    ``shift = (M + 1 + d, M + 1 - d)``; expands ``(1 - k2/y^2)^-power`` in
    ``k2 / y^2`` (convergent because ``M > 2 |k|``) and sums each power with
    the Hurwitz zeta function.
    """
    qa, qb = shift
    total = 0.0
    coef = 1.0
    for n in range(200):
        p = 2 * power + 2 * n - odd
        za = _sps.zeta(p, qa)
        zb = _sps.zeta(p, qb)
        term = coef * (za - zb if odd else za + zb)
        total += term
        if abs(term) <= 1e-17 * max(abs(total), 1e-300) or (term == 0.0 and n > 2):
            return total
        coef *= k2 * (power + n) / (n + 1)
    raise nm.NonConvergenceError("ring tail expansion did not converge",  # pragma: no cover
                                 estimate=total, error=abs(term))


@dataclass(frozen=True)
class RingSums:
    r"""The three lattice sums ``S0 = sum D^-1``, ``S2 = sum D^-2``, ``Sy = sum (m + eta) D^-2``."""

    s0: float
    s2: float
    sy: float
    cut: int


def ring_sums(energy: float, eta: float, radius: float = 1.0, cut: int = None) -> RingSums:
    """Evaluate the ring lattice sums with exact tails.

    Parameters
    ----------
    cut : int, optional
        Number of explicit terms on each side of the centre; must exceed
        ``2 R sqrt(2 |E|)`` so that the tail expansion converges.

    Raises
    ------
    PoleError
        If ``E`` is a free level.
    """
    _check_ring(radius, eta)
    k2 = 2.0 * radius ** 2 * energy
    cut = _default_cut(k2) if cut is None else int(cut)
    if cut + 0.5 <= 2.0 * math.sqrt(abs(k2)):
        raise DomainError(f"cut {cut} too small for E = {energy}")
    c = -round(eta)
    delta = eta + c
    y = np.arange(-cut, cut + 1) + delta
    d = y * y - k2
    if np.any(d == 0.0) or np.any(np.abs(d) < 1e-14 * max(1.0, abs(k2))):
        raise PoleError(f"E = {energy} is a free ring level")
    order = np.argsort(np.abs(y), kind="stable")
    inv = 1.0 / d
    s0 = math.fsum(inv[order].tolist())
    s2 = math.fsum((inv * inv)[order].tolist())
    sy = math.fsum((y * inv * inv)[order].tolist())
    shift = (cut + 1 + delta, cut + 1 - delta)
    s0 += _zeta_tail(1, shift, k2, 0)
    s2 += _zeta_tail(2, shift, k2, 0)
    sy += _zeta_tail(2, shift, k2, 1)
    return RingSums(s0, s2, sy, cut)


def ring_q_series(energy: float, eta: float, radius: float = 1.0, cut: int = None) -> float:
    """``Q(E) = (R/pi) sum_m [(m + eta)^2 - 2 R^2 E]^-1``."""
    return radius / math.pi * ring_sums(energy, eta, radius, cut).s0


def ring_q_derivative(energy: float, eta: float, radius: float = 1.0,
                      cut: int = None) -> float:
    """``dQ/dE = (2 R^3 / pi) sum_m D_m^-2`` (positive)."""
    return 2.0 * radius ** 3 / math.pi * ring_sums(energy, eta, radius, cut).s2


def ring_q_closed(energy: float, eta: float, radius: float = 1.0) -> float:
    r"""Closed form of the ring Krein function.

    .. math::
        Q(E) = \frac{\sin 2\pi k}{\sqrt{2E}\,(\cos 2\pi k - \cos 2\pi\eta)},
        \qquad k = R\sqrt{2E},

    continued to ``E < 0`` as ``sinh 2 pi kappa / (sqrt(2|E|) (cosh 2 pi kappa - cos 2 pi eta))``
    and to ``E = 0`` by its limit.

    Raises
    ------
    PoleError
        Where the denominator vanishes (a free level).
    """
    _check_ring(radius, eta)
    if energy > 0:
        root = math.sqrt(2.0 * energy)
        k = radius * root
        den = math.cos(2 * math.pi * k) - math.cos(2 * math.pi * eta)
        if abs(den) < 1e-15:
            raise PoleError(f"E = {energy} is a free ring level")
        return math.sin(2 * math.pi * k) / (root * den)
    if energy < 0:
        root = math.sqrt(-2.0 * energy)
        kappa = radius * root
        x = 2 * math.pi * kappa
        # sinh x / (cosh x - cos y), written to avoid overflow
        if x > 40:
            return 1.0 / root * (1 - math.exp(-2 * x)) / (
                1 + math.exp(-2 * x) - 2 * math.cos(2 * math.pi * eta) * math.exp(-x))
        den = math.cosh(x) - math.cos(2 * math.pi * eta)
        if den == 0:
            raise PoleError("E = 0 is a free ring level")
        return math.sinh(x) / (root * den)
    den = 1 - math.cos(2 * math.pi * eta)
    if den == 0:
        raise PoleError("E = 0 is a free ring level")
    return 2 * math.pi * radius / den


class RingBackground(Background):
    """The thin ring as a one-dimensional background.

    Points are identified by their polar angle; ``green(phi, theta, E)``
    takes angles. A perturbation site is any planar point on the ring, so
    ``PointPerturbation.polar(alpha, R, theta)`` is the natural constructor.
    """

    def __init__(self, radius: float = 1.0, eta: float = 0.0, cut: int = None,
                 tol: Tolerance = DEFAULT_TOL):
        _check_ring(radius, eta)
        self.radius = float(radius)
        self.eta = float(eta)
        self.cut = cut
        self.tol = tol

    def __repr__(self):
        return f"RingBackground(radius={self.radius}, eta={self.eta})"

    def with_eta(self, eta: float) -> "RingBackground":
        return RingBackground(self.radius, eta, self.cut, self.tol)

    def levels(self, count: int) -> np.ndarray:
        return free_levels(self.eta, self.radius, count)

    def gap(self, k: int) -> Gap:
        """``k = 0``: below the lowest free level; ``k >= 1``: between levels ``k-1`` and ``k``."""
        if k < 0:
            raise DomainError("gap index must be >= 0")
        lv = self.levels(k + 1)
        if k == 0:
            return Gap(-math.inf, float(lv[0]))
        return Gap(float(lv[k - 1]), float(lv[k]))

    def gap_containing(self, energy: float, max_index: int = 64) -> int:
        lv = self.levels(max_index + 1)
        k = int(np.searchsorted(lv, energy))
        if k <= max_index and (k == len(lv) or lv[k] != energy):
            return k
        raise DomainError(f"E = {energy} is a free level or out of range")

    def q_function(self, energy, rho=None):
        return ring_q_series(energy, self.eta, self.radius, self.cut)

    def q_derivative(self, energy, rho=None):
        return ring_q_derivative(energy, self.eta, self.radius, self.cut)

    def coefficients(self, energy, cut):
        """``m`` and ``(R/pi) / D_m`` for ``|m - c| <= cut``."""
        c = -round(self.eta)
        m = np.arange(c - cut, c + cut + 1)
        d = (m + self.eta) ** 2 - 2.0 * self.radius ** 2 * energy
        return m, self.radius / math.pi / d

    def green(self, r, s, energy, cut: int = 512):
        """Truncated ``G(phi, theta; E)`` for angles ``phi`` (array) and ``theta``."""
        m, coef = self.coefficients(energy, cut)
        phi = np.asarray(r, dtype=float)
        return np.exp(1j * np.multiply.outer(phi - s, m)) @ coef

    def decay_radius(self, energy, rel=1e-13):
        return self.radius


@dataclass(frozen=True)
class RingSystem:
    """Ring of radius ``R`` with flux ``eta`` and a point of strength ``alpha``."""

    radius: float = 1.0
    eta: float = 0.0
    alpha: float = 0.0
    cut: int = None

    def __post_init__(self):
        _check_ring(self.radius, self.eta)
        if not math.isfinite(self.alpha):
            raise DomainError("alpha must be finite")

    @property
    def background(self) -> RingBackground:
        return RingBackground(self.radius, self.eta, self.cut)

    def solve(self, gap_index: int = 1, theta: float = 0.0) -> krein.SpectralSolution:
        return ring_solve(self.alpha, self.eta, gap_index, self.radius, theta, self.cut)


def ring_solve(alpha: float, eta: float, gap_index: int = 1, radius: float = 1.0,
               theta: float = 0.0, cut: int = None,
               tol: Tolerance = DEFAULT_TOL) -> krein.SpectralSolution:
    """Level of the perturbed ring in gap ``gap_index``.

    Raises
    ------
    NoSolutionInGap
        E.g. in the gap below the free spectrum when ``alpha >= 0``.
    """
    bg = RingBackground(radius, eta, cut, tol)
    pert = PointPerturbation(alpha, polar_point(radius, theta))
    return krein.solve_level(bg, pert, bg.gap(gap_index), tol)


@dataclass(frozen=True)
class RingBerryPotential:
    """Berry potential of a ring level (per radian of the site angle)."""

    value: float
    series_ratio: float
    finite_difference: float
    de0_deta: float
    diagnostics: dict = field(default_factory=dict)


def _level_near(bg: RingBackground, alpha: float, energy: float, tol):
    k = bg.gap_containing(energy)
    pert = PointPerturbation(alpha, polar_point(bg.radius, 0.0))
    return krein.solve_level(bg, pert, bg.gap(k), tol).energy


def de0_deta(sol: krein.SpectralSolution, h: float = 1e-4,
             tol: Tolerance = DEFAULT_TOL) -> float:
    """``dE0/deta`` by re-solving at ``eta +- h`` (Richardson-corrected).

    The shifted level is followed into whichever gap contains the unshifted
    energy, which stays correct where free levels split as ``eta`` moves.
    """
    bg = sol.background
    alpha = sol.perturbation.alpha
    return nm.central_difference(
        lambda x: _level_near(bg.with_eta(x), alpha, sol.energy, tol), bg.eta, h)


def ring_berry_potential(sol: krein.SpectralSolution, rtol: float = ROUTE_RTOL,
                         h: float = 1e-4, tol: Tolerance = DEFAULT_TOL) -> RingBerryPotential:
    """Berry potential by the series ratio and by ``R^2 dE0/deta - eta``.

    Raises
    ------
    RouteDisagreementError
        If the routes differ by more than ``rtol`` (relative to ``max(1, |V|)``).
    """
    from .berry import RouteDisagreementError

    bg = sol.background
    sums = ring_sums(sol.energy, bg.eta, bg.radius, bg.cut)
    series = sums.sy / sums.s2 - bg.eta
    slope = de0_deta(sol, h, tol)
    fd = bg.radius ** 2 * slope - bg.eta
    if abs(series - fd) > rtol * max(1.0, abs(series)):
        raise RouteDisagreementError(
            f"ring Berry potential: series ratio {series!r} vs finite difference {fd!r}")
    return RingBerryPotential(series, series, fd, slope,
                              {"energy": sol.energy, "eta": bg.eta})


def ring_identity_residual(energy: float, eta: float, radius: float = 1.0,
                           h: float = 1e-5) -> float:
    r"""Residual of ``sum m D^-2 = -(pi / 2R) dQ/deta - eta sum D^-2``.

    ``dQ/deta`` is taken by finite differences of the series, so the check
    is independent of the term-wise algebra.
    """
    sums = ring_sums(energy, eta, radius)
    lhs = sums.sy - eta * sums.s2
    dq = nm.central_difference(lambda x: ring_q_series(energy, x, radius), eta, h)
    rhs = -math.pi / (2 * radius) * dq - eta * sums.s2
    return lhs - rhs


def _ring_states(bg: RingBackground, energy: float, thetas, cut: int, n_phi: int,
                 q_deriv: float):
    """Normalised states on a uniform ``phi`` grid, one row per site angle."""
    m, coef = bg.coefficients(energy, cut)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    phase = np.exp(1j * np.multiply.outer(phi, m))                   # (phi, m)
    shifts = np.exp(-1j * np.multiply.outer(np.asarray(thetas), m))   # (theta, m)
    return (shifts * coef) @ phase.T / math.sqrt(q_deriv)             # (theta, phi)


def _oracle_once(bg, sol, n_steps, cut, n_phi):
    thetas = 2 * math.pi * np.arange(n_steps + 1) / n_steps
    psi = _ring_states(bg, sol.energy, thetas, cut, n_phi, sol.q_deriv)
    psi[-1] = psi[0]
    w = 2 * math.pi * bg.radius / n_phi          # trapezoid weight for R dphi
    ov = np.sum(np.conj(psi[:-1]) * psi[1:], axis=1) * w
    steps = np.angle(ov)
    if np.max(np.abs(steps)) > 0.5 * math.pi:
        raise nm.NonConvergenceError("ring holonomy steps too coarse",
                                     estimate=-float(steps.sum()), error=math.pi)
    return -math.fsum(steps.tolist()), float(np.abs(ov).min())


def ring_holonomy_oracle(alpha: float, eta: float, radius: float = 1.0, gap_index: int = 1,
                         n_steps: int = 256, cut: int = 512, n_phi: int = None,
                         richardson: bool = True, tol: Tolerance = DEFAULT_TOL):
    """Discrete Berry phase of the ring level as the site goes once around.

    States are the truncated series ``|m - c| <= cut`` sampled on a uniform
    ``phi`` grid; overlaps are trapezoid integrals over ``phi``. With
    ``richardson`` the ``2 n_steps`` result is combined with the ``n_steps``
    one.

    Returns
    -------
    (gamma, diagnostics)
    """
    n_phi = n_phi or 4 * cut + 8
    sol = ring_solve(alpha, eta, gap_index, radius, 0.0, None, tol)
    bg = sol.background
    g1, mag = _oracle_once(bg, sol, n_steps, cut, n_phi)
    diag = {"n_steps": n_steps, "gamma_n": g1, "min_overlap": mag, "energy": sol.energy}
    if not richardson:
        return g1, diag
    g2, _ = _oracle_once(bg, sol, 2 * n_steps, cut, n_phi)
    diag["gamma_2n"] = g2
    return (4 * g2 - g1) / 3, diag


def ring_radial_connection(alpha: float, eta: float, radius: float = 1.0,
                           gap_index: int = 1, theta: float = 0.0, h: float = None,
                           cut: int = 512, n_phi: int = None) -> float:
    """Radial Berry potential of the ring embedded in the plane.

    Moving the site radially changes the ring radius; states of different
    radii are compared on the common angle variable (``sqrt(R) psi``, which
    is unit-normalised in ``dphi``), and
    ``V_rho = -arg <psi_R | psi_{R+h}> / h``.
    """
    h = h or 1e-3 * radius
    n_phi = n_phi or 4 * cut + 8
    states = []
    for r in (radius - h / 2, radius + h / 2):
        sol = ring_solve(alpha, eta, gap_index, r, theta)
        psi = _ring_states(sol.background, sol.energy, [theta], cut, n_phi, sol.q_deriv)[0]
        states.append(math.sqrt(r) * psi)
    ov = np.sum(np.conj(states[0]) * states[1]) * 2 * math.pi / n_phi
    return -math.atan2(ov.imag, ov.real) / h
