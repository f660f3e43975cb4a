r"""Concrete rotationally symmetric backgrounds.

Four unperturbed Hamiltonians are provided, each with its Krein
Q-function, the energy derivative of Q, and the Green function:

* :class:`LandauBackground` -- uniform field,
* :class:`WhiskerBackground` -- Aharonov-Bohm flux line, no uniform field,
* :class:`ParabolicDotBackground` -- parabolic confinement in a uniform field,
* :class:`ZeroRangeDotBackground` -- uniform field plus a point dot at the
  origin (itself a Krein-perturbed Landau system).

Conventions (``hbar = m = |e| = 1``): the Green function is the kernel of
``(H - E)^{-1}``, whose logarithmic singularity is ``(1/pi) ln(1/|r - s|)``,
and ``Q(E; s)`` is the constant term of ``G(r, s; E)`` as ``r -> s``. The
symmetric gauge is used throughout, so rotations about the origin commute
with every Hamiltonian here and ``G(Rr, Rs) = G(r, s)``.
"""
from __future__ import annotations

import math
import threading
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from . import numerics as nm
from .model import Background, Gap, SystemConfig, as_point, wedge
from .numerics import DEFAULT_TOL, DomainError, PoleError, Tolerance

_INV_PI = 1.0 / math.pi


def _points(r):
    arr = np.asarray(r, dtype=float)
    if arr.shape[-1] != 2:
        raise DomainError("points must have a trailing axis of length 2")
    return arr


def _coincidence_check(d):
    if np.any(d == 0.0):
        raise DomainError("Green function evaluated at coincident points")


# ---------------------------------------------------------------------------
# uniform field
# ---------------------------------------------------------------------------

def _check_landau_config(config: SystemConfig):
    if config.b0 == 0:
        raise DomainError("uniform-field background needs b0 != 0")


def landau_level(ell: int, config: SystemConfig) -> float:
    """Landau level ``(ell + 1/2) omega_c``."""
    if ell < 0:
        raise DomainError("Landau level index must be >= 0")
    return (ell + 0.5) * config.omega_c


def _landau_a(energy, omega_c):
    a = 0.5 - energy / omega_c
    if a <= 0 and a == math.floor(a):
        raise PoleError(f"E = {energy} is a Landau level")
    return a


def landau_q(energy: float, config: SystemConfig) -> float:
    r"""Krein function of the uniform-field Hamiltonian.

    .. math::
        Q(E) = -\frac{1}{2\pi}\left[\psi\!\left(\tfrac12 - \tfrac{E}{\omega_c}\right)
               + 2\gamma - \ln 2 - 2\ln a_0\right]

    Independent of the site.

    Raises
    ------
    PoleError
        At a Landau level.
    """
    _check_landau_config(config)
    a = _landau_a(energy, config.omega_c)
    return -(nm.digamma(a) + 2 * nm.EULER_GAMMA - math.log(2.0)
             - 2 * math.log(config.a0)) / (2 * math.pi)


def landau_q_derivative(energy: float, config: SystemConfig) -> float:
    r""":math:`\partial Q/\partial E = \psi'(\tfrac12 - E/\omega_c)/(2\pi\omega_c)`."""
    _check_landau_config(config)
    a = _landau_a(energy, config.omega_c)
    return nm.trigamma(a) / (2 * math.pi * config.omega_c)


def landau_profile_exact(d, energy: float, config: SystemConfig):
    r"""Radial profile :math:`f(d) = \frac{1}{2\pi}\Gamma(a) e^{-x/2} U(a,1;x)`.

    ``x = d^2 / (2 a_0^2)`` and ``a = 1/2 - E/omega_c``; vectorised over ``d``.
    """
    _check_landau_config(config)
    a = _landau_a(energy, config.omega_c)
    d = np.asarray(d, dtype=float)
    _coincidence_check(d)
    x = d * d / (2 * config.a0 ** 2)
    return nm.gamma_tricomi_array(a, x) * np.exp(-0.5 * x) / (2 * math.pi)


class _Profile:
    """Spline of ``h(s) = f(e^s) + s/pi`` on a logarithmic distance grid.

    ``h`` is smooth in ``s = ln d`` and tends to ``Q(E)`` as ``d -> 0``, so
    the spline captures the logarithmic singularity exactly.
    """

    def __init__(self, energy, config, n=2400):
        a = _landau_a(energy, config.omega_c)
        a0 = config.a0
        kappa = math.sqrt(max(config.omega_c - 2 * energy, config.omega_c))
        ell = min(a0, 1.0 / kappa)
        self.d_min = 1e-8 * ell
        self.d_max = min(19.0 * a0, 48.0 / kappa + 6.0 * ell)
        s = np.linspace(math.log(self.d_min), math.log(self.d_max), n)
        d = np.exp(s)
        x = d * d / (2 * a0 * a0)
        f = nm.gamma_tricomi_array(a, x) * np.exp(-0.5 * x) / (2 * math.pi)
        self.spline = CubicSpline(s, f + s * _INV_PI)
        self.dspline = self.spline.derivative()
        self.h0 = float(self.spline(s[0]))
        env = (f * d) ** 2
        peak = env.max()
        self._env_d = d
        self._env = env / peak

    def value(self, d):
        d = np.asarray(d, dtype=float)
        _coincidence_check(d)
        s = np.log(np.clip(d, self.d_min, self.d_max))
        out = self.spline(s) - np.log(d) * _INV_PI
        out = np.where(d < self.d_min, self.h0 - np.log(d) * _INV_PI, out)
        return np.where(d > self.d_max, 0.0, out)

    def derivative(self, d):
        """``f'(d)``."""
        d = np.asarray(d, dtype=float)
        s = np.log(np.clip(d, self.d_min, self.d_max))
        hp = np.where(d < self.d_min, 0.0, self.dspline(s))
        out = (hp - _INV_PI) / d
        return np.where(d > self.d_max, 0.0, out)

    def radius(self, rel):
        """Distance beyond which ``(f d)^2`` stays below ``rel`` of its peak."""
        above = np.nonzero(self._env > rel)[0]
        return float(self._env_d[above[-1]]) if len(above) else float(self.d_max)


class LandauBackground(Background):
    """Charged particle in a uniform magnetic field.

    The Green function factorises as
    ``G(r, s; E) = exp(-pi i xi0 r x s) f(|r - s|)`` with a real profile
    ``f``; profiles are tabulated once per energy (cached).
    """

    def __init__(self, config: SystemConfig, tol: Tolerance = DEFAULT_TOL):
        _check_landau_config(config)
        if config.eta != 0 or config.omega0 != 0:
            raise DomainError("uniform-field background needs eta = 0 and omega0 = 0")
        self.config = config
        self.tol = tol
        self._profiles = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"LandauBackground({self.config!r})"

    def with_config(self, config):
        return LandauBackground(config, self.tol)

    def level(self, ell):
        return landau_level(ell, self.config)

    def gap(self, k: int) -> Gap:
        if k < 0:
            raise DomainError("gap index must be >= 0")
        if k == 0:
            return Gap(-math.inf, self.level(0))
        return Gap(self.level(k - 1), self.level(k))

    def q_function(self, energy, rho=0.0):
        return landau_q(energy, self.config)

    def q_derivative(self, energy, rho=0.0):
        return landau_q_derivative(energy, self.config)

    def profile(self, energy) -> _Profile:
        key = float(energy)
        prof = self._profiles.get(key)
        if prof is None:
            prof = _Profile(key, self.config)
            with self._lock:
                if len(self._profiles) > 64:
                    self._profiles.clear()
                self._profiles[key] = prof
        return prof

    def phase(self, r, s):
        return np.exp(-1j * math.pi * self.config.xi0 * wedge(r, s))

    def green(self, r, s, energy):
        r = _points(r)
        s = as_point(s)
        d = np.hypot(r[..., 0] - s[0], r[..., 1] - s[1])
        return self.phase(r, s) * self.profile(energy).value(d)

    def green_dphi(self, r, s, energy):
        """Derivative of ``G(r, s)`` with respect to the polar angle of ``r``."""
        r = _points(r)
        s = as_point(s)
        d = np.hypot(r[..., 0] - s[0], r[..., 1] - s[1])
        prof = self.profile(energy)
        rs_dot = r[..., 0] * s[0] + r[..., 1] * s[1]
        rs_wedge = wedge(r, s)
        xi0 = self.config.xi0
        return self.phase(r, s) * (1j * math.pi * xi0 * rs_dot * prof.value(d)
                                   - prof.derivative(d) * rs_wedge / d)

    def decay_radius(self, energy, rel=1e-13):
        return self.profile(energy).radius(rel)


@lru_cache(maxsize=16)
def _landau_for(config: SystemConfig) -> LandauBackground:
    return LandauBackground(config)


def landau_green(r, s, energy: float, config: SystemConfig):
    r"""Uniform-field Green function.

    .. math::
        G(r,s;E) = \frac{1}{2\pi}\Gamma(a)\,e^{-\pi i \xi_0\, r\wedge s}\,
                   e^{-x/2}\,U(a,1;x),\qquad
        a = \tfrac12 - \tfrac{E}{\omega_c},\quad x = \frac{|r-s|^2}{2a_0^2}

    Evaluated directly (no tabulation). Vectorised over ``r``.

    Raises
    ------
    PoleError
        At a Landau level.
    DomainError
        At ``r = s``.
    """
    r = _points(r)
    s = as_point(s)
    d = np.hypot(r[..., 0] - s[0], r[..., 1] - s[1])
    phase = np.exp(-1j * math.pi * config.xi0 * wedge(r, s))
    return phase * landau_profile_exact(d, energy, config)


# ---------------------------------------------------------------------------
# Aharonov-Bohm whisker
# ---------------------------------------------------------------------------

def _whisker_kappa(energy):
    if not energy < 0:
        raise DomainError(f"whisker quantities need E < 0, got {energy}")
    return math.sqrt(-2.0 * energy)


def whisker_orders(config: SystemConfig, m_cut: int):
    """Angular momenta ``m`` and Bessel orders ``nu_m = |m - sgn(e) eta|``.

    The window is centred on the nearest integer ``c`` to ``sgn(e) eta`` so
    that partial waves are paired symmetrically about the flux.

    Returns
    -------
    m, nu, j, delta
        ``m = c + j`` for ``|j| <= m_cut`` and ``nu = |j - delta|``.
    """
    shift = config.charge_sign * config.eta
    c = int(round(shift))
    delta = shift - c
    j = np.arange(-m_cut, m_cut + 1)
    return c + j, np.abs(j - delta), j, delta


_DEBYE_PAIR = 60


def _ik_terms(j, delta, x, deriv=False):
    """``[IK_{|j-delta|} - IK_{|j|}](x)`` (or x-derivatives) term by term.

    Pairs with ``|j| >= 60`` use the Debye expansion for all three orders
    involved, so the paired second differences never mix two methods.
    """
    j = np.asarray(j)
    nu = np.abs(j - delta)
    free = np.abs(j).astype(float)
    exact = nm.bessel_ik_product_dx if deriv else nm.bessel_ik_product
    big = np.abs(j) >= _DEBYE_PAIR
    out = np.empty(j.shape)
    small = ~big
    with np.errstate(invalid="ignore", over="ignore"):
        out[small] = exact(nu[small], x) - exact(free[small], x)
    bad = small & ~np.isfinite(out)
    big |= bad
    if np.any(big):
        out[big] = (nm.debye_ik_product(nu[big], x, deriv)
                    - nm.debye_ik_product(free[big], x, deriv))
    return out


def _ik_single(nu, j, x, deriv=False):
    """``IK_nu(x)`` (or its derivative) with the same method split as :func:`_ik_terms`."""
    nu = np.asarray(nu, dtype=float)
    exact = nm.bessel_ik_product_dx if deriv else nm.bessel_ik_product
    big = np.abs(np.asarray(j)) >= _DEBYE_PAIR
    out = np.empty(nu.shape)
    with np.errstate(invalid="ignore", over="ignore"):
        out[~big] = exact(nu[~big], x)
    big |= ~np.isfinite(out)
    if np.any(big):
        out[big] = nm.debye_ik_product(nu[big], x, deriv)
    return out


def _whisker_tail(A, x, delta):
    # midpoint-rule integral of the leading Debye term of the paired tail
    return 0.5 * (2 * np.arcsinh(A / x) - np.arcsinh((A - delta) / x)
                  - np.arcsinh((A + delta) / x))


def _whisker_tail_dx(A, x, delta):
    def g(b):
        return -b / (x * math.sqrt(x * x + b * b))
    return 0.5 * (2 * g(A) - g(A - delta) - g(A + delta))


def _whisker_series(x, delta, tol, deriv=False):
    """Correction ``sum_j [IK_{|j-delta|} - IK_{|j|}](x)`` (or its x-derivative)."""
    if delta == 0.0:
        return 0.0
    tail = _whisker_tail_dx if deriv else _whisker_tail

    def partial(M):
        terms = _ik_terms(np.arange(-M, M + 1), delta, x, deriv)
        return math.fsum(terms.tolist()) + tail(M + 0.5, x, delta)

    M = max(64, int(2 * x) + 32)
    prev = partial(M)
    for _ in range(8):
        M *= 2
        cur = partial(M)
        if abs(cur - prev) <= tol.abs_tol:
            return cur
        prev = cur
    raise nm.NonConvergenceError("whisker partial-wave series did not settle",
                                 estimate=cur, error=abs(cur - prev))


def free_q(energy: float) -> float:
    r"""Free-particle Krein function :math:`(1/\pi)(\ln(2/\kappa) - \gamma)`."""
    kappa = _whisker_kappa(energy)
    return (math.log(2.0 / kappa) - nm.EULER_GAMMA) * _INV_PI


def whisker_q(energy: float, rho: float, config: SystemConfig,
              tol: Tolerance = DEFAULT_TOL) -> float:
    r"""Krein function of the Aharonov-Bohm flux line at distance ``rho``.

    .. math::
        Q(E;\rho) = Q_{\rm free}(E) + \frac1\pi\sum_m
            \left[I_{\nu_m}K_{\nu_m} - I_{|m|}K_{|m|}\right](\kappa\rho)

    with ``kappa = sqrt(-2E)``. The paired series is summed with a
    Debye-asymptotic tail estimate, and the cutoff is doubled until two
    successive sums agree to ``tol.abs_tol``.
    """
    if not rho > 0:
        raise DomainError("whisker site must be away from the flux line")
    kappa = _whisker_kappa(energy)
    _, _, _, delta = whisker_orders(config, 0)
    return free_q(energy) + _whisker_series(kappa * rho, delta, tol) * _INV_PI


def whisker_q_derivative(energy: float, rho: float, config: SystemConfig,
                         tol: Tolerance = DEFAULT_TOL) -> float:
    """Energy derivative of :func:`whisker_q` (term-wise differentiated)."""
    if not rho > 0:
        raise DomainError("whisker site must be away from the flux line")
    kappa = _whisker_kappa(energy)
    _, _, _, delta = whisker_orders(config, 0)
    ds_dx = _whisker_series(kappa * rho, delta, tol, deriv=True)
    return 1.0 / (math.pi * kappa * kappa) - rho / (math.pi * kappa) * ds_dx


def _norm_tails(A, x, rho, delta, c):
    def t1(b):
        return rho * rho * (1 - b / math.sqrt(b * b + x * x)) / (x * x)

    def t2(b):
        return rho * rho / math.sqrt(b * b + x * x)
    total = t1(A - delta) + t1(A + delta)
    moment = ((c + delta) * t1(A - delta) + t2(A - delta)
              + (c + delta) * t1(A + delta) - t2(A + delta))
    return total, moment


def _graded_radial_rule(marks, r_far, n_per, levels=16):
    """Gauss panels on ``(0, max(marks) + r_far)`` refined toward 0 and each mark."""
    edges = [0.0] + list(marks)
    breaks = set(edges)
    for a, b in zip(edges[:-1], edges[1:]):
        width = b - a
        for k in range(1, levels):
            breaks.add(a + width * 2.0 ** -k)
            breaks.add(b - width * 2.0 ** -k)
    top = marks[-1]
    step = top * 2.0 ** -levels
    while step < r_far:
        breaks.add(top + step)
        step *= 2.0
    breaks.add(top + r_far)
    pts = np.array(sorted(breaks))
    nodes, weights = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        x, w = nm.gauss_legendre(n_per, a, b)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


class WhiskerBackground(Background):
    """Infinitely thin solenoid carrying ``eta`` flux quanta, ``b0 = 0``.

    Parameters
    ----------
    config : SystemConfig
        Must have ``b0 = 0`` and ``omega0 = 0``.
    m_cut : int
        Partial-wave cutoff used for the two-dimensional Green function.
    """

    singular_origin = True

    def __init__(self, config: SystemConfig, m_cut: int = 400,
                 tol: Tolerance = DEFAULT_TOL):
        if config.b0 != 0 or config.omega0 != 0:
            raise DomainError("whisker background needs b0 = 0 and omega0 = 0")
        if m_cut < 8:
            raise DomainError("partial-wave cutoff too small")
        self.config = config
        self.m_cut = int(m_cut)
        self.tol = tol

    def __repr__(self):
        return f"WhiskerBackground({self.config!r}, m_cut={self.m_cut})"

    def with_config(self, config):
        return WhiskerBackground(config, self.m_cut, self.tol)

    def gap(self, k):
        if k != 0:
            raise DomainError("the flux line has a single gap (-inf, 0)")
        return Gap(-math.inf, 0.0)

    def q_function(self, energy, rho):
        return whisker_q(energy, rho, self.config, self.tol)

    def q_derivative(self, energy, rho):
        return whisker_q_derivative(energy, rho, self.config, self.tol)

    def azimuthal_potential(self, r):
        """``A_phi = eta / r`` (flux ``eta`` quanta, ``Phi_0 = 2 pi``)."""
        r = np.asarray(r, dtype=float)
        return self.config.eta / r

    def singular_points(self, site):
        return [as_point(site), np.zeros(2)]

    def decay_radius(self, energy, rel=1e-13):
        kappa = _whisker_kappa(energy)
        return 0.5 * math.log(1.0 / rel) / kappa + 3.0 / kappa

    def radial_green(self, m_index, r, rho, energy):
        """``G_m(r, rho) = 2 I_nu(kappa r_<) K_nu(kappa r_>)``, ``m = c + j``."""
        kappa = _whisker_kappa(energy)
        _, _, _, delta = whisker_orders(self.config, 0)
        nu = np.abs(np.asarray(m_index) - (self.config.charge_sign * self.config.eta))
        r = np.asarray(r, dtype=float)
        lo = np.minimum(r, rho) * kappa
        hi = np.maximum(r, rho) * kappa
        return 2.0 * nm.bessel_ik_cross(nu, lo, hi)

    def partial_norms(self, energy, rho, m_cut=None):
        """Closed-form ``N_m = int G_m(r, rho)^2 r dr = -2 rho (I K)'(kappa rho)/kappa``.

        Returns
        -------
        m, N, tails
            ``tails = (sum_N_tail, sum_mN_tail)`` estimates the truncated parts.
        """
        kappa = _whisker_kappa(energy)
        M = m_cut or max(2000, int(4 * kappa * rho))
        m, nu, j, delta = whisker_orders(self.config, M)
        x = kappa * rho
        norms = -2.0 * rho * _ik_single(nu, j, x, deriv=True) / kappa
        c = int(m[M])
        return m, norms, _norm_tails(M + 0.5, x, rho, delta, c)

    def angular_momentum(self, energy, rho):
        """``<L> = sum m N_m / sum N_m`` for the bound state at distance ``rho``."""
        m, norms, (t_n, t_mn) = self.partial_norms(energy, rho)
        total = math.fsum(norms.tolist()) + t_n
        moment = math.fsum((m * norms).tolist()) + t_mn
        return moment / total

    def radial_overlaps(self, rho1, e1, rho2, e2, m_cut=2000, n_per=12):
        """``R_m = int_0^inf G_m(r, rho1; E1) G_m(r, rho2; E2) r dr`` by Gauss panels.

        Panels are refined geometrically toward ``0``, ``rho1`` and ``rho2``
        (high orders concentrate there); returns ``(m, R_m)``.
        """
        k1, k2 = _whisker_kappa(e1), _whisker_kappa(e2)
        m, nu, j, _ = whisker_orders(self.config, m_cut)
        nodes, weights = _graded_radial_rule(sorted({rho1, rho2}),
                                             40.0 / min(k1, k2), n_per)
        g1 = self.radial_green(m[:, None], nodes[None, :], rho1, e1)
        g2 = self.radial_green(m[:, None], nodes[None, :], rho2, e2)
        return m, (g1 * g2) @ (weights * nodes)

    def partial_wave_overlap(self, sol1, sol2, cache=None):
        """``<psi_1|psi_2>`` summed over angular harmonics (Parseval in angle).

        ``(1 / 2 pi sqrt(q1 q2)) sum_m e^{i m (theta1 - theta2)} R_m``; the
        radial integrals ``R_m`` come from :meth:`radial_overlaps` and can
        be shared through ``cache`` (keyed by radii and energies).
        """
        rho1, th1 = sol1.perturbation.rho, sol1.perturbation.theta
        rho2, th2 = sol2.perturbation.rho, sol2.perturbation.theta
        key = (round(rho1, 12), sol1.energy, round(rho2, 12), sol2.energy)
        if cache is not None and key in cache:
            m, radial = cache[key]
        else:
            m, radial = self.radial_overlaps(rho1, sol1.energy, rho2, sol2.energy)
            if cache is not None:
                cache[key] = (m, radial)
        terms = np.exp(1j * m * (th1 - th2)) * radial
        total = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
        return total / (2 * math.pi * math.sqrt(sol1.q_deriv * sol2.q_deriv))

    def _series_terms(self, r, s, energy, dphi=False):
        kappa = _whisker_kappa(energy)
        rho = math.hypot(*s)
        theta = math.atan2(s[1], s[0])
        rr = np.hypot(r[..., 0], r[..., 1]).reshape(-1)
        phi = np.arctan2(r[..., 1], r[..., 0]).reshape(-1)
        lo = np.minimum(rr, rho) * kappa
        hi = np.maximum(rr, rho) * kappa
        # terms fall off like (r_< / r_>)^nu; keep only what is needed
        q = float(np.max(lo / hi))
        need = self.m_cut if q >= 1.0 else int(math.log(1e-15) / math.log(q)) + 8
        m, nu, j, _ = whisker_orders(self.config, min(self.m_cut, max(need, 8)))
        free_order = np.abs(j).astype(float)[None, :]
        diff = (nm.bessel_ik_cross(nu[None, :], lo[:, None], hi[:, None])
                - nm.bessel_ik_cross(free_order, lo[:, None], hi[:, None]))
        angle = np.exp(1j * np.outer(phi - theta, m))
        if dphi:
            angle = angle * (1j * m)[None, :]
        return (angle * diff).sum(axis=1) * _INV_PI

    def _by_ratio(self, flat, s, energy, fn, chunk):
        """Evaluate ``fn`` on chunks of points grouped by ``r_< / r_>``."""
        rho = math.hypot(*s)
        rr = np.hypot(flat[:, 0], flat[:, 1])
        order = np.argsort(np.minimum(rr, rho) / np.maximum(rr, rho))
        out = np.empty(len(flat), dtype=complex)
        for start in range(0, len(flat), chunk):
            idx = order[start:start + chunk]
            out[idx] = fn(flat[idx])
        return out

    def green(self, r, s, energy, chunk=512):
        r"""Two-dimensional Green function by the addition theorem.

        .. math::
            G = \frac1\pi K_0(\kappa|r-s|) + \frac1\pi\sum_m e^{im(\varphi-\theta)}
                \left[I_{\nu_m}K_{\nu_m} - I_{|m|}K_{|m|}\right](\kappa r_<, \kappa r_>)
        """
        r = _points(r)
        s = as_point(s)
        kappa = _whisker_kappa(energy)
        shape = r.shape[:-1]
        flat = r.reshape(-1, 2)
        d = np.hypot(flat[:, 0] - s[0], flat[:, 1] - s[1])
        _coincidence_check(d)
        base = nm.bessel_ik_scaled(0.0, kappa * d)[1] * np.exp(-kappa * d) * _INV_PI
        series = self._by_ratio(flat, s, energy,
                                lambda p: self._series_terms(p, s, energy), chunk)
        return (base + series).reshape(shape)

    def green_dphi(self, r, s, energy, chunk=512):
        """Derivative of :meth:`green` with respect to the polar angle of ``r``."""
        r = _points(r)
        s = as_point(s)
        kappa = _whisker_kappa(energy)
        shape = r.shape[:-1]
        flat = r.reshape(-1, 2)
        d = np.hypot(flat[:, 0] - s[0], flat[:, 1] - s[1])
        _coincidence_check(d)
        k1 = nm.bessel_ik_scaled(1.0, kappa * d)[1] * np.exp(-kappa * d)
        base = kappa * k1 * wedge(flat, s) / d * _INV_PI
        series = self._by_ratio(flat, s, energy,
                                lambda p: self._series_terms(p, s, energy, dphi=True),
                                chunk)
        return (base + series).reshape(shape)


# ---------------------------------------------------------------------------
# parabolic dot
# ---------------------------------------------------------------------------

def fock_darwin_level(m: int, n: int, config: SystemConfig) -> float:
    r"""Fock-Darwin level for confinement ``omega0^2 r^2 / 8``.

    .. math::
        E_{mn} = \omega\left(n + \frac{|m| + 1}{2}\right) - \sigma\,\frac{m\,\omega_c}{2},
        \qquad \omega = \sqrt{\omega_c^2 + \omega_0^2}

    For ``omega0 = 0`` this reduces to the Landau levels
    ``(n + (|m| - sigma m)/2 + 1/2) omega_c``.
    """
    if n < 0:
        raise DomainError("radial quantum number must be >= 0")
    sigma = config.sigma if config.b0 != 0 else 0
    return config.omega * (n + 0.5 * (abs(m) + 1)) - 0.5 * sigma * m * config.omega_c


def _dot_exponent(t, rho, omega, omega_c):
    """``z (cosh w t - cosh wc t)`` with ``z = w rho^2 / (2 sinh w t)``, stable.

    Uses ``cosh w t - cosh wc t = 2 sinh((w + wc) t / 2) sinh((w - wc) t / 2)``;
    with every hyperbolic function in ``expm1`` form there is no cancellation
    at small ``t`` and no overflow at large ``t``.
    """
    num = np.expm1(-(omega + omega_c) * t) * np.expm1(-(omega - omega_c) * t)
    return 0.5 * omega * rho * rho * num / (-np.expm1(-2 * omega * t))


def _check_dot(energy, config):
    if not config.omega0 > 0:
        raise DomainError("parabolic dot needs omega0 > 0")
    if not energy < 0.5 * config.omega:
        raise DomainError("dot quantities are implemented below the ground "
                          f"level omega/2 = {0.5 * config.omega}; got E = {energy}")


def _dot_integral(energy, rho, config, tol, power):
    omega, omega_c = config.omega, config.omega_c

    def integrand(t):
        ex = _dot_exponent(t, rho, omega, omega_c)
        # e^{2tE} / sinh(wt) combined so that neither factor overflows
        weight = 2 * np.exp((2 * energy - omega) * t) / (-np.expm1(-2 * omega * t))
        return (t ** power) * weight * np.expm1(-ex)

    # split at a few decay lengths of e^{-(omega - 2E) t}; the far part is a
    # slowly decaying exponential when E approaches omega/2
    split = 4.0 / (omega - 2 * energy)
    return (nm.integrate(integrand, 0.0, split, tol)
            + nm.integrate(integrand, split, math.inf, tol))


def dot_q(energy: float, rho: float, config: SystemConfig,
          tol: Tolerance = DEFAULT_TOL) -> float:
    r"""Krein function of the parabolic dot at distance ``rho`` from its centre.

    The uniform-field Green function at the hybrid frequency ``omega`` is
    subtracted under the heat-kernel integral and its Krein function is
    added back:

    .. math::
        Q(E;\rho) = \frac{\omega}{2\pi}\int_0^\infty e^{2tE}
            \left[e^{-\frac{\omega\rho^2}{2\sinh\omega t}
            (\cosh\omega t-\cosh\omega_c t)} - 1\right]\frac{dt}{\sinh\omega t}
            - \frac{1}{2\pi}\left[\psi\!\left(\tfrac12-\tfrac{E}{\omega}\right)
            + 2\gamma - \ln 2 - 2\ln a\right],\quad a = \omega^{-1/2}.

    Valid for ``E < omega/2`` (below the ground level).
    """
    _check_dot(energy, config)
    omega = config.omega
    integral = _dot_integral(energy, rho, config, tol, 0) if rho > 0 else 0.0
    landau_part = -(nm.digamma(0.5 - energy / omega) + 2 * nm.EULER_GAMMA
                    - math.log(2.0) + math.log(omega)) / (2 * math.pi)
    return omega / (2 * math.pi) * integral + landau_part


def dot_q_derivative(energy: float, rho: float, config: SystemConfig,
                     tol: Tolerance = DEFAULT_TOL) -> float:
    """Energy derivative of :func:`dot_q` (differentiated under the integral)."""
    _check_dot(energy, config)
    omega = config.omega
    integral = _dot_integral(energy, rho, config, tol, 1) if rho > 0 else 0.0
    return (omega / math.pi * integral
            + nm.trigamma(0.5 - energy / omega) / (2 * math.pi * omega))


class ParabolicDotBackground(Background):
    """Parabolic quantum dot ``omega0^2 r^2 / 8`` in a uniform field.

    ``omega0 -> 0`` reproduces :class:`LandauBackground`. Only the gap below
    the ground level is implemented (the heat-kernel integral diverges above).
    """

    def __init__(self, config: SystemConfig, tol: Tolerance = DEFAULT_TOL,
                 t_step: float = 0.05):
        if not config.omega0 > 0:
            raise DomainError("parabolic dot needs omega0 > 0")
        if config.eta != 0:
            raise DomainError("parabolic dot does not carry a flux line")
        self.config = config
        self.tol = tol
        self.t_step = t_step

    def __repr__(self):
        return f"ParabolicDotBackground({self.config!r})"

    def with_config(self, config):
        return ParabolicDotBackground(config, self.tol, self.t_step)

    def gap(self, k):
        if k != 0:
            raise DomainError("only the gap below the Fock-Darwin ground level "
                              "is implemented for the dot")
        return Gap(-math.inf, 0.5 * self.config.omega)

    def q_function(self, energy, rho):
        return dot_q(energy, rho, self.config, self.tol)

    def q_derivative(self, energy, rho):
        return dot_q_derivative(energy, rho, self.config, self.tol)

    def decay_radius(self, energy, rel=1e-13):
        kappa = math.sqrt(max(self.config.omega - 2 * energy, 1e-6))
        gauss = 2.0 * math.sqrt(2 * math.log(1.0 / rel) / self.config.omega)
        return min(0.5 * math.log(1.0 / rel) / kappa + 3.0 / kappa, gauss) + 1.0

    def _kernel(self, r, s, energy, dphi=False, chunk=512):
        cfg = self.config
        omega, omega_c, sigma = cfg.omega, cfg.omega_c, cfg.sigma
        r = _points(r)
        s = as_point(s)
        shape = r.shape[:-1]
        flat = r.reshape(-1, 2)
        d2 = (flat[:, 0] - s[0]) ** 2 + (flat[:, 1] - s[1]) ** 2
        _coincidence_check(d2)
        dot = flat @ s
        wdg = wedge(flat, s)
        t_lo = max(d2.min(), 1e-300) / 200.0
        t_hi = 46.0 / (omega - 2 * energy)
        u = np.arange(math.log(t_lo), math.log(t_hi) + self.t_step, self.t_step)
        t = np.exp(u)
        # hyperbolic ratios in decaying exponentials (no overflow at large t)
        one_m = -np.expm1(-2 * omega * t)
        e_minus = np.exp(-(omega - omega_c) * t)
        e_plus = np.exp(-(omega + omega_c) * t)
        coth = (2 - one_m) / one_m
        cross = (2 - one_m - e_minus - e_plus) / one_m
        twist = (e_minus - e_plus) / one_m
        measure = self.t_step * t * 2 * np.exp((2 * energy - omega) * t) / one_m
        out = np.empty(len(flat), dtype=complex)
        for start in range(0, len(flat), chunk):
            sl = slice(start, start + chunk)
            expo = (-0.25 * omega * (d2[sl, None] * coth[None, :]
                                     + 2 * dot[sl, None] * cross[None, :])
                    - 0.5j * sigma * omega * wdg[sl, None] * twist[None, :])
            w = np.exp(expo)
            if dphi:
                # d/dphi maps r.s -> r x s and r x s -> -(r.s); |r| is fixed
                w = w * (0.5 * omega * wdg[sl, None] * (coth - cross)[None, :]
                         + 0.5j * sigma * omega * dot[sl, None] * twist[None, :])
            out[sl] = w @ measure
        return (omega / (2 * math.pi) * out).reshape(shape)

    def green(self, r, s, energy):
        r"""Heat-kernel representation, trapezoid rule in ``ln t``.

        .. math::
            G = \frac{\omega}{2\pi}\int_0^\infty e^{2tE}\exp\Big\{-\frac{\omega}{4\sinh\omega t}
                \big[(r^2+r'^2)\cosh\omega t - 2 r\cdot r'\cosh\omega_c t
                + 2 i\sigma\, r\wedge r'\sinh\omega_c t\big]\Big\}\frac{dt}{\sinh\omega t}
        """
        _check_dot(energy, self.config)
        return self._kernel(r, s, energy)

    def green_dphi(self, r, s, energy):
        _check_dot(energy, self.config)
        return self._kernel(r, s, energy, dphi=True)

    def angular_momentum(self, energy, rho):
        r"""Partial-wave ``<L>`` of the bound state at distance ``rho``.

        Expanding the diagonal heat kernel in angular harmonics gives
        weights ``I_m(z) e^{sigma m omega_c t}``; summing ``m`` times the
        energy-differentiated weights in closed form leaves two
        one-dimensional integrals.
        """
        _check_dot(energy, self.config)
        cfg = self.config
        omega, omega_c = cfg.omega, cfg.omega_c

        def base(t):
            ex = _dot_exponent(t, rho, omega, omega_c)
            return t * 2 * np.exp((2 * energy - omega) * t - ex) / (-np.expm1(-2 * omega * t))

        def twist(t):
            e = np.exp(-(omega - omega_c) * t)
            return e * (-np.expm1(-2 * omega_c * t)) / (-np.expm1(-2 * omega * t))

        split = 4.0 / (omega - 2 * energy)

        def both(f):
            return (nm.integrate(f, 0.0, split, self.tol)
                    + nm.integrate(f, split, math.inf, self.tol))

        num = both(lambda t: base(t) * twist(t))
        den = both(base)
        return cfg.sigma * 0.5 * omega * rho * rho * num / den


# ---------------------------------------------------------------------------
# zero-range dot
# ---------------------------------------------------------------------------

class ZeroRangeDotBackground(Background):
    """Uniform field with a point dot of strength ``alpha0`` at the origin.

    Its Green function is the Krein-perturbed Landau one,
    ``G = G0(r, s) - G0(r, 0) G0(0, s) / (Q0 + alpha0)``.
    """

    def __init__(self, config: SystemConfig, alpha0: float,
                 tol: Tolerance = DEFAULT_TOL):
        if not math.isfinite(alpha0):
            raise DomainError("alpha0 must be finite")
        self.landau = LandauBackground(config, tol)
        self.config = config
        self.alpha0 = float(alpha0)
        self.tol = tol
        self._levels = {}

    def __repr__(self):
        return f"ZeroRangeDotBackground({self.config!r}, alpha0={self.alpha0})"

    def with_config(self, config):
        return ZeroRangeDotBackground(config, self.alpha0, self.tol)

    def dot_level(self, k):
        """Level of the dot alone (root of ``Q0 + alpha0``) in Landau gap ``k``."""
        if k not in self._levels:
            from .krein import _bracket_root
            gap = self.landau.gap(k)
            f = lambda e: landau_q(e, self.config) + self.alpha0  # noqa: E731
            self._levels[k] = _bracket_root(f, gap, self.tol)
        return self._levels[k]

    def gap(self, k):
        if k < 0:
            raise DomainError("gap index must be >= 0")
        ell, half = divmod(k, 2)
        if half == 0:
            lower = -math.inf if ell == 0 else self.landau.level(ell - 1)
            return Gap(lower, self.dot_level(ell))
        return Gap(self.dot_level(ell), self.landau.level(ell))

    def _denominator(self, energy):
        den = landau_q(energy, self.config) + self.alpha0
        if den == 0.0:
            raise PoleError(f"E = {energy} is a level of the dot")
        return den

    def g0_origin(self, energy, rho):
        """``G0(s, 0; E)`` -- real, depends on ``|s|`` only."""
        return float(landau_profile_exact(rho, energy, self.config))

    def g0_origin_derivative(self, energy, rho):
        """``d G0(s, 0; E) / dE``."""
        cfg = self.config
        a = _landau_a(energy, cfg.omega_c)
        x = rho * rho / (2 * cfg.a0 ** 2)
        if a > 0:
            dg = nm.gamma_tricomi_integral(a, x, deriv=True)
            return float(-dg * math.exp(-0.5 * x) / (2 * math.pi * cfg.omega_c))
        h = 1e-4 * cfg.omega_c
        return nm.central_difference(lambda e: self.g0_origin(e, rho), energy, h)

    def q_function(self, energy, rho):
        """``Q0(E) - G0(s, 0; E)^2 / (Q0(E) + alpha0)``."""
        if not rho > 0:
            raise DomainError("site must differ from the dot position")
        g = self.g0_origin(energy, rho)
        return landau_q(energy, self.config) - g * g / self._denominator(energy)

    def q_derivative(self, energy, rho):
        den = self._denominator(energy)
        q0p = landau_q_derivative(energy, self.config)
        g = self.g0_origin(energy, rho)
        gp = self.g0_origin_derivative(energy, rho)
        return q0p - (2 * g * gp * den - g * g * q0p) / (den * den)

    def berry_ratio(self, energy, rho):
        """``(dQ0/dE) / (dQ/dE)``, the factor multiplying ``pi xi0 rho`` in ``V_theta``."""
        return landau_q_derivative(energy, self.config) / self.q_derivative(energy, rho)

    def singular_points(self, site):
        return [as_point(site), np.zeros(2)]

    def decay_radius(self, energy, rel=1e-13):
        return self.landau.decay_radius(energy, rel)

    def green(self, r, s, energy):
        s = as_point(s)
        r = _points(r)
        rho = math.hypot(*s)
        coef = self.g0_origin(energy, rho) / self._denominator(energy)
        g_origin = self.landau.profile(energy).value(np.hypot(r[..., 0], r[..., 1]))
        return self.landau.green(r, s, energy) - coef * g_origin

    def green_dphi(self, r, s, energy):
        # G0(r, 0) depends on |r| only
        return self.landau.green_dphi(r, s, energy)
