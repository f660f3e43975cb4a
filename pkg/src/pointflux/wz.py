r"""Wilczek-Zee holonomy of the degenerate lowest Landau level.

When a point interaction sits at ``s`` the lowest Landau level loses one
state; the remaining degenerate eigenspace ``L0(s)`` is spanned by the
magnetic translates

.. math::
    \psi_m(\cdot\,; s) = [s, 1]\,\Psi_m, \qquad m = 1, 2, \ldots,

of the normalised symmetric-gauge states ``Psi_m``; all of them vanish at
``s``. Moving ``s`` transports ``L0(s)`` with the matrix connection
``A_k = <psi_n | d_k psi_m>``; truncated to ``m, n <= N`` it is tridiagonal.
The curvature of this connection is concentrated in the ``m = 1`` state,
``Omega = 2 pi i xi0 e_11``: the lost state's flux is carried by ``m = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as _sla

from . import numerics as nm
from .model import LoopPath, SystemConfig, as_point, loop_area, wedge
from .numerics import DomainError

#: default truncation of the basis
DEFAULT_N = 24
UNITARITY_TOL = 1e-10


class QuadratureMismatchError(RuntimeError):
    """Analytic connection matrices disagree with direct quadrature."""


class NonUnitaryError(RuntimeError):
    """Accumulated Wilson loop drifted away from unitarity."""


def _check_config(config: SystemConfig):
    if config.b0 == 0:
        raise DomainError("the Landau level needs b0 != 0")
    if config.eta != 0 or config.omega0 != 0:
        raise DomainError("the Wilczek-Zee module treats the pure uniform field")


def lll_state(m: int, r, config: SystemConfig):
    r"""Normalised lowest-Landau-level state with angular momentum ``sigma m``.

    .. math::
        \Psi_m(r, \varphi) = \left(\frac{|\xi_0|}{2^m m!}\right)^{1/2}
            e^{i\sigma m\varphi} e^{-r^2/4a_0^2} (r/a_0)^m

    ``r`` is an array of planar points (shape ``(..., 2)``).
    """
    _check_config(config)
    if m < 0:
        raise DomainError("m must be >= 0")
    r = np.asarray(r, dtype=float)
    a0 = config.a0
    z = (r[..., 0] + 1j * config.sigma * r[..., 1]) / a0   # |z| = r/a0, arg = sigma phi
    log_norm = 0.5 * (math.log(abs(config.xi0)) - m * math.log(2.0) - math.lgamma(m + 1))
    rr = (r ** 2).sum(axis=-1)
    return math.exp(log_norm) * np.exp(-rr / (4 * a0 * a0)) * z ** m


def magnetic_translate(s, zeta: complex, f, config: SystemConfig):
    """``([s, zeta] f)(r) = zeta exp(-pi i xi0 r x s) f(r - s)`` as a new function."""
    s = as_point(s)
    if not math.isclose(abs(zeta), 1.0, rel_tol=1e-12):
        raise DomainError("zeta must be a unit complex number")
    xi0 = config.xi0

    def translated(r):
        r = np.asarray(r, dtype=float)
        return zeta * np.exp(-1j * math.pi * xi0 * wedge(r, s)) * f(r - s)

    return translated


def basis_state(m: int, s, config: SystemConfig):
    """``psi_m(.; s) = [s, 1] Psi_m`` as a function of planar points."""
    return magnetic_translate(s, 1.0, lambda r: lll_state(m, r, config), config)


@dataclass(frozen=True)
class WZConnection:
    """Connection matrices at ``site``; rows/columns are ``m = 1..N``."""

    site: np.ndarray
    a_x: np.ndarray
    a_y: np.ndarray

    def along(self, direction) -> np.ndarray:
        dx, dy = direction
        return self.a_x * dx + self.a_y * dy


def _ladder(n: int):
    """``L[n, n-1] = sqrt(n)`` in the basis ``m = 1..N`` (no ``m = 0`` row)."""
    m = np.arange(1, n + 1, dtype=float)
    low = np.zeros((n, n))
    low[np.arange(1, n), np.arange(0, n - 1)] = np.sqrt(m[1:])
    return low


def connection_matrices(s, n: int = DEFAULT_N, config: SystemConfig = None) -> WZConnection:
    r"""Analytic ``A_k = <psi_n | d/ds_k psi_m>`` for ``m, n = 1..N``.

    .. math::
        A_x = \pi i\xi_0 s_y + \frac{L - L^T}{\sqrt2 a_0}, \qquad
        A_y = -\pi i\xi_0 s_x - i\sigma\frac{L + L^T}{\sqrt2 a_0},

    with ``L[n, n-1] = sqrt(n)``; both are anti-Hermitian.
    """
    config = config or SystemConfig()
    _check_config(config)
    if n < 2:
        raise DomainError("truncation N must be >= 2")
    s = as_point(s)
    low = _ladder(n)
    c = 1.0 / (math.sqrt(2.0) * config.a0)
    eye = np.eye(n)
    a_x = 1j * math.pi * config.xi0 * s[1] * eye + c * (low - low.T)
    a_y = -1j * math.pi * config.xi0 * s[0] * eye - 1j * config.sigma * c * (low + low.T)
    return WZConnection(s, a_x.astype(complex), a_y.astype(complex))


def _gauss_polar(config, n_r=80, n_phi=64, extent=14.0):
    a0 = config.a0
    r, wr = nm.gauss_legendre(n_r, 0.0, extent * a0)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    pts = np.stack([np.outer(r, np.cos(phi)), np.outer(r, np.sin(phi))], axis=-1)
    w = np.outer(r * wr, np.full(n_phi, 2 * math.pi / n_phi))
    return pts.reshape(-1, 2), w.reshape(-1)


def connection_quadrature(s, n_max: int = 4, config: SystemConfig = None,
                          h: float = 1e-4):
    """``<psi_n | d_k psi_m>`` by planar quadrature and central differences in ``s``.

    Returns ``(a_x, a_y)`` for ``m, n = 1..n_max``; independent of the
    ladder algebra behind :func:`connection_matrices`.
    """
    config = config or SystemConfig()
    _check_config(config)
    s = as_point(s)
    pts, w = _gauss_polar(config)
    pts = pts + s
    h = h * config.a0
    idx = range(1, n_max + 1)
    psi = np.array([basis_state(m, s, config)(pts) for m in idx])
    out = []
    for e in (np.array([h, 0.0]), np.array([0.0, h])):
        plus = np.array([basis_state(m, s + e, config)(pts) for m in idx])
        minus = np.array([basis_state(m, s - e, config)(pts) for m in idx])
        plus2 = np.array([basis_state(m, s + e / 2, config)(pts) for m in idx])
        minus2 = np.array([basis_state(m, s - e / 2, config)(pts) for m in idx])
        d1 = (plus - minus) / (2 * h)
        d2 = (plus2 - minus2) / h
        deriv = (4 * d2 - d1) / 3
        out.append((np.conj(psi) * w) @ deriv.T)
    return out[0], out[1]


def check_connection(s, n: int = DEFAULT_N, config: SystemConfig = None,
                     n_check: int = 4, atol: float = 1e-6) -> WZConnection:
    """Analytic matrices, verified entrywise against quadrature for ``m, n <= n_check``.

    Raises
    ------
    QuadratureMismatchError
    """
    conn = connection_matrices(s, n, config)
    qx, qy = connection_quadrature(s, n_check, config)
    err = max(np.max(np.abs(conn.a_x[:n_check, :n_check] - qx)),
              np.max(np.abs(conn.a_y[:n_check, :n_check] - qy)))
    if err > atol:
        raise QuadratureMismatchError(f"connection matrices off by {err:.3e}")
    return conn


def curvature_matrix(n: int = DEFAULT_N, config: SystemConfig = None, s=(0.0, 0.0)):
    r"""``Omega_12 = d_x A_y - d_y A_x + [A_x, A_y]`` of the truncated connection.

    The ``s``-derivatives act on the scalar diagonal only
    (``d_x A_y - d_y A_x = -2 pi i xi0``). The interior entries equal
    ``2 pi i xi0 e_11``; the ``(N, N)`` entry carries the truncation
    artefact of the top index.
    """
    config = config or SystemConfig()
    conn = connection_matrices(s, n, config)
    d_omega = -2j * math.pi * config.xi0 * np.eye(n)
    return d_omega + conn.a_x @ conn.a_y - conn.a_y @ conn.a_x


def _loop_nodes(loop: LoopPath, n_steps: int) -> np.ndarray:
    """Closed sequence of points along the loop (polyline vertices always included)."""
    if loop.kind == "circle":
        pts = loop.points(n_steps)
        return np.vstack([pts, pts[:1]])
    verts = np.asarray(loop.vertices)
    closed = np.vstack([verts, verts[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    per = np.maximum(1, np.round(n_steps * seg / seg.sum()).astype(int))
    nodes = [closed[k] + np.outer(np.arange(per[k]) / per[k], closed[k + 1] - closed[k])
             for k in range(len(seg))]
    return np.vstack(nodes + [closed[:1]])


def wilson_loop(loop: LoopPath, n: int = DEFAULT_N, n_steps: int = 256,
                config: SystemConfig = None, check_unitary: bool = True) -> np.ndarray:
    r"""Path-ordered transport matrix of ``L0(s)`` around ``loop``.

    Solves ``dU/dt = -A(ds/dt) U`` with one exponential per segment,
    evaluated at the segment midpoint and multiplied on the left. On a
    straight segment the ``s``-dependence of ``A`` is a scalar, so the
    midpoint exponential is exact for polygons; curves converge at second
    order in ``n_steps``.

    Raises
    ------
    NonUnitaryError
    """
    config = config or SystemConfig()
    _check_config(config)
    nodes = _loop_nodes(loop, n_steps)
    u = np.eye(n, dtype=complex)
    base = connection_matrices((0.0, 0.0), n, config)
    ladder_x, ladder_y = base.a_x, base.a_y
    for p, q in zip(nodes[:-1], nodes[1:]):
        d = q - p
        mid = 0.5 * (p + q)
        scalar = 1j * math.pi * config.xi0 * (mid[1] * d[0] - mid[0] * d[1])
        gen = ladder_x * d[0] + ladder_y * d[1] + scalar * np.eye(n)
        u = _sla.expm(-gen) @ u
    if check_unitary:
        drift = np.max(np.abs(u.conj().T @ u - np.eye(n)))
        if drift > UNITARITY_TOL:
            raise NonUnitaryError(f"Wilson loop unitarity drift {drift:.3e}")
    return u


def small_loop_holonomy(area: float, n: int = DEFAULT_N,
                        config: SystemConfig = None) -> np.ndarray:
    r"""Leading-order holonomy of a small loop of signed area ``S``: ``exp(-Omega S)``.

    Only the ``(1, 1)`` entry is non-trivial, ``exp(-2 pi i xi0 S)``.
    """
    config = config or SystemConfig()
    omega = curvature_matrix(n, config)
    omega[n - 1, n - 1] = 0.0     # drop the truncation artefact of the top index
    return _sla.expm(-omega * area)


def interior_block(matrix: np.ndarray, margin: int = 2) -> np.ndarray:
    """Leading ``(N - margin)`` square block, away from the truncation edge."""
    n = matrix.shape[0]
    return matrix[: n - margin, : n - margin]


def wz_phase(loop: LoopPath, n: int = DEFAULT_N, n_steps: int = 256,
             config: SystemConfig = None) -> float:
    """``arg U_11`` of the Wilson loop."""
    u = wilson_loop(loop, n, n_steps, config)
    return float(np.angle(u[0, 0]))


def expected_phase(loop: LoopPath, config: SystemConfig) -> float:
    """``-2 pi xi0 S``, the small-loop phase of the ``m = 1`` state."""
    return -2 * math.pi * config.xi0 * loop_area(loop)
