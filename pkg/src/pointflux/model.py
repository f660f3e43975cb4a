"""Units, system configuration, point perturbations, gaps and loops.

Units are fixed once and for all: hbar = m_* = c = |e| = 1. In these units
the flux quantum is ``2*pi``, the cyclotron frequency is ``|b0|`` and the
magnetic length is ``|b0|**-0.5``.
"""
from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import DomainError

FLUX_QUANTUM = 2.0 * math.pi


@dataclass(frozen=True)
class SystemConfig:
    """Dimensionless physical setup.

    Attributes
    ----------
    charge_sign : int
        Sign of the particle charge, +1 or -1.
    b0 : float
        Uniform field component.
    eta : float
        Aharonov-Bohm flux through the origin, in flux quanta.
    omega0 : float
        Parabolic confinement frequency (hybrid frequency
        ``sqrt(omega_c**2 + omega0**2)``).
    """

    charge_sign: int = 1
    b0: float = 1.0
    eta: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        if self.charge_sign not in (1, -1):
            raise DomainError(f"charge_sign must be +1 or -1, got {self.charge_sign}")
        if not self.omega0 >= 0:
            raise DomainError(f"omega0 must be >= 0, got {self.omega0}")
        for name in ("b0", "eta", "omega0"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def omega_c(self) -> float:
        return abs(self.b0)

    @property
    def xi0(self) -> float:
        """Signed flux density of the uniform component, quanta per area."""
        return self.charge_sign * self.b0 / FLUX_QUANTUM

    @property
    def sigma(self) -> int:
        return 1 if self.xi0 >= 0 else -1

    @property
    def a0(self) -> float:
        if self.xi0 == 0:
            raise DomainError("magnetic length undefined for b0 = 0")
        return (2.0 * math.pi * abs(self.xi0)) ** -0.5

    @property
    def omega(self) -> float:
        return math.hypot(self.omega_c, self.omega0)

    @classmethod
    def from_xi0(cls, xi0, charge_sign=1, eta=0.0, omega0=0.0):
        return cls(charge_sign=charge_sign, b0=charge_sign * FLUX_QUANTUM * xi0,
                   eta=eta, omega0=omega0)

    def with_xi0(self, xi0) -> "SystemConfig":
        return SystemConfig.from_xi0(xi0, self.charge_sign, self.eta, self.omega0)


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,):
        raise DomainError(f"a point in the plane needs two coordinates, got {p!r}")
    return arr


def polar_point(rho, theta) -> np.ndarray:
    return np.array([rho * math.cos(theta), rho * math.sin(theta)])


def wedge(r, s):
    """``r x s`` (z component); broadcasts over leading axes of ``r``."""
    r = np.asarray(r)
    s = np.asarray(s)
    return r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]


@dataclass(frozen=True)
class PointPerturbation:
    """Point interaction of strength ``alpha`` sitting at ``site``."""

    alpha: float
    site: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "site", as_point(self.site))
        if not math.isfinite(self.alpha):
            raise DomainError("alpha must be finite")

    @classmethod
    def polar(cls, alpha, rho, theta=0.0):
        return cls(alpha, polar_point(rho, theta))

    @classmethod
    def from_scattering_length(cls, lam, site=(0.0, 0.0)):
        return cls(alpha_from_lambda(lam), site)

    @property
    def rho(self) -> float:
        return float(math.hypot(*self.site))

    @property
    def theta(self) -> float:
        return float(math.atan2(self.site[1], self.site[0]))

    def moved(self, site) -> "PointPerturbation":
        return PointPerturbation(self.alpha, site)


def alpha_from_lambda(lam: float) -> float:
    """Extension parameter from the scattering length, ``ln(1/lam)/pi``."""
    if not lam > 0:
        raise DomainError(f"scattering length must be positive, got {lam}")
    return math.log(1.0 / lam) / math.pi


def lambda_from_alpha(alpha: float) -> float:
    return math.exp(-math.pi * alpha)


@dataclass(frozen=True)
class Gap:
    """Open energy interval in the resolvent set of the unperturbed operator."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise DomainError(f"empty gap ({self.lower}, {self.upper})")

    @property
    def semi_infinite(self) -> bool:
        return self.lower == -math.inf

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, energy) -> bool:
        return self.lower < energy < self.upper


@dataclass(frozen=True)
class LoopPath:
    """Oriented closed curve in the plane.

    ``kind`` is ``"circle"`` (``center``, ``radius``, ``orientation`` +1 for
    counterclockwise) or ``"polyline"`` (``vertices``, closed implicitly or
    explicitly). ``n_points`` is the default number of sites used when the
    loop is discretised.
    """

    kind: str
    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    orientation: int = 1
    vertices: tuple = ()
    n_points: int = 200

    def __post_init__(self):
        if self.kind not in ("circle", "polyline"):
            raise DomainError(f"unknown loop kind {self.kind!r}")
        if self.n_points < 3:
            raise DomainError("a loop needs at least 3 points")
        if self.kind == "circle":
            if not self.radius > 0:
                raise DomainError("circle radius must be positive")
            if self.orientation not in (1, -1):
                raise DomainError("orientation must be +1 or -1")
        else:
            verts = np.asarray(self.vertices, dtype=float)
            if verts.ndim != 2 or verts.shape[1] != 2:
                raise DomainError("polyline vertices must be an (n, 2) array")
            if len(verts) > 1 and np.allclose(verts[0], verts[-1]):
                verts = verts[:-1]
            if len(np.unique(verts.round(14), axis=0)) < 3:
                raise DomainError("degenerate loop: fewer than 3 distinct points")
            object.__setattr__(self, "vertices", tuple(map(tuple, verts)))

    @classmethod
    def circle(cls, radius, center=(0.0, 0.0), orientation=1, n_points=200):
        return cls("circle", center=tuple(center), radius=radius,
                   orientation=orientation, n_points=n_points)

    @classmethod
    def polyline(cls, vertices, n_points=200):
        return cls("polyline", vertices=tuple(map(tuple, vertices)), n_points=n_points)

    @classmethod
    def square(cls, side, center=(0.0, 0.0), n_points=200, orientation=1):
        h = side / 2
        cx, cy = center
        verts = [(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)]
        if orientation < 0:
            verts = verts[::-1]
        return cls.polyline(verts, n_points=n_points)

    def reversed(self) -> "LoopPath":
        if self.kind == "circle":
            return LoopPath.circle(self.radius, self.center, -self.orientation,
                                   self.n_points)
        return LoopPath.polyline(self.vertices[::-1], self.n_points)

    def points(self, n=None) -> np.ndarray:
        """``n`` sites along the loop (first point not repeated at the end)."""
        n = self.n_points if n is None else int(n)
        if n < 3:
            raise DomainError("need at least 3 sites")
        if self.kind == "circle":
            t = self.orientation * 2 * math.pi * np.arange(n) / n
            c = np.asarray(self.center, dtype=float)
            return c + self.radius * np.stack([np.cos(t), np.sin(t)], axis=1)
        verts = np.asarray(self.vertices)
        closed = np.vstack([verts, verts[:1]])
        seg = np.diff(closed, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        arc = cum[-1] * np.arange(n) / n
        idx = np.clip(np.searchsorted(cum, arc, side="right") - 1, 0, len(seg) - 1)
        frac = (arc - cum[idx]) / lengths[idx]
        return closed[idx] + frac[:, None] * seg[idx]

    def winding_number(self, point=(0.0, 0.0)) -> int:
        p = as_point(point)
        if self.kind == "circle":
            d = math.hypot(*(np.asarray(self.center) - p))
            if abs(d - self.radius) < 1e-12:
                raise DomainError("loop passes through the point")
            return self.orientation if d < self.radius else 0
        verts = np.asarray(self.vertices) - p
        closed = np.vstack([verts, verts[:1]])
        if np.min(_segment_distance(closed)) < 1e-12:
            raise DomainError("loop passes through the point")
        ang = np.arctan2(closed[:, 1], closed[:, 0])
        dang = np.diff(ang)
        dang = (dang + math.pi) % (2 * math.pi) - math.pi
        return int(round(dang.sum() / (2 * math.pi)))


def _segment_distance(closed):
    a, b = closed[:-1], closed[1:]
    d = b - a
    t = np.clip(-(a * d).sum(1) / np.maximum((d * d).sum(1), 1e-300), 0, 1)
    q = a + t[:, None] * d
    return np.hypot(q[:, 0], q[:, 1])


def shoelace_area(points) -> float:
    """Signed area of a closed polygon (counterclockwise positive)."""
    p = np.asarray(points, dtype=float)
    return 0.5 * float(np.sum(p[:, 0] * np.roll(p[:, 1], -1) - np.roll(p[:, 0], -1) * p[:, 1]))


def loop_area(loop: LoopPath) -> float:
    """Signed enclosed area; exact for circles, shoelace for polylines."""
    if loop.kind == "circle":
        return loop.orientation * math.pi * loop.radius ** 2
    return shoelace_area(loop.vertices)


def flux_through_loop(config: SystemConfig, loop: LoopPath) -> float:
    """Total flux through the loop in units of the flux quantum."""
    flux = config.xi0 * loop_area(loop)
    if config.eta != 0.0:
        flux += config.eta * loop.winding_number((0.0, 0.0))
    return flux


class Background(abc.ABC):
    """A rotationally symmetric unperturbed Hamiltonian.

    Concrete systems supply the Krein Q-function, its energy derivative,
    the Green function and the gap structure. ``green`` is vectorised over
    the first argument (shape ``(..., 2)``).
    """

    config: SystemConfig
    #: True when a puncture at the origin forbids perturbation sites there
    singular_origin = False

    @abc.abstractmethod
    def q_function(self, energy: float, rho: float) -> float:
        ...

    @abc.abstractmethod
    def q_derivative(self, energy: float, rho: float) -> float:
        ...

    @abc.abstractmethod
    def green(self, r, s, energy: float):
        ...

    @abc.abstractmethod
    def gap(self, k: int) -> Gap:
        ...

    def azimuthal_potential(self, r):
        """Non-uniform part of the vector potential, azimuthal component."""
        return np.zeros_like(np.asarray(r, dtype=float))

    def decay_radius(self, energy: float, rel: float = 1e-13) -> float:
        """Distance from the site beyond which |G|^2 is below ``rel`` of its bulk."""
        kappa = math.sqrt(max(-2.0 * energy, 1e-6))
        return 0.5 * math.log(1.0 / rel) / kappa + 2.0

    def with_config(self, config: SystemConfig) -> "Background":
        raise NotImplementedError(f"{type(self).__name__} cannot be re-parametrised")

    def singular_points(self, site) -> list:
        """Points where the Green function ``G(., site)`` is singular."""
        return [as_point(site)]
