"""Ambient geometry of H^n x R in the ball model and the family parameters.

Points of H^n are stored in ball coordinates ``x`` (``|x| < 1``); the
vertical coordinate ``t`` and all hyperbolic radii are geodesic lengths.
"""
from __future__ import annotations

import enum
import math
from typing import Optional
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

UNIT_TOL = 1e-12
BALL_EDGE = 1.0 - 1e-12


class Regime(str, enum.Enum):
    CYLINDER = "q=0"
    SUBCRITICAL = "0<q<1"
    SUPERCRITICAL = "q>=1"


@dataclass(frozen=True)
class FamilyParams:
    """Ambient dimension ``n``, curvature order ``r`` and ``q = (n-r-1)/(r+1)``."""

    n: int
    r: int
    q: float

    @property
    def q_exact(self) -> Fraction:
        return Fraction(self.n - self.r - 1, self.r + 1)

    @property
    def regime(self) -> Regime:
        q = self.q_exact
        if q == 0:
            return Regime.CYLINDER
        return Regime.SUBCRITICAL if q < 1 else Regime.SUPERCRITICAL

    @property
    def order(self) -> int:
        """Index ``r+1`` of the vanishing mean curvature ``H_{r+1}``."""
        return self.r + 1


def make_family(n: int, r: int) -> FamilyParams:
    if int(n) != n or int(r) != r:
        raise DomainError(f"n and r must be integers, got n={n!r}, r={r!r}")
    n, r = int(n), int(r)
    if n < 2:
        raise DomainError(f"n must satisfy n >= 2, got n={n}")
    if r < 0:
        raise DomainError(f"r must satisfy r >= 0, got r={r}")
    if r > n - 1:
        raise DomainError(f"r must satisfy r <= n-1 = {n - 1}, got r={r}")
    return FamilyParams(n=n, r=r, q=float(Fraction(n - r - 1, r + 1)))


def require_catenoid_regime(fp: FamilyParams) -> None:
    if fp.q <= 0:
        raise DomainError(
            f"(n={fp.n}, r={fp.r}) has q=0: the rotational r-minimal "
            "hypersurfaces are right cylinders, there is no catenoid family"
        )


@dataclass(frozen=True)
class AmbientPoint:
    x: np.ndarray
    t: float

    def __post_init__(self):
        if float(np.linalg.norm(self.x)) >= 1.0:
            raise DomainError("ball-model point must satisfy |x| < 1")


@dataclass(frozen=True)
class ProfilePoint:
    """One point ``(t, f(t), f'(t), f''(t))`` of a profile curve."""

    t: float
    f: float
    f_t: float
    f_tt: float

    def __post_init__(self):
        if not self.f > 0:
            raise DomainError(f"profile radius must be positive, got f={self.f}")


def _unit(zeta, tol: float = UNIT_TOL) -> np.ndarray:
    zeta = np.asarray(zeta, dtype=float)
    if zeta.ndim != 1:
        raise DomainError("zeta must be a vector")
    if abs(float(np.linalg.norm(zeta)) - 1.0) > tol:
        raise DomainError(f"zeta must be a unit vector (|zeta|={np.linalg.norm(zeta)!r})")
    return zeta


def metric_factor(x) -> float:
    """Conformal factor ``2/(1-|x|^2)`` of the ball metric.

    The metric itself is ``metric_factor(x)**2 * |dx|^2``.  Points with
    ``|x| > 1 - 1e-12`` are rejected.
    """
    x2 = float(np.dot(np.ravel(x), np.ravel(x)))
    if math.sqrt(x2) > BALL_EDGE:
        raise DomainError(f"|x| = {math.sqrt(x2)!r} is not inside the ball")
    return 2.0 / (1.0 - x2)


def ball_embed(rho: float, t: float, zeta) -> AmbientPoint:
    """Point at hyperbolic distance ``rho`` from the axis, direction ``zeta``, height ``t``."""
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    zeta = _unit(zeta)
    return AmbientPoint(x=math.tanh(0.5 * rho) * zeta, t=float(t))


def hyperbolic_radius(x) -> float:
    """Distance from the origin of the ball-model point ``x``."""
    return 2.0 * math.atanh(float(np.linalg.norm(x)))


def normal_vector(p: ProfilePoint, zeta) -> np.ndarray:
    """Unit normal of the rotational hypersurface at ``p`` in direction ``zeta``.

    Returned as an ``n+1`` vector: ``n`` ball-model horizontal components
    followed by the vertical component.  The horizontal part points towards
    the axis.
    """
    zeta = _unit(zeta)
    w = 1.0 / math.sqrt(1.0 + p.f_t * p.f_t) if math.isfinite(p.f_t) else 0.0
    horizontal = (-w / (2.0 * math.cosh(0.5 * p.f) ** 2)) * zeta
    vertical = w * p.f_t if math.isfinite(p.f_t) else math.copysign(1.0, p.f_t)
    return np.append(horizontal, vertical)


def product_norm(x, v, rho: Optional[float] = None) -> float:
    """Length of tangent vector ``v = (v_h, v_t)`` at ``(x, t)`` in ``g_H + dt^2``.

    Near the ideal boundary ``1 - |x|^2`` loses digits; passing the
    hyperbolic radius ``rho`` of ``x`` uses ``2 cosh^2(rho/2)`` instead.
    """
    v = np.asarray(v, dtype=float)
    lam = metric_factor(x) if rho is None else 2.0 * math.cosh(0.5 * rho) ** 2
    vh, vt = v[:-1], v[-1]
    return math.sqrt(lam * lam * float(np.dot(vh, vh)) + vt * vt)
