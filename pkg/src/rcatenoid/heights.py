"""Heights of r-catenoid profiles: lambda(a, rho), L(a) and their a-derivatives.

All integrals over ``v in [1, V]`` are evaluated after the change of
variables ``v = sec(theta)**(1/q)``.  It maps ``[1, inf)`` onto
``[0, pi/2)`` and absorbs ``(v**(2q) - 1)**(-1/2) dv = v dtheta / q``, so
every integrand below is bounded and smooth in ``theta``.  Writing
``u = cos(theta)**(2/q) = v**(-2)`` and ``s = sinh(a)``::

    lambda(a, rho) = (1/q) int_0^theta_rho  s / sqrt(u + s^2)          dtheta
    dL/da          = (cosh a / q) int_0^{pi/2} u / (u + s^2)^{3/2}    dtheta

where ``cos(theta_rho)**(1/q) = sinh(a)/sinh(rho)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, QuadratureError
from .family import FamilyParams, require_catenoid_regime
from .integrate import gauss_kronrod

ARG_CAP = 100.0
HALF_PI = 0.5 * math.pi
LEMMA_BOUNDARY_GUARD = 1e-10


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances for the height integrals.

    ``tail_cut`` is ``None`` for the exact compactified range.  A finite
    value ``V`` truncates ``v`` at ``V`` and adds the tail bound
    ``sqrt(2) V**(-q) / q`` to the reported error.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_cut: Optional[float] = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.tail_cut is not None and not self.tail_cut > 1:
            raise DomainError("tail_cut must exceed 1")


DEFAULT_QUADRATURE = QuadratureSettings()


@dataclass(frozen=True)
class HeightValue:
    value: float
    error_estimate: float

    def __float__(self):
        return self.value


def _check_arg(name, x, allow_inf=False):
    if not x > 0:
        raise DomainError(f"{name} must be positive, got {x}")
    if x > ARG_CAP and not (allow_inf and math.isinf(x)):
        raise DomainError(f"{name}={x} exceeds the supported cap {ARG_CAP} (sinh/cosh overflow guard)")


def log_sinh(x: float) -> float:
    if x > 20.0:
        return x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x))
    return math.log(math.sinh(x))


def angle_of(fp: FamilyParams, a: float, rho: float) -> float:
    """Angle ``theta`` in ``[0, pi/2]`` corresponding to radius ``rho`` on the profile with neck ``a``."""
    if math.isinf(rho):
        return HALF_PI
    x = 2.0 * fp.q * (log_sinh(rho) - log_sinh(a))
    if x <= 0.0:
        return 0.0
    return math.atan2(math.sqrt(-math.expm1(-x)), math.exp(-0.5 * x))


def radius_of_angle(fp: FamilyParams, a: float, theta: float) -> float:
    """Inverse of :func:`angle_of`."""
    if theta >= HALF_PI:
        return math.inf
    if theta <= 0.0:
        return a
    log_sinh_rho = log_sinh(a) - math.log(math.cos(theta)) / fp.q
    if log_sinh_rho > 20.0:
        # asinh(z) = log z + log(1 + sqrt(1 + z^-2)) without forming z
        y = math.exp(-2.0 * log_sinh_rho)
        return log_sinh_rho + math.log1p(math.sqrt(1.0 + y))
    return math.asinh(math.exp(log_sinh_rho))


def angle_of_v(fp: FamilyParams, v: float) -> float:
    """Angle for the raw integration variable ``v = sinh(rho)/sinh(a)``."""
    return math.acos(v ** (-fp.q))


def _u(theta, q):
    return np.cos(theta) ** (2.0 / q)


def _height_integrand(q, s):
    s2 = s * s

    def f(theta):
        return s / np.sqrt(_u(theta, q) + s2)
    return f


def _slope_integrand(q, s):
    s2 = s * s

    def f(theta):
        u = _u(theta, q)
        return u / (u + s2) ** 1.5
    return f


def _curvature_integrand(q, s, ch):
    s2 = s * s
    c = 1.0 + 2.0 * ch * ch

    def f(theta):
        u = _u(theta, q)
        return u * (u - c) / (u + s2) ** 2.5
    return f


def _integrate(func, lo, hi, settings, what):
    try:
        return gauss_kronrod(func, lo, hi, rel_tol=settings.rel_tol,
                             abs_tol=settings.abs_tol,
                             max_subdivisions=settings.max_subdivisions)
    except QuadratureError as exc:
        raise QuadratureError(f"{what}: {exc}", exc.value, exc.error_estimate) from None


def _upper_angle(fp, a, rho, settings):
    """Integration limit in theta plus the truncation bound it implies."""
    theta = angle_of(fp, a, rho)
    if settings.tail_cut is None:
        return theta, 0.0
    v_max = settings.tail_cut
    theta_cut = angle_of_v(fp, v_max)
    if theta <= theta_cut:
        return theta, 0.0
    if v_max < 2.0 ** (1.0 / (2.0 * fp.q)):
        raise DomainError(f"tail_cut {v_max} is below 2**(1/(2q)); the tail bound does not apply")
    return theta_cut, tail_bound(fp, v_max)


def tail_bound(fp: FamilyParams, v_max: float) -> float:
    """Upper bound ``sqrt(2) V**(-q) / q`` on the height integrand's tail beyond ``v = V``."""
    return math.sqrt(2.0) * v_max ** (-fp.q) / fp.q


def height_at_angle(fp: FamilyParams, a: float, theta: float,
                    settings: QuadratureSettings = DEFAULT_QUADRATURE) -> HeightValue:
    """``lambda`` expressed through the compactified upper limit ``theta``."""
    q = fp.q
    val, err = _integrate(_height_integrand(q, math.sinh(a)), 0.0, theta, settings, "lambda")
    return HeightValue(val / q, err / q)


def lambda_height(fp: FamilyParams, a: float, rho: float,
                  settings: QuadratureSettings = DEFAULT_QUADRATURE) -> HeightValue:
    """Height ``t`` at which the catenoid with neck ``a`` reaches radius ``rho``."""
    require_catenoid_regime(fp)
    _check_arg("a", a)
    _check_arg("rho", rho, allow_inf=True)
    if rho < a:
        raise DomainError(f"rho={rho} is below the neck radius a={a}")
    if rho == a:
        return HeightValue(0.0, 0.0)
    theta, tail = _upper_angle(fp, a, rho, settings)
    h = height_at_angle(fp, a, theta, settings)
    return HeightValue(h.value, h.error_estimate + tail)


def half_height(fp: FamilyParams, a: float,
                settings: QuadratureSettings = DEFAULT_QUADRATURE) -> HeightValue:
    """``L(a)``: the catenoid with neck ``a`` fills the slab ``|t| < L(a)``."""
    return lambda_height(fp, a, math.inf, settings)


def height_tail(fp: FamilyParams, a: float, rho: float,
                settings: QuadratureSettings = DEFAULT_QUADRATURE) -> HeightValue:
    """``L(a) - lambda(a, rho)`` integrated directly over ``[theta_rho, pi/2]``."""
    require_catenoid_regime(fp)
    _check_arg("a", a)
    if rho < a:
        raise DomainError(f"rho={rho} is below the neck radius a={a}")
    theta = angle_of(fp, a, rho)
    q = fp.q
    val, err = _integrate(_height_integrand(q, math.sinh(a)), theta, HALF_PI, settings, "height tail")
    return HeightValue(val / q, err / q)


def height_limit(fp: FamilyParams) -> float:
    """``lim_{a -> inf} L(a) = pi (r+1) / (2 (n-r-1))``."""
    require_catenoid_regime(fp)
    return math.pi * (fp.r + 1) / (2.0 * (fp.n - fp.r - 1))


def half_height_derivative(fp: FamilyParams, a: float,
                           settings: QuadratureSettings = DEFAULT_QUADRATURE) -> HeightValue:
    require_catenoid_regime(fp)
    _check_arg("a", a)
    q = fp.q
    theta, tail = _upper_angle(fp, a, math.inf, settings)
    val, err = _integrate(_slope_integrand(q, math.sinh(a)), 0.0, theta, settings, "dL/da")
    scale = math.cosh(a) / q
    # beyond the cut the slope integrand is the height integrand times 1/(s (1 + v^2 s^2)) <= 1/(s cosh^2 a)
    tail_err = tail * math.cosh(a) / (math.sinh(a) * math.cosh(a) ** 2) if tail else 0.0
    return HeightValue(scale * val, scale * err + tail_err)


def lambda_rho(fp: FamilyParams, a: float, rho: float) -> float:
    """Partial derivative of ``lambda`` in ``rho`` (inverse slope of the profile)."""
    x = 2.0 * fp.q * (log_sinh(rho) - log_sinh(a))
    return 1.0 / math.sqrt(math.expm1(x))


def _lemma_prelude(fp, a, rho):
    require_catenoid_regime(fp)
    _check_arg("a", a)
    _check_arg("rho", rho)
    if not rho > a:
        raise DomainError(f"lambda derivatives need rho > a (got a={a}, rho={rho})")
    w_minus_1 = math.expm1(2.0 * fp.q * (log_sinh(rho) - log_sinh(a)))
    if w_minus_1 < LEMMA_BOUNDARY_GUARD:
        raise DomainError(
            f"(sinh rho / sinh a)^(2q) - 1 = {w_minus_1:.3e} < {LEMMA_BOUNDARY_GUARD}: "
            "boundary term too close to its singularity")
    return w_minus_1


def lambda_a(fp: FamilyParams, a: float, rho: float,
             settings: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """First derivative of ``lambda(a, rho)`` in ``a`` at fixed ``rho``."""
    w1 = _lemma_prelude(fp, a, rho)
    q = fp.q
    boundary = -math.tanh(rho) / math.tanh(a) / math.sqrt(w1)
    theta = angle_of(fp, a, rho)
    val, _ = _integrate(_slope_integrand(q, math.sinh(a)), 0.0, theta, settings, "lambda_a")
    return boundary + math.cosh(a) / q * val


def lambda_aa(fp: FamilyParams, a: float, rho: float,
              settings: QuadratureSettings = DEFAULT_QUADRATURE) -> float:
    """Second derivative of ``lambda(a, rho)`` in ``a`` at fixed ``rho``.

    The integral term carries the factor ``1 - v^2 - 2 v^2 cosh^2(a)``.
    """
    w1 = _lemma_prelude(fp, a, rho)
    q = fp.q
    s, ch = math.sinh(a), math.cosh(a)
    w = 1.0 + w1
    ratio = (ch / math.cosh(rho)) ** 2
    bracket = w * (1.0 - q * ch * ch - ratio) + (ratio - 1.0)
    boundary = math.tanh(rho) / (s * s) * w1 ** -1.5 * bracket
    theta = angle_of(fp, a, rho)
    val, _ = _integrate(_curvature_integrand(q, s, ch), 0.0, theta, settings, "lambda_aa")
    return boundary + s / q * val


def _deficit_integrand(q, s):
    s2 = s * s

    def f(theta):
        root = np.sqrt(_u(theta, q) + s2)
        return _u(theta, q) / (root * (root + s))
    return f


def height_deficit(fp: FamilyParams, a: float,
                   settings: QuadratureSettings = DEFAULT_QUADRATURE) -> HeightValue:
    """``pi/(2q) - L(a)`` integrated directly, accurate even when ``L(a)`` is at its limit."""
    require_catenoid_regime(fp)
    _check_arg("a", a)
    q = fp.q
    val, err = _integrate(_deficit_integrand(q, math.sinh(a)), 0.0, HALF_PI, settings, "height deficit")
    return HeightValue(val / q, err / q)
