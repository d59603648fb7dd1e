"""Structure of the catenoid family: radius-at-height, envelope, boundary-value counts.

``phi(fp, t0, a)`` is the radius at height ``t0`` of the catenoid with neck
``a``.  For ``t0`` below the threshold ``T`` it is unimodal in ``a``; its
minimum traces the envelope of the family, and comparing a prescribed
radius ``R`` with that minimum decides how many catenoids span two
coaxial spheres of radius ``R`` at heights ``+-t0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .family import FamilyParams, Regime, require_catenoid_regime
from .heights import (ARG_CAP, HALF_PI, QuadratureSettings, half_height, height_at_angle,
                      height_limit, lambda_a, lambda_height, lambda_rho, radius_of_angle)
from .search import find_root, golden_section

# tighter than the height defaults: finite differences and flat minima need it
ANALYSIS_QUADRATURE = QuadratureSettings(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=400)
TIE_TOL = 1e-6
TANGENCY_TOL = 1e-5
UNVALIDATED = "unvalidated-regime"
OUTSIDE_DOMAIN = "outside-validated-domain"


class OutOfReach(DomainError):
    """The catenoid never reaches the requested height (``L(a) <= t0``)."""

    def __init__(self, message, half_height):
        super().__init__(message)
        self.half_height = half_height


def phi(fp: FamilyParams, t0: float, a: float,
        settings: QuadratureSettings = ANALYSIS_QUADRATURE) -> float:
    """Radius ``f(a, t0)``: the unique ``rho`` with ``lambda(a, rho) = t0``."""
    require_catenoid_regime(fp)
    if not a > 0:
        raise DomainError(f"neck radius must be positive, got a={a}")
    if t0 < 0:
        t0 = -t0
    if t0 == 0:
        return a
    big_l = half_height(fp, a, settings).value
    if big_l <= t0:
        raise OutOfReach(f"L(a={a}) = {big_l!r} <= t0 = {t0}: the catenoid never reaches t0", big_l)
    # solve in the compactified angle, where the height is smooth with slope in [tanh(a)/q, 1/q]
    theta = find_root(lambda th: height_at_angle(fp, a, th, settings).value - t0,
                      0.0, HALF_PI, xtol=1e-15, flo=-t0, fhi=big_l - t0)
    return radius_of_angle(fp, a, theta)


def phi_or_inf(fp, t0, a, settings=ANALYSIS_QUADRATURE):
    """:func:`phi`, with ``inf`` where the catenoid misses ``t0`` or exceeds the radius cap."""
    try:
        rho = phi(fp, t0, a, settings)
    except OutOfReach:
        return math.inf
    return rho if rho <= ARG_CAP else math.inf


def alpha_of(fp: FamilyParams, t0: float,
             settings: QuadratureSettings = ANALYSIS_QUADRATURE) -> float:
    """Neck radius whose catenoid has half-height exactly ``t0``."""
    require_catenoid_regime(fp)
    limit = height_limit(fp)
    if not 0 < t0 < limit:
        raise DomainError(f"t0 must lie in (0, {limit!r}), got {t0}")

    def g(a):
        return half_height(fp, a, settings).value - t0

    lo, hi = 1e-3, 1.0
    g_lo = g(lo)
    while g_lo >= 0:
        lo *= 1e-3
        if lo < 1e-300:
            raise DomainError(f"no neck radius found for t0={t0}")
        g_lo = g(lo)
    g_hi = g(hi)
    while g_hi <= 0:
        hi = min(2.0 * hi, ARG_CAP)
        g_hi = g(hi)
        if g_hi <= 0 and hi == ARG_CAP:
            raise DomainError(f"t0={t0} is too close to the height limit {limit!r} to resolve")
    return find_root(g, lo, hi, flo=g_lo, fhi=g_hi)


def neck_threshold_M(fp: FamilyParams) -> float:
    """``arcosh(sqrt(1/(1-q)))``, the radius bound of the concavity lemma when ``q < 1``."""
    require_catenoid_regime(fp)
    if fp.q >= 1:
        raise DomainError("M is only defined for q < 1; for q >= 1 every radius is admissible")
    return math.acosh(math.sqrt(1.0 / (1.0 - fp.q)))


def _gamma_peak(fp, rho, settings):
    """Maximiser of ``a -> lambda(a, rho)`` on ``(0, rho)`` and the maximum."""
    eps = 1e-9 * rho
    a_best, neg, (lo, hi) = golden_section(lambda a: -lambda_height(fp, a, rho, settings).value,
                                           eps, rho - eps, rel_tol=1e-8)
    # polish on the sign change of the first derivative
    lo, hi = max(lo * 0.999, eps), min(hi * 1.001, rho * (1 - 1e-6))
    try:
        fl, fh = lambda_a(fp, lo, rho, settings), lambda_a(fp, hi, rho, settings)
        if fl > 0 > fh:
            a_best = find_root(lambda a: lambda_a(fp, a, rho, settings), lo, hi, flo=fl, fhi=fh)
    except DomainError:
        pass
    return a_best, lambda_height(fp, a_best, rho, settings).value


def gamma_peak(fp: FamilyParams, rho: float,
               settings: QuadratureSettings = ANALYSIS_QUADRATURE) -> Tuple[float, float]:
    """``(A, lambda(A, rho))`` with ``A`` maximising ``lambda(., rho)`` over ``(0, rho)``."""
    require_catenoid_regime(fp)
    if not 0 < rho <= ARG_CAP:
        raise DomainError(f"rho must lie in (0, {ARG_CAP}], got {rho}")
    return _gamma_peak(fp, rho, settings)


def height_threshold_T(fp: FamilyParams,
                       settings: QuadratureSettings = ANALYSIS_QUADRATURE) -> float:
    """Heights below ``T`` have a unique radius-minimising catenoid."""
    require_catenoid_regime(fp)
    if fp.regime is Regime.SUPERCRITICAL:
        return height_limit(fp)
    return gamma_peak(fp, neck_threshold_M(fp), settings)[1]


def in_J_q(fp: FamilyParams, R: float) -> bool:
    return fp.q >= 1 or R <= neck_threshold_M(fp)


@dataclass(frozen=True)
class EnvelopePoint:
    t: float
    m: float
    a_star: float
    validated: bool = True
    tangency_residual: float = math.nan
    status: str = "ok"

    def __iter__(self):
        return iter((self.m, self.a_star))


def _bracket_minimum(fp, t0, alpha, settings):
    """Walk a geometric grid upwards from ``alpha`` until ``phi`` turns up.

    Returns ``(lo, hi, samples)``; ``samples`` holds the visited ``(a, phi)`` pairs.
    """
    samples = []
    a = alpha * (1.0 + 1e-3)
    ratio = 1.25
    while True:
        samples.append((a, phi_or_inf(fp, t0, a, settings)))
        if len(samples) >= 2 and math.isfinite(samples[-2][1]) and samples[-1][1] > samples[-2][1]:
            lo = samples[-3][0] if len(samples) >= 3 else alpha
            return lo, samples[-1][0], samples
        if a > ARG_CAP:
            raise DomainError(f"phi^{t0} did not turn upwards below a={ARG_CAP}")
        a *= ratio


def _is_unimodal(values: Sequence[float]) -> bool:
    v = [x for x in values if math.isfinite(x)]
    i = int(np.argmin(v))
    return all(x > y for x, y in zip(v[:i], v[1:i + 1])) and all(x < y for x, y in zip(v[i:], v[i + 1:]))


def envelope_min(fp: FamilyParams, t0: float, settings: QuadratureSettings = ANALYSIS_QUADRATURE,
                 allow_unvalidated: bool = False) -> EnvelopePoint:
    """Minimum ``m0`` of ``phi^{t0}`` over neck radii and its minimiser ``a0``.

    Uniqueness of the minimiser is only established for ``t0 < T``.  Past
    ``T`` (possible when ``q < 1``) the call is refused unless
    ``allow_unvalidated`` is set, in which case the answer comes from a
    dense scan and is flagged.
    """
    require_catenoid_regime(fp)
    limit = height_limit(fp)
    if not 0 < t0 < limit:
        raise DomainError(f"t0 must lie in (0, {limit!r}), got {t0}")
    validated = True
    if fp.regime is Regime.SUBCRITICAL:
        big_t = height_threshold_T(fp, settings)
        if t0 >= big_t:
            if not allow_unvalidated:
                raise DomainError(
                    f"t0={t0} >= T={big_t!r}: uniqueness of the minimising catenoid is an open "
                    "question for q < 1 at these heights; pass allow_unvalidated=True for a scan")
            validated = False
    alpha = alpha_of(fp, t0, settings)
    lo, hi, samples = _bracket_minimum(fp, t0, alpha, settings)
    status = "ok" if validated else UNVALIDATED
    if not _is_unimodal([v for _, v in samples]) or not validated:
        a_star, m = _dense_min(fp, t0, alpha, hi, settings)
        if validated:
            status = "fallback-scan: unimodality check failed on the bracketing grid"
        return EnvelopePoint(t0, m, a_star, validated=validated, status=status)
    a_star, m, (glo, ghi) = golden_section(lambda a: phi_or_inf(fp, t0, a, settings), lo, hi, rel_tol=1e-9)
    # d phi/da = -lambda_a / lambda_rho, so the minimiser is the sign change of lambda_a(a, phi(a))
    def slope_sign(a):
        return lambda_a(fp, a, phi(fp, t0, a, settings), settings)
    width = ghi - glo
    p_lo, p_hi = glo - width, ghi + width
    try:
        s_lo, s_hi = slope_sign(p_lo), slope_sign(p_hi)
        if s_lo > 0 > s_hi:
            a_star = find_root(slope_sign, p_lo, p_hi, flo=s_lo, fhi=s_hi)
            m = phi(fp, t0, a_star, settings)
    except DomainError:
        pass
    return EnvelopePoint(t0, m, a_star, validated=True, status=status)


def _dense_min(fp, t0, alpha, a_hi, settings, count=400):
    grid = np.geomspace(alpha * (1 + 1e-6), a_hi, count)
    vals = np.array([phi_or_inf(fp, t0, a, settings) for a in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, count - 1)]
    a_star, m, _ = golden_section(lambda a: phi_or_inf(fp, t0, a, settings), lo, hi, rel_tol=1e-9)
    return a_star, m


def phi_slope(fp: FamilyParams, t0: float, a: float,
              settings: QuadratureSettings = ANALYSIS_QUADRATURE) -> float:
    """``d phi^{t0} / da`` from the implicit-function identity ``-lambda_a / lambda_rho``."""
    rho = phi(fp, t0, a, settings)
    return -lambda_a(fp, a, rho, settings) / lambda_rho(fp, a, rho)


@dataclass
class BvpResult:
    t0: float
    R: float
    count: int
    roots: List[float]
    m0: float
    a0: float
    validated: bool = True
    flag: str = ""
    phi_residuals: List[float] = field(default_factory=list)


def _flank_root(fp, t0, R, lo, hi, settings):
    """Root of ``lambda(a, R) = t0`` on one flank; equivalent to ``phi^{t0}(a) = R``."""
    def g(a):
        return lambda_height(fp, a, R, settings).value - t0
    return find_root(g, lo, hi)


def count_bvp_solutions(fp: FamilyParams, t0: float, R: float,
                        settings: QuadratureSettings = ANALYSIS_QUADRATURE,
                        scan_points: int = 2000) -> BvpResult:
    """Number of catenoids whose profile passes through ``(R, +-t0)``.

    Zero below the envelope radius ``m0``, one (the minimiser) at ``m0``,
    two above it within the validated radius range.  Outside that range
    the count comes from a grid scan, is flagged, and is never clamped.
    """
    require_catenoid_regime(fp)
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    if R > ARG_CAP:
        raise DomainError(f"R={R} exceeds the supported cap {ARG_CAP}")
    env = envelope_min(fp, t0, settings, allow_unvalidated=True)
    m0, a0 = env.m, env.a_star
    tie = TIE_TOL * max(1.0, m0)
    if not env.validated:
        count, roots = scan_count(fp, t0, R, settings, scan_points)
        return BvpResult(t0, R, count, roots, m0, a0, validated=False, flag=UNVALIDATED)
    if R < m0 - tie:
        return BvpResult(t0, R, 0, [], m0, a0)
    if abs(R - m0) <= tie:
        return BvpResult(t0, R, 1, [a0], m0, a0, phi_residuals=[abs(m0 - R)])
    if not in_J_q(fp, R):
        count, roots = scan_count(fp, t0, R, settings, scan_points)
        return BvpResult(t0, R, count, roots, m0, a0, validated=False, flag=OUTSIDE_DOMAIN)
    a_lo = 0.5 * a0
    while lambda_height(fp, a_lo, R, settings).value >= t0:
        a_lo *= 0.5
    a1 = _flank_root(fp, t0, R, a_lo, a0, settings)
    a2 = _flank_root(fp, t0, R, a0, R, settings)
    residuals = [abs(phi(fp, t0, a, settings) - R) for a in (a1, a2)]
    return BvpResult(t0, R, 2, [a1, a2], m0, a0, phi_residuals=residuals)


def phi_scan(fp: FamilyParams, t0: float, a_lo: float, a_hi: float, count: int = 2000,
             settings: QuadratureSettings = ANALYSIS_QUADRATURE):
    """``phi^{t0}`` on a logarithmic grid; ``inf`` where undefined or past the radius cap."""
    grid = np.geomspace(a_lo, a_hi, count)
    return grid, np.array([phi_or_inf(fp, t0, a, settings) for a in grid])


def scan_count(fp, t0, R, settings=ANALYSIS_QUADRATURE, count=2000):
    """Crossings of ``phi^{t0} = R`` located by a log-grid scan, refined by bisection."""
    alpha = alpha_of(fp, t0, settings)
    grid, vals = phi_scan(fp, t0, alpha * (1 + 1e-9), max(R, alpha) * 1.05, count, settings)
    roots = []
    diff = vals - R
    for i in range(count - 1):
        if (diff[i] > 0) != (diff[i + 1] > 0):
            lo, hi = grid[i], grid[i + 1]
            roots.append(_flank_root(fp, t0, R, lo, hi, settings) if R > lo else 0.5 * (lo + hi))
    return len(roots), roots


def profile_intersections(fp: FamilyParams, a: float, b: float, grid_points: int = 400,
                          settings: QuadratureSettings = ANALYSIS_QUADRATURE):
    """Upper-half crossings ``(rho*, t*)`` of the profiles with necks ``a`` and ``b``.

    The mirror images ``(rho*, -t*)`` complete the intersection set.
    """
    require_catenoid_regime(fp)
    if a == b:
        raise DomainError("a and b coincide: the profiles are identical")
    if not (a > 0 and b > 0):
        raise DomainError("neck radii must be positive")
    small, big = min(a, b), max(a, b)

    def d(rho):
        return lambda_height(fp, small, rho, settings).value - lambda_height(fp, big, rho, settings).value

    offsets = np.geomspace(1e-8 * big, ARG_CAP - big, grid_points)
    rhos = big + offsets
    vals = np.array([d(r) for r in rhos])
    if vals[-1] > 0:
        raise DomainError(f"profiles of a={a} and b={b} do not cross below rho={ARG_CAP}")
    out = []
    for i in range(grid_points - 1):
        if (vals[i] > 0) != (vals[i + 1] > 0):
            rho = find_root(d, rhos[i], rhos[i + 1], flo=vals[i], fhi=vals[i + 1])
            out.append((rho, lambda_height(fp, small, rho, settings).value))
    return out


def envelope_curve(fp: FamilyParams, t_grid: Sequence[float],
                   settings: QuadratureSettings = ANALYSIS_QUADRATURE) -> List[EnvelopePoint]:
    """Envelope points along ``t_grid`` with a first-order tangency check at each.

    Failures are reported per point in ``status`` rather than raised.
    """
    out = []
    for t in t_grid:
        try:
            env = envelope_min(fp, float(t), settings)
            h = 1e-4 * env.a_star
            slope = (phi(fp, t, env.a_star + h, settings) - phi(fp, t, env.a_star - h, settings)) / (2 * h)
            status = env.status if abs(slope) < TANGENCY_TOL else f"tangency residual {slope:.3e}"
            out.append(EnvelopePoint(float(t), env.m, env.a_star, env.validated, abs(slope), status))
        except (DomainError, ArithmeticError) as exc:
            out.append(EnvelopePoint(float(t), math.nan, math.nan, False, math.nan, f"error: {exc}"))
    return out
