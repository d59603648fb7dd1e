"""Direct integration of the profile ODE ``f'' = q coth(f) (1 + f'^2)``.

This is the independent check on the quadrature in :mod:`rcatenoid.heights`:
the trajectory is produced by a Runge-Kutta integrator that knows nothing
about the height integrals, and the two are compared point by point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, IntegrationError, StepSizeUnderflow
from .family import FamilyParams, ProfilePoint, require_catenoid_regime
from .heights import DEFAULT_QUADRATURE, QuadratureSettings, height_tail, lambda_height, log_sinh
from .rk import DormandPrince, hermite

MIN_NECK = 1e-4
CROSS_VALIDATION_TOL = 1e-6
RESOLUTION_ULPS = 64


@dataclass(frozen=True)
class OdeSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    f_cap: float = 30.0
    max_steps: int = 100_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("ODE tolerances must be positive")
        if not self.f_cap > 0:
            raise DomainError("f_cap must be positive")


DEFAULT_ODE = OdeSettings()


def profile_rhs(q: float):
    def rhs(t, y):
        f, ft = y
        return np.array([ft, q / math.tanh(f) * (1.0 + ft * ft)])
    return rhs


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    """Upper half (``t >= 0``) of a catenoid profile, one row per accepted step.

    The lower half follows from ``f(-t) = f(t)``.
    """

    family: FamilyParams
    a: float
    t: np.ndarray
    f: np.ndarray
    f_t: np.ndarray
    f_tt: np.ndarray
    t_stop: float
    L_estimate: float
    L_error_estimate: float
    settings: OdeSettings = field(default=DEFAULT_ODE)
    complete: bool = True
    stop_reason: str = "f_cap"

    @property
    def samples(self):
        return [ProfilePoint(*row) for row in zip(self.t, self.f, self.f_t, self.f_tt)]

    def __len__(self):
        return len(self.t)

    def at(self, t: float) -> ProfilePoint:
        """Dense output: cubic Hermite interpolation between accepted steps.

        ``f_tt`` is re-evaluated from the ODE at the interpolated state.
        Negative ``t`` is served by reflection.
        """
        sign = -1.0 if t < 0 else 1.0
        s = abs(t)
        if s > self.t_stop:
            raise DomainError(f"|t|={s} is beyond the integrated range [0, {self.t_stop}]")
        i = int(np.searchsorted(self.t, s, side="right")) - 1
        i = min(max(i, 0), len(self.t) - 2)
        t0, t1 = self.t[i], self.t[i + 1]
        f = hermite(t0, t1, self.f[i], self.f[i + 1], self.f_t[i], self.f_t[i + 1], s)
        ft = hermite(t0, t1, self.f_t[i], self.f_t[i + 1], self.f_tt[i], self.f_tt[i + 1], s)
        ftt = self.family.q / math.tanh(f) * (1.0 + ft * ft)
        return ProfilePoint(sign * s if s else 0.0, f, sign * ft, ftt)

    def resample(self, count: int, t_max: Optional[float] = None):
        """``count`` points uniformly spaced in ``[0, t_max]`` (default ``t_stop``)."""
        t_max = self.t_stop if t_max is None else t_max
        return [self.at(x) for x in np.linspace(0.0, t_max, count)]


def _land_on_cap(solver, f_cap, rhs):
    """Shorten the final step so that the trajectory ends exactly at ``f = f_cap``."""
    t0, y0 = solver.t, solver.y
    # Newton on the step length, starting from linear extrapolation
    h = (f_cap - y0[0]) / max(y0[1], 1e-300)
    h = min(h, solver.h_last)
    y_end, err = y0, None
    for _ in range(60):
        y_end, _, err = solver.trial(h)
        g = y_end[0] - f_cap
        if abs(g) <= 4 * np.finfo(float).eps * f_cap:
            break
        h -= g / y_end[1]
    return t0 + h, y_end, err


def integrate_profile(fp: FamilyParams, a: float, settings: OdeSettings = DEFAULT_ODE,
                      quadrature: QuadratureSettings = DEFAULT_QUADRATURE) -> ProfileCurve:
    """Integrate from the neck ``(f, f') = (a, 0)`` until ``f`` reaches ``f_cap``.

    The remaining height beyond ``f_cap`` comes from the quadrature tail, so
    ``L_estimate`` approximates the half-height ``L(a)``.

    For ``q > 1`` the blow-up is so fast that ``f_cap`` can lie beyond the
    resolution of ``t``.  When the step size underflows while the remaining
    height is already below that resolution, integration stops there with
    ``stop_reason = "height-resolution"``.
    """
    require_catenoid_regime(fp)
    if not a > 0:
        raise DomainError(f"neck radius must be positive, got a={a}")
    if a < MIN_NECK:
        raise DomainError(f"a={a} < {MIN_NECK}: coth(f) is too steep near the axis for the integrator")
    if a >= settings.f_cap:
        raise DomainError(f"a={a} must be below f_cap={settings.f_cap}")
    q = fp.q
    rhs = profile_rhs(q)
    y0 = np.array([a, 0.0])
    stop_reason = "f_cap"
    solver = DormandPrince(rhs, 0.0, y0, settings.rel_tol, settings.abs_tol, settings.max_steps)
    ts, fs, fts, ftts = [0.0], [a], [0.0], [float(solver.k[1])]
    local_err = 0.0

    def partial(complete=False, t_stop=None):
        return ProfileCurve(fp, a, np.array(ts), np.array(fs), np.array(fts), np.array(ftts),
                            t_stop=ts[-1] if t_stop is None else t_stop,
                            L_estimate=math.nan, L_error_estimate=math.inf,
                            settings=settings, complete=complete)

    while True:
        t_prev, y_prev, k_prev = solver.t, solver.y, solver.k
        try:
            t, y, k, err = solver.step()
        except StepSizeUnderflow as exc:
            rest = height_tail(fp, a, fs[-1], quadrature).value
            if rest <= RESOLUTION_ULPS * math.ulp(max(1.0, ts[-1])):
                stop_reason = "height-resolution"
                break
            raise IntegrationError(str(exc), partial=partial()) from None
        except IntegrationError as exc:
            raise IntegrationError(str(exc), partial=partial()) from None
        if y[0] >= settings.f_cap:
            # redo the final step from the previous point with the exact length
            solver.t, solver.y, solver.k = t_prev, y_prev, k_prev
            solver.h_last = t - t_prev
            t, y, err = _land_on_cap(solver, settings.f_cap, rhs)
            k = rhs(t, y)
            y = np.array([settings.f_cap, y[1]])
            done = True
        else:
            done = False
        local_err += abs(err[0]) / max(1.0, abs(y[1])) + abs(err[1]) / max(1.0, abs(y[1]))
        if done and t <= ts[-1]:
            # landing step shorter than the spacing of doubles at t: the cap replaces the last row
            for col in (ts, fs, fts, ftts):
                col.pop()
        ts.append(t)
        fs.append(float(y[0]))
        fts.append(float(y[1]))
        ftts.append(float(k[1]))
        if done:
            break

    tail = height_tail(fp, a, fs[-1], quadrature)
    return ProfileCurve(fp, a, np.array(ts), np.array(fs), np.array(fts), np.array(ftts),
                        t_stop=ts[-1], L_estimate=ts[-1] + tail.value,
                        L_error_estimate=local_err + tail.error_estimate, settings=settings,
                        stop_reason=stop_reason)


def first_integral_residual(fp: FamilyParams, a: float, p: ProfilePoint) -> float:
    """``sinh(f)^q / sqrt(1 + f'^2) - sinh(a)^q``; zero along exact solutions."""
    q = fp.q
    lhs = math.exp(q * log_sinh(p.f)) / math.hypot(1.0, p.f_t)
    return lhs - math.exp(q * log_sinh(a))


def max_first_integral_residual(curve: ProfileCurve) -> float:
    fp, a = curve.family, curve.a
    q = fp.q
    lhs = np.exp(q * np.array([log_sinh(f) for f in curve.f])) / np.hypot(1.0, curve.f_t)
    return float(np.max(np.abs(lhs - math.exp(q * log_sinh(a)))))


@dataclass(frozen=True)
class CrossValidation:
    max_gap: float
    n_points: int
    worst_t: float
    passed: bool


def cross_validate(fp: FamilyParams, a: float, settings: OdeSettings = DEFAULT_ODE,
                   quadrature: QuadratureSettings = DEFAULT_QUADRATURE,
                   curve: Optional[ProfileCurve] = None) -> CrossValidation:
    """Compare the ODE trajectory with the height integral at every accepted step."""
    curve = integrate_profile(fp, a, settings, quadrature) if curve is None else curve
    worst, worst_t = 0.0, 0.0
    for t, f in zip(curve.t, curve.f):
        gap = abs(lambda_height(fp, a, max(float(f), a), quadrature).value - t)
        if gap > worst:
            worst, worst_t = gap, float(t)
    return CrossValidation(worst, len(curve.t), worst_t, worst < CROSS_VALIDATION_TOL)
