"""Embedded Dormand-Prince 5(4) integrator with PI step-size control."""
from __future__ import annotations

import math

import numpy as np

from .errors import IntegrationError, StepSizeUnderflow

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_LOW

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
# PI exponents (Gustafsson / Hairer DOPRI5 defaults)
BETA = 0.04
EXPO = 0.2 - 0.75 * BETA


def dp_step(rhs, t, y, h, k0):
    """One Dormand-Prince step.  Returns ``(y_new, k_last, err_vec)``; FSAL."""
    k = [k0]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(rhs(t + _C[i] * h, yi))
    y_new = y + h * sum(b * kj for b, kj in zip(_B, k) if b != 0.0)
    err = h * sum(e * kj for e, kj in zip(_E, k) if e != 0.0)
    return y_new, k[6], err


def error_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return math.sqrt(float(np.mean((err / scale) ** 2)))


def initial_step(rhs, t, y, f0, rtol, atol, order=5):
    """Starting step size (Hairer, Norsett & Wanner, II.4)."""
    scale = atol + rtol * np.abs(y)
    d0 = math.sqrt(float(np.mean((y / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = rhs(t + h0, y + h0 * f0)
    d2 = math.sqrt(float(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, 1e-3 * h0)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (order + 1))
    return min(100 * h0, h1)


class DormandPrince:
    """Step-by-step driver.  Call :meth:`step` until the caller is satisfied."""

    def __init__(self, rhs, t0, y0, rtol, atol, max_steps=100_000):
        self.rhs = rhs
        self.t = float(t0)
        self.y = np.asarray(y0, dtype=float)
        self.rtol, self.atol = rtol, atol
        self.max_steps = max_steps
        self.k = rhs(self.t, self.y)
        self.h = initial_step(rhs, self.t, self.y, self.k, rtol, atol)
        self.err_old = 1e-4
        self.n_accepted = 0
        self.n_rejected = 0
        self.last_error = None

    def step(self):
        """Advance one accepted step; returns ``(t, y, dydt, local_error_vector)``."""
        while True:
            if self.n_accepted + self.n_rejected >= self.max_steps:
                raise IntegrationError(f"step budget of {self.max_steps} exhausted at t={self.t!r}")
            h = self.h
            if not h > 0 or self.t + h == self.t:
                raise StepSizeUnderflow(f"step size underflow (h={h:.3e}) at t={self.t!r}")
            y_new, k_new, err_vec = dp_step(self.rhs, self.t, self.y, h, self.k)
            if not np.all(np.isfinite(y_new)):
                self.h = 0.25 * h
                self.n_rejected += 1
                continue
            err = error_norm(err_vec, self.y, y_new, self.rtol, self.atol)
            if err <= 1.0:
                err = max(err, 1e-10)
                fac = SAFETY * err ** -EXPO * self.err_old ** BETA
                self.h = h * min(FAC_MAX, max(FAC_MIN, fac))
                self.err_old = err
                self.t += h
                self.y, self.k = y_new, k_new
                self.n_accepted += 1
                self.last_error = err_vec
                return self.t, self.y, self.k, err_vec
            self.n_rejected += 1
            self.h = h * max(FAC_MIN, SAFETY * err ** -0.2)

    def trial(self, h):
        """Single step of size ``h`` from the current state without committing it."""
        y_new, k_new, err_vec = dp_step(self.rhs, self.t, self.y, h, self.k)
        return y_new, k_new, err_vec


def hermite(t0, t1, y0, y1, d0, d1, t):
    """Cubic Hermite interpolant on ``[t0, t1]`` from values and derivatives."""
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
