"""Vectorised brute-force evaluation of heights and radii for grid scans.

Deliberately a different route from :mod:`rcatenoid.heights`: the height is
integrated in the original radial variable ``u``,

    lambda(a, rho) = sinh(a)^q  int_a^rho du / sqrt(sinh(u)^(2q) - sinh(a)^(2q)),

with ``u = a + sigma^2`` to remove the inverse square-root singularity at
the neck, using a fixed composite Gauss-Legendre rule evaluated for a whole
array of neck radii at once.  Radii at a given height come from a
vectorised safeguarded Newton iteration rather than a scalar root finder.
"""
from __future__ import annotations

import math

import numpy as np

from .family import FamilyParams

PANELS = 40
ORDER = 16
_X, _W = np.polynomial.legendre.leggauss(ORDER)
_U = np.linspace(0.0, 1.0, PANELS + 1)


def _log_ratio(a, d):
    """``log(sinh(a + d) / sinh(a))`` without cancellation for small ``d``."""
    return np.log1p(2.0 * np.sinh(0.5 * d) ** 2 + np.sinh(d) / np.tanh(a))


def _integrand(q, a, sigma):
    """Height integrand in ``sigma`` (bounded, with the finite limit at ``sigma = 0``)."""
    d = sigma * sigma
    x = 2.0 * q * _log_ratio(a, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 2.0 * sigma / np.sqrt(np.expm1(x))
    at_neck = 2.0 / np.sqrt(2.0 * q / np.tanh(a))
    return np.where(sigma > 0, val, at_neck)


def heights(fp: FamilyParams, a, rho) -> np.ndarray:
    """``lambda(a_i, rho_i)`` for broadcastable arrays ``a`` and ``rho >= a``."""
    a, rho = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(rho, dtype=float))
    return _heights_sigma(fp.q, a, np.sqrt(np.maximum(rho - a, 0.0)))


def _heights_sigma(q, a, sig_end):
    edges = sig_end[..., None] * _U
    mid = 0.5 * (edges[..., 1:] + edges[..., :-1])
    half = 0.5 * (edges[..., 1:] - edges[..., :-1])
    nodes = mid[..., None] + half[..., None] * _X
    vals = _integrand(q, a[..., None, None], nodes)
    return np.sum((vals @ _W) * half, axis=-1)


def _panel(q, a, s0, s1):
    mid, half = 0.5 * (s0 + s1), 0.5 * (s1 - s0)
    nodes = mid[..., None] + half[..., None] * _X
    return (_integrand(q, a[..., None], nodes) @ _W) * half


def radii_at_height(fp: FamilyParams, t0: float, a, rho_cap: float = 40.0,
                    scan_panels: int = 160, max_iter: int = 60, tol: float = 1e-14) -> np.ndarray:
    """``phi^{t0}(a_i)`` for an array of necks; ``inf`` where it exceeds ``rho_cap``.

    One cumulative pass over fixed panels in ``sigma`` locates the panel
    holding each root, then Newton steps (bisection-safeguarded) finish
    inside that panel.
    """
    q = fp.q
    a = np.atleast_1d(np.asarray(a, dtype=float))
    sig_cap = np.sqrt(np.maximum(rho_cap - a, 0.0))
    edges = sig_cap[:, None] * np.linspace(0.0, 1.0, scan_panels + 1)
    cum = np.concatenate([np.zeros((len(a), 1)),
                          np.cumsum(_panel(q, a[:, None], edges[:, :-1], edges[:, 1:]), axis=1)], axis=1)
    beyond = cum[:, -1] < t0
    k = np.clip(np.argmax(cum >= t0, axis=1), 1, scan_panels)
    rows = np.arange(len(a))
    lo, hi = edges[rows, k - 1], edges[rows, k]
    base = cum[rows, k - 1]
    span = cum[rows, k] - base
    with np.errstate(divide="ignore", invalid="ignore"):
        x = lo + (hi - lo) * np.clip((t0 - base) / span, 0.0, 1.0)
    start = lo.copy()
    for _ in range(max_iter):
        g = base + _panel(q, a, start, x) - t0
        lo = np.where(g < 0, x, lo)
        hi = np.where(g >= 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = x - g / _integrand(q, a, x)
        ok = (newton >= lo) & (newton <= hi) & np.isfinite(newton)
        x_new = np.where(ok, newton, 0.5 * (lo + hi))
        done = np.all((np.abs(x_new - x) <= tol * np.maximum(1.0, x)) | beyond)
        x = x_new
        if done:
            break
    return np.where(beyond, np.inf, a + x * x)


def grid_minimum(grid, values):
    """Discrete minimum of ``values`` refined by a parabola through the three lowest neighbours.

    The parabola is fitted in ``log(a)``, matching logarithmic grids.
    """
    i = int(np.argmin(values))
    if i == 0 or i == len(grid) - 1 or not np.all(np.isfinite(values[i - 1:i + 2])):
        return float(grid[i]), float(values[i])
    x = np.log(grid[i - 1:i + 2])
    y = values[i - 1:i + 2]
    c2, c1, c0 = np.polyfit(x - x[1], y, 2)
    if c2 <= 0:
        return float(grid[i]), float(values[i])
    xv = -c1 / (2 * c2)
    return float(math.exp(x[1] + xv)), float(c0 - c1 * c1 / (4 * c2))


def count_crossings(values, level) -> int:
    d = np.asarray(values) - level
    s = d > 0
    return int(np.count_nonzero(s[1:] != s[:-1]))
