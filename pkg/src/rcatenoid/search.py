"""One-dimensional search helpers: bracketed roots and golden-section minimisation."""
from __future__ import annotations

import math

from scipy.optimize import brentq

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

ROOT_XTOL = 1e-14
ROOT_RTOL = 4 * 2.220446049250313e-16


def find_root(func, lo, hi, xtol=ROOT_XTOL, rtol=ROOT_RTOL, flo=None, fhi=None):
    """Root of ``func`` on ``[lo, hi]``; the endpoint values must differ in sign.

    Brent's bisection/secant/inverse-quadratic hybrid keeps the bracket at
    every iteration.
    """
    flo = func(lo) if flo is None else flo
    fhi = func(hi) if fhi is None else fhi
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"root not bracketed on [{lo!r}, {hi!r}] (f = {flo!r}, {fhi!r})")
    return brentq(func, lo, hi, xtol=xtol, rtol=rtol, maxiter=200)


def golden_section(func, lo, hi, rel_tol=1e-9, max_iter=200):
    """Minimise a unimodal ``func`` on ``[lo, hi]``.

    Returns ``(x_best, f_best, (lo, hi))`` where the last item is the final
    bracket containing the minimiser.
    """
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = func(c), func(d)
    for _ in range(max_iter):
        if hi - lo <= rel_tol * (abs(c) + abs(d)):
            break
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = func(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = func(d)
    if fc < fd:
        return c, fc, (lo, hi)
    return d, fd, (lo, hi)
