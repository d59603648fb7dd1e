"""Principal curvatures, normalised mean curvatures and Newton tensors of the profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import List

import numpy as np

from .errors import DomainError
from .family import FamilyParams, ProfilePoint, Regime, require_catenoid_regime
from .profile import DEFAULT_ODE, OdeSettings, integrate_profile

SIGN_DEAD_BAND = 1e-12
R_MINIMAL_TOL = 1e-9


def principal_curvatures(fp: FamilyParams, p: ProfilePoint) -> np.ndarray:
    """``k_1 = ... = k_{n-1}`` (rotation directions) followed by the profile curvature ``k_n``."""
    w2 = 1.0 + p.f_t * p.f_t
    k_rot = 1.0 / (math.tanh(p.f) * math.sqrt(w2))
    k_prof = -p.f_tt / w2 ** 1.5
    k = np.full(fp.n, k_rot)
    k[-1] = k_prof
    return k


def elementary_symmetric(k) -> np.ndarray:
    """``e_0, ..., e_n`` of the entries of ``k`` via the product ``prod (1 + k_i x)``."""
    e = np.zeros(len(k) + 1)
    e[0] = 1.0
    for i, ki in enumerate(k, start=1):
        e[1:i + 1] = e[1:i + 1] + ki * e[0:i]
    return e


def mean_curvatures(k) -> np.ndarray:
    """``H_j = e_j(k) / C(n, j)`` for ``j = 1..n``."""
    k = np.asarray(k, dtype=float)
    n = len(k)
    if n < 1:
        raise DomainError("need at least one principal curvature")
    e = elementary_symmetric(k)
    return np.array([e[j] / comb(n, j) for j in range(1, n + 1)])


def newton_eigenvalues(k, up_to: int) -> List[np.ndarray]:
    """Diagonals of ``P_0, ..., P_up_to`` in the principal frame.

    ``P_0 = I`` and ``P_j = C(n, j) H_j I - A P_{j-1}``; the shape operator
    ``A`` is diagonal there, so every ``P_j`` is too.
    """
    k = np.asarray(k, dtype=float)
    n = len(k)
    if up_to > n - 1 or up_to < 0:
        raise DomainError(f"Newton tensors are defined here for 0 <= j <= n-1 = {n - 1}")
    e = elementary_symmetric(k)
    out = [np.ones(n)]
    for j in range(1, up_to + 1):
        out.append(e[j] - k * out[-1])
    return out


@dataclass(frozen=True)
class CurvatureRecord:
    k: np.ndarray
    H: np.ndarray
    newton_eigs: List[np.ndarray]


def curvature_record(fp: FamilyParams, p: ProfilePoint) -> CurvatureRecord:
    k = principal_curvatures(fp, p)
    return CurvatureRecord(k, mean_curvatures(k), newton_eigenvalues(k, fp.n - 1))


def expected_sign(fp: FamilyParams, j: int) -> int:
    """Sign of ``H_j`` on an r-catenoid: ``+`` below ``r+1``, ``0`` at ``r+1``, ``-`` above."""
    return (j < fp.order) - (j > fp.order)


@dataclass
class SignReport:
    n_samples: int
    max_abs_H_order: float = 0.0
    max_kn_residual: float = 0.0
    min_newton_eig: float = math.inf
    min_abs_H_next: float = math.inf
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_point_signs(fp: FamilyParams, p: ProfilePoint, report: SignReport,
                      dead_band: float = SIGN_DEAD_BAND, tol: float = R_MINIMAL_TOL) -> None:
    rec = curvature_record(fp, p)
    k1 = rec.k[0]
    # H_j is homogeneous of degree j in k; the dead band applies at unit scale
    scale = max(abs(k1), abs(rec.k[-1]))
    h_unit = mean_curvatures(rec.k / scale) if scale > 0 else rec.H
    order = fp.order
    h_ord = abs(rec.H[order - 1])
    report.max_abs_H_order = max(report.max_abs_H_order, h_ord)
    if h_ord >= tol:
        report.violations.append((p.t, f"|H_{order}| = {h_ord:.3e} >= {tol}"))
    for j in range(1, fp.n + 1):
        if j == order:
            continue
        want = expected_sign(fp, j)
        hj = h_unit[j - 1]
        got = 0 if abs(hj) < dead_band else (1 if hj > 0 else -1)
        if got != want:
            report.violations.append((p.t, f"sign(H_{j}) = {got}, expected {want} (unit-scale H_{j} = {hj:.3e})"))
    if order + 1 <= fp.n:
        report.min_abs_H_next = min(report.min_abs_H_next, abs(h_unit[order]))
    kn_res = abs(rec.k[-1] + fp.q * k1) / max(1.0, abs(k1))
    report.max_kn_residual = max(report.max_kn_residual, kn_res)
    if kn_res >= tol:
        report.violations.append((p.t, f"k_n + q k_1 residual {kn_res:.3e}"))
    p_r = newton_eigenvalues(rec.k / scale if scale > 0 else rec.k, fp.r)[fp.r]
    report.min_newton_eig = min(report.min_newton_eig, float(np.min(p_r)))
    if np.any(p_r <= 0):
        report.violations.append((p.t, f"P_{fp.r} has a non-positive eigenvalue {float(np.min(p_r)):.3e}"))


def verify_hj_signs(fp: FamilyParams, a: float, n_samples: int = 100,
                    settings: OdeSettings = DEFAULT_ODE, curve=None) -> SignReport:
    """Check the sign pattern of ``H_1..H_n`` at ``n_samples`` points of the profile.

    Samples are uniform in ``t`` over the integrated range.  Signs are read
    from ``H_j(k / max|k|)``, which has the sign of ``H_j(k)``.
    """
    require_catenoid_regime(fp)
    if not 1 <= fp.r < fp.n - 1:
        raise DomainError(f"sign structure needs 1 <= r < n-1, got n={fp.n}, r={fp.r}")
    curve = integrate_profile(fp, a, settings) if curve is None else curve
    report = SignReport(n_samples=n_samples)
    for p in curve.resample(n_samples):
        check_point_signs(fp, p, report)
    return report


@dataclass(frozen=True)
class CylinderReport:
    c: float
    profile_residual: float
    k: np.ndarray
    H: np.ndarray

    @property
    def passed(self) -> bool:
        return self.profile_residual == 0.0 and self.k[-1] == 0.0 and self.H[-1] == 0.0


def profile_equation_residual(fp: FamilyParams, p: ProfilePoint) -> float:
    """``(q+1) H_{r+1}`` computed from the reduced profile equation.

    ``-coth^r(f) f'' (1+f'^2)^{-(r+3)/2} + q coth^{r+1}(f) (1+f'^2)^{-(r+1)/2}``
    """
    r, q = fp.r, fp.q
    w2 = 1.0 + p.f_t * p.f_t
    coth = 1.0 / math.tanh(p.f)
    return (-coth ** r * p.f_tt * w2 ** (-(r + 3) / 2)
            + q * coth ** (r + 1) * w2 ** (-(r + 1) / 2))


def cylinder_case(fp: FamilyParams, c: float) -> CylinderReport:
    """Right cylinder ``f = c`` over a sphere when ``n = r + 1``."""
    if fp.regime is not Regime.CYLINDER:
        raise DomainError(f"cylinder case needs n = r+1, got n={fp.n}, r={fp.r}")
    if not c > 0:
        raise DomainError(f"cylinder radius must be positive, got {c}")
    p = ProfilePoint(0.0, c, 0.0, 0.0)
    k = principal_curvatures(fp, p)
    return CylinderReport(c, profile_equation_residual(fp, p), k, mean_curvatures(k))
