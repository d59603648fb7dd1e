import math
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rcatenoid.curvature import (CylinderReport, cylinder_case, elementary_symmetric, expected_sign,
                                 mean_curvatures, newton_eigenvalues, principal_curvatures,
                                 profile_equation_residual, verify_hj_signs)
from rcatenoid.errors import DomainError
from rcatenoid.family import ProfilePoint, make_family
from rcatenoid.profile import integrate_profile


def test_worked_example():
    k = [1.0, 1.0, 1.0, -1.0]
    assert list(elementary_symmetric(k)) == [1.0, 2.0, 0.0, -2.0, -1.0]
    assert list(mean_curvatures(k)) == [0.5, 0.0, -0.5, -1.0]
    p0, p1 = newton_eigenvalues(k, 1)
    assert list(p0) == [1, 1, 1, 1]
    assert list(p1) == [1.0, 1.0, 1.0, 3.0]


def test_umbilic_and_flat():
    assert mean_curvatures([0.7] * 5) == pytest.approx([0.7 ** j for j in range(1, 6)], rel=1e-14)
    assert list(mean_curvatures([0.0] * 3)) == [0.0, 0.0, 0.0]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=9))
def test_elementary_symmetric_matches_polynomial_coefficients(k):
    e = elementary_symmetric(k)
    # prod (1 + k_i x): numpy.poly gives prod (x - r_i), so use roots -k
    coeffs = np.poly(-np.array(k))
    assert e == pytest.approx(coeffs, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=8))
def test_newton_tensor_trace_identity(k):
    n = len(k)
    e = elementary_symmetric(k)
    for j, p in enumerate(newton_eigenvalues(k, n - 1)):
        assert float(np.sum(p)) == pytest.approx((n - j) * e[j], abs=1e-9)


def test_neck_curvatures(fam41):
    a = 0.6
    p = ProfilePoint(0.0, a, 0.0, fam41.q / math.tanh(a))
    k = principal_curvatures(fam41, p)
    assert k[:-1] == pytest.approx([1 / math.tanh(a)] * 3, rel=1e-15)
    assert k[-1] == pytest.approx(-fam41.q / math.tanh(a), rel=1e-15)


def test_steep_limit_flattens(fam41):
    k = principal_curvatures(fam41, ProfilePoint(0.0, 1.0, 1e9, 1.0))
    assert np.max(np.abs(k)) < 1e-8


@pytest.mark.parametrize("n, r", [(4, 1), (5, 1), (6, 2), (7, 3), (9, 2)])
def test_sign_pattern_for_catenoid_type_curvatures(n, r):
    fp = make_family(n, r)
    k1 = 1.7
    k = np.full(n, k1)
    k[-1] = -fp.q * k1
    h = mean_curvatures(k)
    for j in range(1, n + 1):
        want = expected_sign(fp, j)
        got = int(np.sign(h[j - 1])) if abs(h[j - 1]) > 1e-12 else 0
        assert got == want
        # H_j is proportional to (r+1-j) with a positive factor
        ratio = (comb(n - 1, j) - fp.q * comb(n - 1, j - 1)) / (r + 1 - j) if j != r + 1 else None
        if ratio is not None:
            assert ratio > 0


@pytest.mark.parametrize("nr, a", [((4, 1), 1.0), ((6, 2), 0.7), ((5, 1), 0.3)])
def test_sign_structure_along_trajectories(nr, a):
    rep = verify_hj_signs(make_family(*nr), a, 100)
    assert rep.passed, rep.violations[:3]
    assert rep.max_abs_H_order < 1e-9 and rep.max_kn_residual < 1e-9
    assert rep.min_newton_eig > 0 and rep.min_abs_H_next > 0


def test_profile_equation_vanishes_along_trajectory(fam41):
    curve = integrate_profile(fam41, 0.8)
    for p in curve.resample(20, 0.9 * curve.t_stop):
        scale = (1 / math.tanh(p.f)) ** fam41.order
        assert abs(profile_equation_residual(fam41, p)) < 1e-9 * max(1.0, scale)


def test_sign_check_domain():
    with pytest.raises(DomainError):
        verify_hj_signs(make_family(3, 0), 1.0)
    with pytest.raises(DomainError):
        newton_eigenvalues([1.0, 2.0], 2)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_cylinders(c):
    rep = cylinder_case(make_family(3, 2), c)
    assert isinstance(rep, CylinderReport) and rep.passed
    assert rep.profile_residual == 0.0 and rep.k[-1] == 0.0 and rep.H[-1] == 0.0
    assert rep.k[0] == pytest.approx(1 / math.tanh(c), rel=1e-15)


def test_cylinder_unit_radius_value():
    assert cylinder_case(make_family(3, 2), 1.0).k[0] == pytest.approx(1.3130353, abs=1e-7)


def test_cylinder_needs_equal_dimensions(fam41):
    with pytest.raises(DomainError):
        cylinder_case(fam41, 1.0)
