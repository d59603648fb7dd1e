import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad
from hypothesis import given, settings, strategies as st

from rcatenoid.errors import DomainError
from rcatenoid.family import (ProfilePoint, Regime, ball_embed, hyperbolic_radius, make_family,
                              metric_factor, normal_vector, product_norm, require_catenoid_regime)


@pytest.mark.parametrize("n, r, q, regime", [
    (4, 1, 1.0, Regime.SUPERCRITICAL),
    (3, 1, 0.5, Regime.SUBCRITICAL),
    (3, 2, 0.0, Regime.CYLINDER),
    (5, 1, 1.5, Regime.SUPERCRITICAL),
    (5, 2, 2 / 3, Regime.SUBCRITICAL),
])
def test_q_and_regime(n, r, q, regime):
    fp = make_family(n, r)
    assert fp.q == pytest.approx(q, abs=0)
    assert fp.regime is regime
    assert fp.q_exact == Fraction(n - r - 1, r + 1)
    assert fp.order == r + 1


@pytest.mark.parametrize("n, r", [(1, 0), (3, -1), (3, 3), (3, 5)])
def test_invalid_families_are_rejected(n, r):
    with pytest.raises(DomainError):
        make_family(n, r)


def test_cylinder_family_has_no_catenoids():
    with pytest.raises(DomainError):
        require_catenoid_regime(make_family(3, 2))


def test_ball_embedding_examples():
    p = ball_embed(1e-300, 0.0, [1, 0, 0])
    assert np.allclose(p.x, 0) and p.t == 0
    p = ball_embed(2 * math.atanh(0.5), 3.0, [1, 0])
    assert p.x == pytest.approx([0.5, 0.0], abs=1e-15) and p.t == 3.0


def test_metric_factor_examples():
    assert metric_factor([0, 0]) == 2.0
    assert metric_factor([0.5, 0]) == pytest.approx(8 / 3, rel=1e-15)
    with pytest.raises(DomainError):
        metric_factor([1 - 1e-13, 0])


@pytest.mark.parametrize("rho", [0.01, 0.5, 2.0, 7.0])
def test_radius_from_radial_metric_integral(rho):
    x = ball_embed(rho, 0.0, [0.6, 0.8]).x
    s = float(np.linalg.norm(x))
    dist, _ = quad(lambda u: 2 / (1 - u * u), 0, s, epsabs=0, epsrel=1e-13, limit=200)
    assert dist == pytest.approx(rho, rel=1e-8)
    assert hyperbolic_radius(x) == pytest.approx(rho, rel=1e-12)


def test_normal_at_neck_is_horizontal():
    p = ProfilePoint(0.0, 0.7, 0.0, 0.0)
    zeta = np.array([0.0, 1.0, 0.0])
    nvec = normal_vector(p, zeta)
    assert nvec[-1] == 0.0
    assert nvec[:-1] == pytest.approx(-zeta / (2 * math.cosh(0.35) ** 2))


def test_normal_vertical_limit():
    nvec = normal_vector(ProfilePoint(1.0, 2.0, 1e12, 0.0), [1.0, 0.0])
    assert nvec[-1] == pytest.approx(1.0, abs=1e-12)


def test_zeta_must_be_unit():
    with pytest.raises(DomainError):
        ball_embed(1.0, 0.0, [1.0, 1.0])


@settings(max_examples=200, deadline=None)
@given(f=st.floats(1e-3, 20), ft=st.floats(-1e6, 1e6), angle=st.floats(0, 2 * math.pi))
def test_normal_has_unit_product_norm(f, ft, angle):
    zeta = np.array([math.cos(angle), math.sin(angle)])
    p = ProfilePoint(0.3, f, ft, 0.0)
    x = ball_embed(f, p.t, zeta).x
    assert product_norm(x, normal_vector(p, zeta), rho=f) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(f=st.floats(1e-3, 5), ft=st.floats(-1e3, 1e3))
def test_normal_norm_from_ball_coordinates(f, ft):
    zeta = np.array([0.0, 1.0])
    p = ProfilePoint(0.0, f, ft, 0.0)
    assert product_norm(ball_embed(f, 0.0, zeta).x, normal_vector(p, zeta)) == pytest.approx(1.0, abs=1e-12)


def test_profile_point_needs_positive_radius():
    with pytest.raises(DomainError):
        ProfilePoint(0.0, 0.0, 0.0, 0.0)
