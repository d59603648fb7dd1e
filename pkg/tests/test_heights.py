import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rcatenoid import bruteforce
from rcatenoid.analysis import ANALYSIS_QUADRATURE as AQ
from rcatenoid.errors import DomainError
from rcatenoid.family import make_family
from rcatenoid.heights import (QuadratureSettings, angle_of, half_height, half_height_derivative,
                               height_deficit, height_limit, height_tail, lambda_a, lambda_aa,
                               lambda_height, lambda_rho, radius_of_angle, tail_bound)

# reference values from 40-digit mpmath quadrature of the radial height integral
MP_HALF_HEIGHTS = [
    ((4, 1), 1.0, 1.3644961913128757),
    ((3, 1), 0.5, 2.3060694609127015),
    ((5, 1), 1.0, 0.88899904184069251),
    ((5, 2), 0.7, 1.8812879130559526),
    ((4, 1), 0.1, 0.36866455763095547),
]


@pytest.mark.parametrize("nr, a, expected", MP_HALF_HEIGHTS)
def test_half_height_reference_values(nr, a, expected):
    assert half_height(make_family(*nr), a, AQ).value == pytest.approx(expected, rel=1e-13)


def test_height_reference_values(fam41, fam31):
    assert lambda_height(fam41, 1.0, 2.0, AQ).value == pytest.approx(1.0386158808948349, rel=1e-13)
    assert lambda_height(fam31, 0.3, 0.8, AQ).value == pytest.approx(0.75132983772971096, rel=1e-13)


def test_default_tolerances_are_good_to_1e_9(fam41):
    h = half_height(fam41, 1.0)
    assert abs(h.value - 1.3644961913128757) < 1e-9
    assert h.error_estimate < 1e-9


def test_derivative_reference_values(fam41, fam31):
    # high-precision central differences of the mpmath integral
    assert half_height_derivative(fam41, 1.0, AQ).value == pytest.approx(0.401736382467845, rel=1e-11)
    assert lambda_a(fam41, 0.5, 1.5, AQ) == pytest.approx(0.512494875169891, rel=1e-10)
    assert lambda_a(fam31, 0.3, 0.8, AQ) == pytest.approx(0.43089696896674, rel=1e-10)
    assert lambda_aa(fam41, 0.5, 1.5, AQ) == pytest.approx(-2.33549082177, rel=1e-9)
    assert lambda_aa(fam31, 0.3, 0.8, AQ) == pytest.approx(-5.55069175119, rel=1e-9)


@pytest.mark.parametrize("nr, limit", [((4, 1), math.pi / 2), ((3, 1), math.pi), ((5, 1), math.pi / 3)])
def test_height_limit(nr, limit):
    fp = make_family(*nr)
    assert height_limit(fp) == pytest.approx(limit, rel=1e-15)
    assert abs(half_height(fp, 10.0).value - limit) < 1e-3


def test_deficit_complements_half_height():
    for nr in [(3, 1), (4, 1), (5, 1), (5, 2)]:
        fp = make_family(*nr)
        for a in (0.05, 0.7, 3.0):
            total = half_height(fp, a, AQ).value + height_deficit(fp, a, AQ).value
            assert total == pytest.approx(height_limit(fp), rel=1e-13)


def test_zero_at_neck_and_domain_errors(fam41):
    assert lambda_height(fam41, 0.8, 0.8).value == 0.0
    with pytest.raises(DomainError):
        lambda_height(fam41, 1.0, 0.5)
    with pytest.raises(DomainError):
        lambda_height(fam41, -1.0, 2.0)
    with pytest.raises(DomainError):
        lambda_height(make_family(3, 2), 1.0, 2.0)
    with pytest.raises(DomainError):
        lambda_a(fam41, 1.0, 1.0)


def test_half_height_vanishes_with_the_neck(fam41):
    values = [half_height(fam41, a).value for a in (1e-2, 1e-4, 1e-6)]
    assert values == sorted(values, reverse=True) and values[-1] < 2e-5


def test_agrees_with_bruteforce_route():
    for nr in [(3, 1), (4, 1), (5, 2)]:
        fp = make_family(*nr)
        a = np.array([0.1, 0.5, 1.0, 2.0])
        rho = a * 1.7 + 0.2
        brute = bruteforce.heights(fp, a, rho)
        exact = [lambda_height(fp, x, y, AQ).value for x, y in zip(a, rho)]
        assert brute == pytest.approx(exact, rel=1e-12)


def test_tail_and_height_add_up(fam31):
    for rho in (0.6, 3.0, 25.0):
        total = lambda_height(fam31, 0.5, rho, AQ).value + height_tail(fam31, 0.5, rho, AQ).value
        assert total == pytest.approx(half_height(fam31, 0.5, AQ).value, rel=1e-13)


@pytest.mark.parametrize("v_max", [10.0, 100.0, 1e4])
def test_truncated_tail_stays_within_bound(v_max):
    # the truncated integral plus its tail bound must bracket the full value
    for nr in [(3, 1), (4, 1), (5, 1)]:
        fp = make_family(*nr)
        cut = QuadratureSettings(1e-13, 1e-15, 400, tail_cut=v_max)
        for a in (0.2, 1.0, 4.0):
            full = half_height(fp, a, AQ).value
            trunc = half_height(fp, a, cut)
            bound = tail_bound(fp, v_max)
            assert trunc.error_estimate >= bound
            assert abs(full - trunc.value) <= bound


def test_angle_round_trip(fam31):
    # rho(theta) is ill-conditioned at both ends; interior angles round-trip well
    for a in (0.01, 1.0, 20.0):
        for theta in (1e-3, 0.3, 1.2, 1.5707):
            rho = radius_of_angle(fam31, a, theta)
            assert angle_of(fam31, a, rho) == pytest.approx(theta, rel=1e-9)
    assert radius_of_angle(fam31, 1.0, angle_of(fam31, 1.0, 2.0)) == pytest.approx(2.0, rel=1e-13)


def test_lambda_rho_matches_difference_quotient(fam41):
    a, rho, h = 0.7, 1.9, 1e-5
    fd = (lambda_height(fam41, a, rho + h, AQ).value - lambda_height(fam41, a, rho - h, AQ).value) / (2 * h)
    assert lambda_rho(fam41, a, rho) == pytest.approx(fd, rel=1e-8)


def test_derivative_decays_for_large_necks(fam41):
    slopes = [half_height_derivative(fam41, a).value for a in (2.0, 5.0, 10.0, 20.0)]
    assert all(s > 0 for s in slopes)
    assert slopes == sorted(slopes, reverse=True) and slopes[-1] < 1e-15


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.01, 8.0), factor=st.floats(1.0001, 3.0))
def test_half_height_is_increasing(a, factor):
    fp = make_family(5, 2)
    assert half_height(fp, a * factor, AQ).value > half_height(fp, a, AQ).value
    assert half_height_derivative(fp, a).value > 0


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.05, 5.0), r1=st.floats(1.01, 5.0), r2=st.floats(1.01, 5.0))
def test_height_is_increasing_in_radius_and_below_half_height(a, r1, r2):
    fp = make_family(4, 1)
    lo, hi = sorted((a * r1, a * r2))
    v_lo, v_hi = lambda_height(fp, a, lo).value, lambda_height(fp, a, hi).value
    assert v_lo <= v_hi < half_height(fp, a).value
