import math

import numpy as np
import pytest

from rcatenoid import bruteforce
from rcatenoid.analysis import (OUTSIDE_DOMAIN, UNVALIDATED, OutOfReach, alpha_of, count_bvp_solutions,
                                envelope_curve, envelope_min, height_threshold_T, in_J_q,
                                neck_threshold_M, phi, phi_or_inf, phi_slope, profile_intersections)
from rcatenoid.errors import DomainError
from rcatenoid.family import make_family
from rcatenoid.heights import half_height, height_limit, lambda_height
from rcatenoid.profile import integrate_profile
from rcatenoid.verify import brute_count

# (t0, m0, a0) for (n, r) = (4, 1); confirmed against 2000-point brute-force scans
ENVELOPE_41 = [
    (0.3, 0.4605443826406447, 0.2514376524055043),
    (0.5, 0.7922704863442491, 0.4237067446863688),
    (0.7, 1.1663694317870612, 0.6051228793381657),
    (1.2, 2.5798391628271444, 1.1887942677323762),
]


def test_phi_reference_value(fam41):
    # 40-digit mpmath root of lambda(1, rho) = 0.5
    assert phi(fam41, 0.5, 1.0) == pytest.approx(1.1743361949830397, rel=1e-13)
    curve = integrate_profile(fam41, 1.0)
    assert curve.at(0.5).f == pytest.approx(phi(fam41, 0.5, 1.0), abs=1e-6)


def test_phi_limits(fam41):
    assert phi(fam41, 0.0, 0.8) == 0.8
    alpha = alpha_of(fam41, 0.7)
    assert phi_or_inf(fam41, 0.7, alpha * (1 + 1e-12)) > 20
    assert phi(fam41, 0.7, 50.0) > 50.0
    with pytest.raises(OutOfReach):
        phi(fam41, 0.7, alpha * 0.99)


def test_alpha_reference_value(fam41):
    alpha = alpha_of(fam41, 0.7)
    assert alpha == pytest.approx(0.25523844700430364, rel=1e-12)
    assert half_height(fam41, alpha).value == pytest.approx(0.7, abs=1e-10)
    assert alpha_of(fam41, 0.8) > alpha
    assert alpha_of(fam41, 1e-6) < 1e-6


@pytest.mark.parametrize("nr", [(4, 1), (3, 1), (5, 2)])
def test_alpha_inverts_half_height(nr):
    fp = make_family(*nr)
    for a in np.geomspace(0.1, 5.0, 9):
        assert alpha_of(fp, half_height(fp, a).value) == pytest.approx(a, rel=1e-8)


def test_alpha_out_of_range(fam41):
    with pytest.raises(DomainError):
        alpha_of(fam41, math.pi / 2)


def test_neck_threshold():
    assert neck_threshold_M(make_family(3, 1)) == pytest.approx(math.acosh(math.sqrt(2)), rel=1e-15)
    assert neck_threshold_M(make_family(3, 1)) == pytest.approx(0.8813736, abs=1e-7)
    assert neck_threshold_M(make_family(5, 2)) == pytest.approx(math.acosh(math.sqrt(3)), rel=1e-15)
    # q = 1/11, 3/9, 5/7: M grows from 0 towards infinity as q rises to 1
    ms = [neck_threshold_M(make_family(12, r)) for r in (10, 8, 6)]
    assert ms[0] < ms[1] < ms[2]
    with pytest.raises(DomainError):
        neck_threshold_M(make_family(4, 1))


@pytest.mark.parametrize("nr, expected", [((3, 1), 0.8405055829980836), ((5, 2), 0.8926430981053824)])
def test_height_threshold_against_grid_scan(nr, expected):
    fp = make_family(*nr)
    big_m = neck_threshold_M(fp)
    big_t = height_threshold_T(fp)
    assert big_t == pytest.approx(expected, rel=1e-10)
    grid = np.linspace(1e-3, big_m * (1 - 1e-9), 4001)
    assert np.max(bruteforce.heights(fp, grid, big_m)) == pytest.approx(big_t, rel=1e-7)
    assert big_t < height_limit(fp)


def test_height_threshold_supercritical(fam41):
    assert height_threshold_T(fam41) == math.pi / 2


def test_interval_J():
    fp = make_family(3, 1)
    big_m = neck_threshold_M(fp)
    assert in_J_q(fp, 0.5 * big_m) and not in_J_q(fp, 2 * big_m)
    assert in_J_q(make_family(4, 1), 80.0)


@pytest.mark.parametrize("t0, m0, a0", ENVELOPE_41)
def test_envelope_reference_values(fam41, t0, m0, a0):
    env = envelope_min(fam41, t0)
    assert env.m == pytest.approx(m0, rel=1e-12)
    assert env.a_star == pytest.approx(a0, rel=1e-9)
    assert env.validated and env.status == "ok"
    assert abs(phi_slope(fam41, t0, env.a_star)) < 1e-7


def test_envelope_is_a_minimum(fam41):
    m0, a0 = envelope_min(fam41, 0.5)
    alpha = alpha_of(fam41, 0.5)
    for a in np.geomspace(alpha * 1.0001, 20.0, 50):
        assert phi_or_inf(fam41, 0.5, a) >= m0


def test_envelope_against_bruteforce_scan(fam41):
    alpha = alpha_of(fam41, 0.5)
    grid = np.geomspace(alpha * (1 + 1e-9), 3.0, 2000)
    a_grid, m_grid = bruteforce.grid_minimum(grid, bruteforce.radii_at_height(fam41, 0.5, grid))
    m0, a0 = envelope_min(fam41, 0.5)
    assert abs(m_grid - m0) < 1e-5 and abs(a_grid - a0) < 1e-5


def test_envelope_refuses_unvalidated_heights(fam31):
    big_t = height_threshold_T(fam31)
    with pytest.raises(DomainError):
        envelope_min(fam31, big_t + 0.1)
    env = envelope_min(fam31, big_t + 0.1, allow_unvalidated=True)
    assert not env.validated and env.status == UNVALIDATED and math.isfinite(env.m)


def test_envelope_below_threshold_subcritical(fam31):
    env = envelope_min(fam31, 0.5)
    assert env.validated and env.m < neck_threshold_M(fam31) * 10


def test_envelope_curve_tangency_and_continuity(fam41):
    ts = np.linspace(0.2, 1.3, 12)
    pts = envelope_curve(fam41, ts)
    assert all(p.status == "ok" and p.tangency_residual < 1e-5 for p in pts)
    m = np.array([p.m for p in pts])
    assert np.all(np.diff(m) > 0)
    delta = 1e-4
    close = envelope_min(fam41, 0.7 + delta).m - envelope_min(fam41, 0.7).m
    lipschitz = np.max(np.diff(m) / np.diff(ts))
    assert 0 < close < 10 * delta * lipschitz


@pytest.mark.parametrize("t0, m0, a0", ENVELOPE_41[::2])
def test_bvp_cases(fam41, t0, m0, a0):
    assert count_bvp_solutions(fam41, t0, 0.9 * m0).count == 0
    tangent = count_bvp_solutions(fam41, t0, m0)
    assert tangent.count == 1 and abs(tangent.roots[0] - a0) < 1e-6
    two = count_bvp_solutions(fam41, t0, 1.5 * m0)
    a1, a2 = two.roots
    assert two.count == 2 and a1 < a0 < a2
    assert max(two.phi_residuals) < 1e-8
    for a in two.roots:
        assert lambda_height(fam41, a, 1.5 * m0).value == pytest.approx(t0, abs=1e-12)


@pytest.mark.parametrize("factor", [0.5, 0.999, 1.001, 1.2, 3.0])
def test_counts_match_bruteforce_scan(fam41, factor):
    t0 = 0.6
    m0 = envelope_min(fam41, t0).m
    R = factor * m0
    count = count_bvp_solutions(fam41, t0, R).count
    scanned, _ = brute_count(fam41, t0, R, m0)
    assert count == scanned == (0 if factor < 1 else 2)


def test_counts_outside_validated_radius_are_flagged(fam31):
    t0 = 0.4
    R = 3 * neck_threshold_M(fam31)
    res = count_bvp_solutions(fam31, t0, R, scan_points=400)
    assert not res.validated and res.flag == OUTSIDE_DOMAIN
    # never clamped: the scan result is reported as found
    assert res.count == len(res.roots) == brute_count(fam31, t0, R, res.m0)[0]


def test_bvp_argument_checks(fam41):
    with pytest.raises(DomainError):
        count_bvp_solutions(fam41, 0.5, -1.0)
    with pytest.raises(DomainError):
        count_bvp_solutions(fam41, 2.0, 1.0)


def test_intersections_reference_values(fam41, fam31):
    (rho, t), = profile_intersections(fam41, 0.5, 1.0)
    assert rho == pytest.approx(1.4764412496138894, rel=1e-12)
    assert t == pytest.approx(0.784439102098822, rel=1e-12)
    (rho, t), = profile_intersections(fam41, 0.3, 2.0)
    assert (rho, t) == pytest.approx((2.2895257184096343, 0.7116453654114725), rel=1e-12)
    # mpmath root of lambda(0.3, rho) = lambda(0.9, rho)
    (rho, t), = profile_intersections(fam31, 0.3, 0.9)
    assert (rho, t) == pytest.approx((1.2937625491387191, 1.0361834657122203), rel=1e-12)
    assert t > 0


def test_intersections_are_symmetric_in_the_pair(fam41):
    assert profile_intersections(fam41, 1.0, 0.5) == profile_intersections(fam41, 0.5, 1.0)
    with pytest.raises(DomainError):
        profile_intersections(fam41, 0.5, 0.5)
