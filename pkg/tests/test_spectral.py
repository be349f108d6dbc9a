import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from logdamp.errors import DomainError
from logdamp.model import ModelParams, char_roots, compute_thresholds
from logdamp.spectral import (
    Family,
    InitialDatum,
    SpectralState,
    gaussian,
    make_state,
    mode_kernels,
    moment_bound_constant,
    moment_decomposition,
    ode_residual,
    profile_phi,
    remainder_terms,
    scaled_gaussian,
    u_hat,
    u_hat_dt,
)


def kernel_mp(theta, t, r):
    """(e^{tλ₊} - e^{tλ₋})/(λ₊ - λ₋) at the working precision, complex roots allowed."""
    r = mp.mpf(r)
    L = mp.log1p(r ** (2 * mp.mpf(theta)))
    sq = mp.sqrt(L * L - 4 * r * r + 0j)
    lp, lm = (-L + sq) / 2, (-L - sq) / 2
    if sq == 0:
        return t * mp.exp(-L * t / 2)
    return mp.re((mp.exp(t * lp) - mp.exp(t * lm)) / (lp - lm))


def exact_kernel(theta, t, r, dps=60):
    with mp.workdps(dps):
        return float(kernel_mp(theta, mp.mpf(t), r))


# ------------------------------------------------------------------- datum


def test_datum_moments():
    d = scaled_gaussian(2, width=0.7, amplitude=-1.5)
    assert d.p1 == -1.5
    assert d.l1_norm == 1.5
    assert d.transform(0.0) == d.p1
    assert gaussian(3).p1 == 1.0
    with pytest.raises(DomainError):
        InitialDatum(Family.GAUSSIAN, 1, 1.0, 2.0)
    with pytest.raises(DomainError):
        gaussian(1, width=0.0)


def test_datum_transform_matches_quadrature():
    d = scaled_gaussian(1, width=0.8, amplitude=2.0)
    for xi in (0.0, 0.4, 1.7, 3.0):
        ref = 2 * quad(lambda x: math.cos(x * xi) * d.value(x), 0, 40, epsabs=1e-14, limit=200)[0]
        assert d.transform(xi) == pytest.approx(ref, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weighted_norm_matches_quadrature(n):
    d = scaled_gaussian(n, width=1.3, amplitude=0.6)
    kappa = 0.4
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    ref = area * quad(lambda r: (1 + r**kappa) * abs(d.value(r)) * r ** (n - 1), 0, 60, limit=200)[0]
    assert d.weighted_norm(kappa) == pytest.approx(ref, rel=1e-10)


def test_moment_decomposition_examples():
    d = gaussian(1)
    assert moment_decomposition(d, 0.0) == (0.0, 0.0, 1.0)
    a1, b1, p1 = moment_decomposition(d, 0.8)
    assert a1 == pytest.approx(math.exp(-0.32) - 1, rel=1e-14)
    assert b1 == 0.0
    assert a1 + p1 == pytest.approx(d.transform(0.8), rel=1e-15)


def test_moment_bound_with_brute_force_oracle():
    theta = 0.2
    kappa = 2 * theta
    d = gaussian(1)
    xi = 0.3
    K = moment_bound_constant(kappa)
    # the cosine moment and the bound's integral, by direct quadrature
    a_ref = 2 * quad(lambda x: (1 - math.cos(x * xi)) * d.value(x), 0, 40, limit=200)[0]
    rhs_int = 2 * quad(lambda x: abs(x) ** kappa * d.value(x), 0, 40, limit=200)[0]
    a1, _, _ = moment_decomposition(d, xi)
    assert abs(a1) == pytest.approx(a_ref, rel=1e-10)
    assert abs(a1) <= K * xi**kappa * rhs_int
    assert abs(a1) <= K * xi**kappa * d.weighted_norm(kappa)
    # K bounds (1 - cos y)/|y|^κ on a dense sample
    y = np.linspace(1e-6, 50, 200_001)
    assert np.max((1 - np.cos(y)) / y**kappa) <= K


def test_state_checks_dimension():
    with pytest.raises(DomainError):
        SpectralState(ModelParams(2, 0.2), gaussian(1))


# ------------------------------------------------------------- solution


def test_solution_vanishes_at_start():
    s = make_state(2, 0.3)
    r = np.logspace(-6, 2, 50)
    assert np.all(u_hat(s, 0.0, r) == 0.0)
    assert np.allclose(u_hat_dt(s, 0.0, r), s.datum.transform(r), rtol=1e-15, atol=0)


def test_initial_velocity_by_difference():
    s = make_state(1, 0.2)
    h = 1e-6
    for r in (1e-3, 0.1, 0.5, 3.0):
        assert (u_hat(s, h, r) - u_hat(s, 0.0, r)) / h == pytest.approx(s.datum.transform(r), rel=1e-4)


def test_mode_equation_residual_example():
    assert ode_residual(make_state(1, 0.2), 5.0, 0.1) < 1e-6


def test_derivative_matches_central_difference():
    s = make_state(1, 0.2)
    h = 1e-5
    fd = (u_hat(s, 3 + h, 0.5) - u_hat(s, 3 - h, 0.5)) / (2 * h)
    assert u_hat_dt(s, 3.0, 0.5) == pytest.approx(fd, rel=1e-7)


def test_derivative_half_period_sign():
    p = ModelParams(1, 0.3)
    r = 2.0
    cr = char_roots(r, p)
    t = math.pi / cr.b
    k, kt = mode_kernels(p, t, r)
    assert float(k) == pytest.approx(0.0, abs=1e-15)
    assert float(kt) == pytest.approx(-math.exp(-cr.a * t), rel=1e-12)


@pytest.mark.parametrize("theta", [0.1, 0.25, 0.4])
@pytest.mark.parametrize("k", range(3, 9))
@pytest.mark.parametrize("side", [1, -1])
def test_continuity_across_double_root(theta, k, side):
    p = ModelParams(1, theta)
    r = compute_thresholds(p).delta * (1 + side * 10.0**-k)
    for t in (0.5, 7.0, 60.0):
        got = float(mode_kernels(p, t, r)[0])
        assert got == pytest.approx(exact_kernel(theta, t, r), rel=1e-9)


def test_degenerate_series_branch():
    p = ModelParams(1, 0.2)
    d = compute_thresholds(p).delta
    for t in (0.1, 3.0, 40.0):
        k, kt = mode_kernels(p, t, d)
        assert float(k) == pytest.approx(exact_kernel(0.2, t, d), rel=1e-13)
        with mp.workdps(60):
            ref_dt = mp.diff(lambda tt: kernel_mp(0.2, tt, d), mp.mpf(t))
        assert float(kt) == pytest.approx(float(ref_dt), rel=1e-8)


@pytest.mark.parametrize("t,r", [(1e6, 1e-3), (1e4, 1e-5), (50.0, 30.0), (1e8, 1e-4), (2.0, 1e-9)])
def test_kernel_against_high_precision(t, r):
    got = float(mode_kernels(ModelParams(1, 0.3), t, r)[0])
    assert got == pytest.approx(exact_kernel(0.3, t, r), rel=1e-11)


@pytest.mark.parametrize("r", [1e-3, 0.05, 0.5, 5.0])
def test_each_mode_decays(r):
    s = make_state(1, 0.2)
    t = np.logspace(2, 6, 9)
    vals = np.abs(u_hat(s, t, r))
    assert vals[-1] < 1e-3 * vals.max() + 1e-300
    assert np.all(np.isfinite(vals))


# --------------------------------------------------------------- profile


def test_profile_small_time_limit():
    s = make_state(1, 0.25)
    vals = [abs(profile_phi(s, t, 0.3).phi) for t in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-5


def test_profile_parts_at_delta():
    s = make_state(1, 0.25)
    d = s.thresholds.delta
    pv = profile_phi(s, 10.0, d)
    assert pv.phi1 > 0 and pv.phi2 > 0
    assert pv.phi == pytest.approx(pv.phi1 - pv.phi2, rel=1e-14)


def test_profile_parts_solve_first_order_equations():
    s = make_state(1, 0.2)
    t, r, h = 10.0, 0.05, 1e-4
    L = math.log1p(r**0.4)
    p1 = lambda tt: profile_phi(s, tt, r).phi1
    p2 = lambda tt: profile_phi(s, tt, r).phi2
    d1 = (p1(t + h) - p1(t - h)) / (2 * h)
    d2 = (p2(t + h) - p2(t - h)) / (2 * h)
    assert abs(r * r * p1(t) + L * d1) < 1e-8 * r * r * p1(t)
    assert abs(L * p2(t) + d2) < 1e-8 * L * p2(t)


@pytest.mark.parametrize("t,r", [(1e6, 1e-12), (1e3, 1e-6), (1e8, 1e-4), (5.0, 0.3), (40.0, 3.0)])
def test_profile_difference_against_high_precision(t, r):
    theta = 0.25
    s = make_state(1, theta)
    with mp.workdps(50):
        L = mp.log1p(mp.mpf(r) ** (2 * mp.mpf(theta)))
        ref = (mp.exp(-mp.mpf(r) ** 2 * t / L) - mp.exp(-L * t)) / L
    assert profile_phi(s, t, r).phi == pytest.approx(float(ref), rel=1e-12)


# ------------------------------------------------------------- remainder


def test_remainder_identity_and_radial_terms():
    s = make_state(2, 0.2)
    r = np.geomspace(1e-8, s.thresholds.eta_cubed, 30)
    for t in (1.0, 100.0, 1e5):
        F = remainder_terms(s, t, r)
        resid = u_hat(s, t, r) - profile_phi(s, t, r).phi
        assert F.shape == (6, r.size)
        assert np.allclose(F.sum(axis=0), resid, rtol=1e-13, atol=1e-15 * np.max(np.abs(resid)))
        a1, _, _ = moment_decomposition(s.datum, r)
        L = np.log1p(r**0.4)
        assert np.allclose(F[2], np.exp(-r * r * t / L) * a1 / L, rtol=1e-14)


def test_remainder_f4_bound():
    s = make_state(1, 0.2)
    t, r = 100.0, 1e-4
    cr = char_roots(r, s.params)
    L = math.log1p(r**0.4)
    gap = cr.lambda_plus - cr.lambda_minus
    f4 = remainder_terms(s, t, r)[3]
    bound = t * cr.lambda_plus**2 / (L * gap) * math.exp(-r * r * t / L) * s.datum.transform(r)
    assert abs(f4) <= bound


def test_remainder_domain():
    s = make_state(1, 0.2)
    with pytest.raises(DomainError):
        remainder_terms(s, 1.0, 2 * s.thresholds.eta_cubed)


# ------------------------------------------------------------- properties


@settings(max_examples=200, deadline=None)
@given(theta=st.floats(0.01, 0.49), n=st.integers(1, 3), t=st.floats(0.1, 100.0),
       logr=st.floats(math.log(1e-4), math.log(50.0)))
def test_mode_equation_residual(theta, n, t, logr):
    assert ode_residual(make_state(n, theta), t, math.exp(logr)) < 1e-5


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.0, 50.0), w=st.floats(0.1, 5.0), c=st.floats(-3, 3))
def test_moment_reconstruction(r, w, c):
    d = InitialDatum(Family.SCALED_GAUSSIAN, 2, w, c)
    a1, b1, p1 = moment_decomposition(d, r)
    assert b1 == 0.0
    # A₁ comes from expm1, so the sum is exact up to rounding on the scale of P₁
    assert abs(a1 + p1 - d.transform(r)) <= 4 * np.finfo(float).eps * abs(p1)


@settings(max_examples=150, deadline=None)
@given(theta=st.floats(0.01, 0.49), t=st.floats(1e-3, 1e7), logr=st.floats(-25, 4))
def test_profile_bounded_by_linear_growth(theta, t, logr):
    # |e^{-a t} - e^{-L t}| <= t |L - a| for a, L >= 0, with a = r²/L
    s = make_state(1, theta)
    pv = profile_phi(s, t, math.exp(logr))
    assert np.isfinite(pv.phi)
    r = math.exp(logr)
    L = math.log1p(r ** (2 * theta))
    assert abs(pv.phi) <= t * abs(L - r * r / L) / L * (1 + 1e-12) + 1e-300
