import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import gamma

from logdamp.analysis import (
    Law,
    NormKind,
    NormSeries,
    energy,
    energy_balance,
    fit_power_law,
    fit_sqrt_log,
    l2_norm_sq,
    norm_series,
    predicted_rho,
    profile_error_rate_check,
    reconstruct_1d,
    solution_exponent,
    sphere_area,
    time_grid,
)
from logdamp.errors import DegenerateFit, DomainError, Divergent, RangeError
from logdamp.spectral import make_state, u_hat


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2.0, rel=1e-15)
    assert sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
    assert sphere_area(5) == pytest.approx(2 * math.pi**2.5 / gamma(2.5), rel=1e-14)


def test_time_grid():
    g = time_grid(1e2, 1e6)
    assert g.size == 17
    assert g[0] == pytest.approx(1e2) and g[-1] == pytest.approx(1e6)
    assert np.allclose(np.diff(np.log10(g)), 0.25)
    with pytest.raises(DomainError):
        time_grid(1.0, 1.0)


def test_solution_norm_against_scipy():
    s = make_state(2, 0.2)
    t = 30.0

    def f(r):
        return float(u_hat(s, t, r)) ** 2 * r

    ref = 2 * math.pi * quad(f, 0, 40, points=[s.thresholds.delta, 1.0], limit=500, epsabs=0, epsrel=1e-12)[0]
    assert l2_norm_sq(s, NormKind.SOLUTION, t) == pytest.approx(ref, rel=1e-8)


def test_small_time_solution_norm():
    s = make_state(1, 0.2)
    t = 1e-3
    # û ≈ t û₁, so ‖û‖² ≈ t² ‖û₁‖² = t² ω₁ ∫ e^{-r²} dr
    ref = t * t * 2 * math.sqrt(math.pi) / 2
    assert l2_norm_sq(s, NormKind.SOLUTION, t) == pytest.approx(ref, rel=1e-3)


def test_profile_finite_after_threshold_and_divergent_before():
    s = make_state(1, 0.25)
    for t in (1.5, 10.0, 1e4):
        v = l2_norm_sq(s, NormKind.PROFILE, t)
        assert math.isfinite(v) and v > 0
    for t in (0.3, 1.0):
        with pytest.raises(Divergent):
            l2_norm_sq(s, NormKind.PROFILE, t)


def test_phi_parts_divergent_at_low_dimension():
    s = make_state(1, 0.3)
    with pytest.raises(Divergent):
        l2_norm_sq(s, NormKind.PHI1, 10.0)
    # away from r = 0 the same field is integrable
    assert l2_norm_sq(s, NormKind.PHI1, 10.0, band=(1e-3, math.inf)) > 0


def test_profile_young_inequality():
    s = make_state(2, 0.2)
    t = 1e3
    ph = l2_norm_sq(s, NormKind.PROFILE, t)
    p1 = l2_norm_sq(s, NormKind.PHI1, t)
    p2 = l2_norm_sq(s, NormKind.PHI2, t)
    assert ph <= 2 * p1 + 2 * p2


def test_band_restriction_adds_up():
    s = make_state(2, 0.35)
    t = 5.0
    d = s.thresholds.delta
    whole = l2_norm_sq(s, NormKind.SOLUTION, t)
    parts = (l2_norm_sq(s, NormKind.SOLUTION, t, band=(0.0, d))
             + l2_norm_sq(s, NormKind.SOLUTION, t, band=(d, math.inf)))
    assert parts == pytest.approx(whole, rel=1e-8)


def test_energy_values():
    s = make_state(1, 0.2)
    # u(0) = 0, so only the velocity term: ½ ω₁ ∫ e^{-r²} dr
    assert energy(s, 0.0) == pytest.approx(0.5 * math.sqrt(math.pi), rel=1e-10)
    assert energy(s, 10.0) < energy(s, 1.0)
    with pytest.raises(DomainError):
        energy(s, -1.0)


@pytest.mark.parametrize("n,theta", [(1, 0.2), (2, 0.35)])
@pytest.mark.parametrize("T", [1.0, 10.0, 100.0])
def test_energy_identity(n, theta, T):
    bal = energy_balance(make_state(n, theta), T)
    assert abs(bal.residual) < 1e-5
    assert bal.dissipated > 0


@pytest.mark.parametrize("n,theta", [(1, 0.1), (1, 0.3), (2, 0.2), (3, 0.4)])
def test_energy_nonincreasing(n, theta):
    s = make_state(n, theta)
    e = norm_series(s, NormKind.ENERGY, time_grid(1e-2, 1e4)).values
    assert np.all(np.diff(e) <= 0)


@pytest.mark.parametrize("n,theta", [(1, 0.1), (2, 0.2), (2, 0.4)])
def test_triangle_and_lower_bound(n, theta):
    s = make_state(n, theta)
    for t in time_grid(1e1, 1e4, 2):
        t = float(t)
        u = l2_norm_sq(s, NormKind.SOLUTION, t)
        ph = l2_norm_sq(s, NormKind.PROFILE, t)
        er = l2_norm_sq(s, NormKind.PROFILE_ERROR, t)
        assert math.sqrt(u) <= math.sqrt(er) + math.sqrt(ph) + 1e-12 * math.sqrt(u)
        assert 0.5 * ph - er <= u * (1 + 1e-12)


# ------------------------------------------------------------------------ fits


def test_power_fit_synthetic():
    t = time_grid(1e2, 1e6)
    fit = fit_power_law(NormSeries(t, t**-0.75, NormKind.SOLUTION))
    assert fit.law is Law.POWER
    assert fit.exponent == pytest.approx(-0.375, abs=1e-12)
    assert fit.max_rel_residual < 1e-12


def test_sqrt_log_fit_synthetic():
    t = time_grid(1e4, 1e8)
    fit = fit_sqrt_log(NormSeries(t, 3 * np.log(t), NormKind.SOLUTION))
    assert fit.exponent == pytest.approx(3.0, rel=1e-12)
    assert abs(fit.intercept) < 1e-10
    assert abs(fit.details["ratio_drift"]) < 1e-12
    assert fit.details["ratio_first"] == pytest.approx(3.0)


def test_degenerate_fits():
    t = time_grid(1e2, 1e3, 10)
    with pytest.raises(DegenerateFit):
        fit_power_law(NormSeries(t, t**-1.0, NormKind.SOLUTION))
    t = time_grid(1e2, 1e6, 1)
    with pytest.raises(DegenerateFit):
        fit_power_law(NormSeries(t, t**-1.0, NormKind.SOLUTION))
    t = time_grid(1e2, 1e6)
    with pytest.raises(DegenerateFit):
        fit_power_law(NormSeries(t, np.zeros_like(t), NormKind.SOLUTION))
    with pytest.raises(DegenerateFit):
        fit_sqrt_log(NormSeries(time_grid(0.1, 1e3), np.ones(17), NormKind.SOLUTION))


def test_series_validation_and_window():
    with pytest.raises(DomainError):
        NormSeries([1.0, 2.0], [1.0], NormKind.SOLUTION)
    with pytest.raises(DomainError):
        NormSeries([2.0, 1.0], [1.0, 1.0], NormKind.SOLUTION)
    with pytest.raises(DomainError):
        NormSeries([1.0, 2.0], [1.0, -1.0], NormKind.SOLUTION)
    t = time_grid(1e2, 1e6)
    w = NormSeries(t, t, NormKind.SOLUTION).window(1e3, 1e5)
    assert w.times.size == 9


@settings(max_examples=100, deadline=None)
@given(a=st.floats(-3, 3), c=st.floats(1e-3, 1e3))
def test_power_fit_recovers_exponent(a, c):
    t = time_grid(1e2, 1e6)
    fit = fit_power_law(NormSeries(t, c * t ** (2 * a), NormKind.SOLUTION))
    assert fit.exponent == pytest.approx(a, abs=1e-10)


# ----------------------------------------------------------------- rate table


def test_predicted_rho_examples():
    assert predicted_rho(2, 0.2) == pytest.approx(0.625, rel=1e-15)
    assert predicted_rho(1, 0.1) == pytest.approx(1 / 3.6, rel=1e-15)
    assert predicted_rho(3, 0.4) == pytest.approx(min(2 / 2.4, 2 / 1.6))
    with pytest.raises(RangeError):
        predicted_rho(1, 0.4)
    with pytest.raises(RangeError):
        predicted_rho(2, 0.45)


def test_solution_exponent_table():
    assert solution_exponent(2, 0.2) == pytest.approx(-0.375)
    assert solution_exponent(1, 0.125) == pytest.approx(-1 / 7)
    assert solution_exponent(1, 0.3) == pytest.approx(1 / 6)
    assert solution_exponent(1, 0.25) is None


def test_exact_match_reported():
    s = make_state(2, 0.2)
    t = time_grid(1e2, 1e6)
    zero = NormSeries(t, np.zeros_like(t), NormKind.PROFILE_ERROR)
    prof = NormSeries(t, t**-0.75, NormKind.PROFILE)
    rep = profile_error_rate_check(s, error_series=zero, profile_series=prof)
    assert rep.error_fit.law is Law.EXACT_MATCH
    assert rep.passed


def test_profile_error_check_range():
    with pytest.raises(RangeError):
        profile_error_rate_check(make_state(1, 0.4))


def test_profile_parts_rates():
    s = make_state(2, 0.2)
    t = time_grid(1e2, 1e6)
    p1 = fit_power_law(norm_series(s, NormKind.PHI1, t))
    p2 = fit_power_law(norm_series(s, NormKind.PHI2, t))
    # squared-norm exponents are twice the fitted norm exponents
    assert 2 * p1.exponent == pytest.approx(-(2 - 0.8) / 1.6, abs=0.05)
    assert 2 * p2.exponent == pytest.approx(-(2 - 0.8) / 0.4, abs=0.05)


def test_critical_error_grows_slower_than_log():
    s = make_state(1, 0.25)
    t = time_grid(1e4, 1e8)
    ratio = norm_series(s, NormKind.PROFILE_ERROR, t).values / np.log(t)
    assert np.all(np.diff(ratio) < 0)
    assert ratio[-1] < 1e-3 * ratio[0]


@pytest.mark.parametrize("n,theta", [(1, 0.1), (1, 0.2), (2, 0.2)])
def test_high_zone_decays_exponentially(n, theta):
    s = make_state(n, theta)
    d = s.thresholds.delta
    t = np.linspace(10, 50, 9)
    v = [l2_norm_sq(s, NormKind.SOLUTION, float(x), band=(d, math.inf)) for x in t]
    slope = np.polyfit(np.log(t), np.log(v), 1)[0]
    assert slope < -5


# -------------------------------------------------------------- reconstruction


def test_reconstruction_symmetry_and_small_time():
    s = make_state(1, 0.2)
    xs = np.linspace(-20, 20, 401)
    u = reconstruct_1d(s, 1.0, xs)
    assert np.array_equal(u, reconstruct_1d(s, 1.0, -xs))
    t = 1e-4
    assert reconstruct_1d(s, t, [0.0])[0] == pytest.approx(t * s.datum.value(0.0), rel=1e-2)


def test_reconstruction_parseval():
    s = make_state(1, 0.2)
    xs = np.linspace(-400, 400, 16001)
    u = reconstruct_1d(s, 1.0, xs)
    grid = np.sum((u[1:] ** 2 + u[:-1] ** 2) * 0.5 * np.diff(xs))
    assert grid / (l2_norm_sq(s, NormKind.SOLUTION, 1.0) / (2 * math.pi)) == pytest.approx(1.0, abs=0.02)


def test_reconstruction_mass():
    s = make_state(1, 0.2)
    t = 0.01
    xs = np.linspace(-400, 400, 16001)
    u = reconstruct_1d(s, t, xs)
    mass = np.sum((u[1:] + u[:-1]) * 0.5 * np.diff(xs))
    k0 = float(u_hat(s, t, 1e-12))
    assert mass == pytest.approx(k0, rel=1e-2)


def test_reconstruction_matches_direct_cosine_transform():
    s = make_state(1, 0.3)
    t = 2.0
    for x in (0.0, 1.5, 7.0):
        ref = quad(lambda r: float(u_hat(s, t, r)) * math.cos(x * r), 0, 12, limit=400, epsabs=1e-15)[0] / math.pi
        assert reconstruct_1d(s, t, [x])[0] == pytest.approx(ref, abs=1e-10)


def test_reconstruction_rejects_higher_dimension():
    with pytest.raises(DomainError):
        reconstruct_1d(make_state(2, 0.2), 1.0, [0.0])
