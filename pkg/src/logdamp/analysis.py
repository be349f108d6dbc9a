"""Norms, energy balance, rate fits and one-dimensional reconstruction.

Squared L² norms are computed on the Fourier side as
``ω_n ∫_0^∞ |field(t, r)|² r^{n-1} dr`` with ω_n the area of the unit sphere.
No (2π)^{-n} Plancherel factor is applied, so every reported norm carries the
same constant, which drops out of all slopes and ratios.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFit, DomainError, Divergent, RangeError
from .model import ModelParams
from .quadrature import IntegralResult, QuadratureSpec, integrate, integrate_radial
from .spectral import mode_kernels, profile_parts


class NormKind(enum.Enum):
    SOLUTION = "solution"
    PROFILE = "profile"
    PROFILE_ERROR = "profile_error"
    PHI1 = "phi1"
    PHI2 = "phi2"
    ENERGY = "energy"


class Law(enum.Enum):
    POWER = "power"
    SQRT_LOG = "sqrt_log"
    LOG_POWER = "log_power"
    EXACT_MATCH = "exact_match"


def sphere_area(n):
    """ω_n = 2π^{n/2}/Γ(n/2); ω_1 = 2 counts the two half-lines."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def time_grid(t_min, t_max, points_per_decade=4):
    """Geometric grid containing both ends, ``points_per_decade`` steps per decade."""
    if not (0 < t_min < t_max):
        raise DomainError("need 0 < t_min < t_max")
    if points_per_decade < 1:
        raise DomainError("points_per_decade must be positive")
    k = int(round(math.log10(t_max / t_min) * points_per_decade))
    return np.logspace(math.log10(t_min), math.log10(t_max), max(k, 1) + 1)


# ------------------------------------------------------------------- integrands


def _field(state, which, t):
    p, datum = state.params, state.datum

    if which is NormKind.SOLUTION:
        def f(r):
            k, _ = mode_kernels(p, t, r)
            return k * datum.transform(r)
    elif which is NormKind.PROFILE:
        def f(r):
            return profile_parts(p, datum.p1, t, r)[0]
    elif which is NormKind.PROFILE_ERROR:
        def f(r):
            k, _ = mode_kernels(p, t, r)
            return k * datum.transform(r) - profile_parts(p, datum.p1, t, r)[0]
    elif which is NormKind.PHI1:
        def f(r):
            return profile_parts(p, datum.p1, t, r)[1]
    elif which is NormKind.PHI2:
        def f(r):
            return profile_parts(p, datum.p1, t, r)[2]
    else:
        raise DomainError(f"no pointwise field for {which}")
    return f


def split_points(state, t, abs_tol=1e-14):
    """Zone boundaries, the datum cutoff and the time-dependent scales.

    ``t^{-1/(2θ)}`` is where L(r) t ~ 1, ``t^{-1/(2-2θ)}`` where r² t / L ~ 1,
    and ``t^{-2/3}`` bounds the window carrying the logarithmic mass when
    n = 1, θ = 1/4.
    """
    th = state.thresholds
    theta = state.params.theta
    pts = {th.beta, th.eta_cubed, th.eta, th.delta, 1.0, state.datum.cutoff_radius(abs_tol)}
    if t > 0:
        pts.update({t ** (-1.0 / (2.0 * theta)), t ** (-1.0 / (2.0 - 2.0 * theta)),
                    t ** (-2.0 / 3.0)})
    out = []
    for x in sorted(x for x in pts if 0 < x < math.inf):
        if not out or x > out[-1] * (1.0 + 1e-9):
            out.append(x)
    return tuple(out)


def _spec(state, t, rel_tol, abs_tol):
    return QuadratureSpec(rel_tol=rel_tol, abs_tol=abs_tol,
                          split_points=split_points(state, t, abs_tol))


def _radial(state, g, t, rel_tol, abs_tol, band=(0.0, math.inf)):
    n = state.params.n
    w = sphere_area(n)

    def h(r):
        return g(r) * r ** (n - 1)

    res = integrate_radial(h, _spec(state, t, rel_tol, abs_tol), band[0], band[1])
    return IntegralResult(w * res.value, w * res.error_estimate, res.evaluations, res.details)


def _check_divergent(state, which, t, band):
    n, theta = state.params.n, state.params.theta
    if band[0] == 0.0 and which in (NormKind.PHI1, NormKind.PHI2) and n <= 4.0 * theta:
        # φ₁, φ₂ ~ P₁ r^{-2θ} at low frequency
        raise Divergent(f"‖{which.value}‖ is infinite for n={n} <= 4θ={4 * theta}")
    if (math.isinf(band[1]) and which in (NormKind.PROFILE, NormKind.PHI2, NormKind.PROFILE_ERROR)
            and t <= n / (4.0 * theta)):
        # φ₂ ~ r^{-2θt} at high frequency
        raise Divergent(f"‖{which.value}‖ is infinite for t={t} <= n/(4θ)={n / (4 * theta)}")


def l2_norm_sq_result(state, which, t, rel_tol=1e-9, abs_tol=1e-14, band=(0.0, math.inf)):
    if not t > 0:
        raise DomainError("t must be positive")
    if which is NormKind.ENERGY:
        return energy_result(state, t, rel_tol, abs_tol, band)
    if band[0] == 0.0 or math.isinf(band[1]):
        _check_divergent(state, which, t, band)
    f = _field(state, which, t)
    return _radial(state, lambda r: f(r) ** 2, t, rel_tol, abs_tol, band)


def l2_norm_sq(state, which, t, rel_tol=1e-9, abs_tol=1e-14, band=(0.0, math.inf)):
    """Squared L² norm of a field at time ``t`` (convention-scaled).

    ``band = (lower, upper)`` restricts the frequency integral to an annulus.
    """
    return l2_norm_sq_result(state, which, t, rel_tol, abs_tol, band).value


def energy_result(state, t, rel_tol=1e-9, abs_tol=1e-14, band=(0.0, math.inf)):
    if t < 0:
        raise DomainError("t must be nonnegative")
    p, datum = state.params, state.datum

    def dens(r):
        k, kt = mode_kernels(p, t, r)
        u1 = datum.transform(r)
        return 0.5 * ((kt * u1) ** 2 + (r * k * u1) ** 2)

    return _radial(state, dens, t, rel_tol, abs_tol, band)


def energy(state, t, rel_tol=1e-9, abs_tol=1e-14):
    """½(‖u_t‖² + ‖∇u‖²), convention-scaled."""
    return energy_result(state, t, rel_tol, abs_tol).value


def dissipation_rate(state, s, rel_tol=1e-10, abs_tol=1e-15):
    """ω_n ∫ L(r) |û_t(s, r)|² r^{n-1} dr."""
    p, datum = state.params, state.datum

    def dens(r):
        _, kt = mode_kernels(p, s, r)
        L = np.log1p(r ** (2.0 * p.theta))
        return L * (kt * datum.transform(r)) ** 2

    return _radial(state, dens, s, rel_tol, abs_tol).value


@dataclass
class EnergyBalance:
    T: float
    energy_0: float
    energy_T: float
    dissipated: float

    @property
    def residual(self):
        return (self.energy_T + self.dissipated - self.energy_0) / self.energy_0


def energy_balance(state, T, rel_tol=1e-10):
    """Both sides of E(T) + ∫_0^T ‖L^{1/2} u_t‖² ds = E(0).

    The time integral is adaptive Gauss-Kronrod over panels that double in
    length, since the dissipation rate varies on an O(1) scale near s = 0 and
    on ever longer scales afterwards.
    """
    if not T > 0:
        raise DomainError("T must be positive")

    def rate(s):
        s = np.asarray(s, dtype=float)
        return np.array([dissipation_rate(state, float(x), rel_tol) for x in s.ravel()]).reshape(s.shape)

    edges = [0.0]
    step = min(T, 0.25)
    while edges[-1] < T:
        edges.append(min(T, edges[-1] + step))
        step *= 2.0
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate(rate, a, b, rel_tol=rel_tol * 10, abs_tol=0.0).value
    return EnergyBalance(T, energy(state, 0.0, rel_tol, 1e-16), energy(state, T, rel_tol, 1e-16), total)


# ---------------------------------------------------------------------- series


@dataclass
class NormSeries:
    times: np.ndarray
    values: np.ndarray
    kind: NormKind

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise DomainError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.times) <= 0) or np.any(self.times <= 0):
            raise DomainError("times must be positive and strictly increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise DomainError("values must be finite and nonnegative")

    def window(self, t_min=None, t_max=None):
        lo = -math.inf if t_min is None else t_min * (1 - 1e-12)
        hi = math.inf if t_max is None else t_max * (1 + 1e-12)
        m = (self.times >= lo) & (self.times <= hi)
        return NormSeries(self.times[m], self.values[m], self.kind)


def norm_series(state, kind, times, rel_tol=1e-9, abs_tol=1e-14):
    times = np.asarray(times, dtype=float)
    vals = [l2_norm_sq(state, kind, float(t), rel_tol, abs_tol) for t in times]
    return NormSeries(times, np.array(vals), kind)


# ------------------------------------------------------------------------ fits


@dataclass
class DecayFit:
    """Fitted law over ``window``.

    For ``POWER`` the exponent refers to the norm, i.e. half the slope of the
    squared series.  For ``SQRT_LOG`` the exponent slot holds the slope of the
    squared norm against log t.
    """

    law: Law
    exponent: float
    intercept: float
    max_rel_residual: float
    window: tuple
    details: dict = field(default_factory=dict)


MIN_FIT_POINTS = 8
MIN_FIT_DECADES = 2.0


def _fit_ready(series):
    if series.times.size < MIN_FIT_POINTS:
        raise DegenerateFit(f"need at least {MIN_FIT_POINTS} points, got {series.times.size}")
    span = math.log10(series.times[-1] / series.times[0])
    if span < MIN_FIT_DECADES - 1e-9:
        raise DegenerateFit(f"times span {span:.2f} decades, need {MIN_FIT_DECADES}")


def fit_power_law(series):
    """Least-squares slope of ½ log(values) against log(times)."""
    _fit_ready(series)
    if np.any(series.values <= 0):
        raise DegenerateFit("power-law fit needs positive values")
    x = np.log(series.times)
    y = 0.5 * np.log(series.values)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return DecayFit(Law.POWER, float(slope), float(icpt), float(np.max(np.abs(np.expm1(resid)))),
                    (float(series.times[0]), float(series.times[-1])))


def fit_sqrt_log(series):
    """Regression of values against log(times), with end-point ratios values/log t."""
    _fit_ready(series)
    if np.any(series.times <= 1):
        raise DegenerateFit("log-law fit needs times above 1")
    if np.any(series.values <= 0):
        raise DegenerateFit("log-law fit needs positive values")
    x = np.log(series.times)
    y = series.values
    slope, icpt = np.polyfit(x, y, 1)
    fitted = slope * x + icpt
    ratios = y / x
    return DecayFit(Law.SQRT_LOG, float(slope), float(icpt),
                    float(np.max(np.abs(fitted / y - 1.0))),
                    (float(series.times[0]), float(series.times[-1])),
                    {"ratio_first": float(ratios[0]), "ratio_last": float(ratios[-1]),
                     "ratio_drift": float(ratios[-1] / ratios[0] - 1.0)})


# --------------------------------------------------------------- rate tables


def solution_exponent(n, theta):
    """Exponent of ‖u(t)‖: (4θ - n)/(4(1-θ)) below the blow-up threshold, else growth.

    Returns ``None`` for the logarithmic case n = 1, θ = 1/4.
    """
    if n == 1 and theta >= 0.25:
        if theta == 0.25:
            return None
        return (4.0 * theta - 1.0) / (4.0 * theta)
    return -(n - 4.0 * theta) / (4.0 * (1.0 - theta))


def predicted_rho(n, theta):
    """Decay exponent of ‖u - φ‖ guaranteed by the remainder estimate."""
    ModelParams(n, theta)
    if theta <= 1.0 / 6.0:
        return min(n / (4.0 * (1.0 - theta)), n / (4.0 * theta))
    if theta <= 1.0 / 3.0:
        return min(n / (4.0 * (1.0 - theta)), (n - 4.0 * theta + 2.0 / 3.0) / (4.0 * theta))
    if n >= 2 and theta <= 5.0 / 12.0:
        return min((n - 1.0) / (4.0 * (1.0 - theta)), (n - 1.0) / (4.0 * theta))
    limit = "0 < θ <= 1/3" if n == 1 else "0 < θ <= 5/12"
    raise RangeError(f"remainder estimate for n={n} requires {limit}; got θ={theta}")


@dataclass
class ProfileErrorReport:
    n: int
    theta: float
    rho: float
    window: tuple
    error_fit: DecayFit
    profile_fit: DecayFit
    slack: float = 0.05

    @property
    def bound_holds(self):
        return self.error_fit.law is Law.EXACT_MATCH or self.error_fit.exponent <= -self.rho + self.slack

    @property
    def faster_than_profile(self):
        return self.error_fit.law is Law.EXACT_MATCH or self.error_fit.exponent < self.profile_fit.exponent

    @property
    def passed(self):
        return self.bound_holds and self.faster_than_profile


def profile_error_rate_check(state, window=(1e2, 1e6), points_per_decade=4,
                             rel_tol=1e-9, abs_tol=1e-14, error_series=None, profile_series=None):
    """Fit ‖u - φ‖ and ‖φ‖ over ``window`` and compare with ``predicted_rho``.

    Precomputed series may be passed to avoid recomputation.
    """
    p = state.params
    rho = predicted_rho(p.n, p.theta)
    times = time_grid(window[0], window[1], points_per_decade)
    if error_series is None:
        error_series = norm_series(state, NormKind.PROFILE_ERROR, times, rel_tol, abs_tol)
    if profile_series is None:
        profile_series = norm_series(state, NormKind.PROFILE, times, rel_tol, abs_tol)
    error_series = error_series.window(*window)
    profile_series = profile_series.window(*window)
    if np.all(error_series.values <= abs_tol):
        efit = DecayFit(Law.EXACT_MATCH, -math.inf, -math.inf, 0.0, tuple(window))
    else:
        efit = fit_power_law(error_series)
    return ProfileErrorReport(p.n, p.theta, rho, tuple(window), efit, fit_power_law(profile_series))


# -------------------------------------------------------------- reconstruction

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _reconstruction_panels(state, t):
    """Panel edges on [0, R_max]: geometric toward 0, then of width <= 0.05."""
    R = state.datum.cutoff_radius(1e-34)
    knots = sorted(x for x in split_points(state, t, 1e-34) if x < R)
    lo = min(knots[0], 1e-3) / 2.0**40
    edges = [0.0, lo]
    for a, b in zip([lo] + knots, knots + [R]):
        if b <= a:
            continue
        k = max(1, int(math.ceil(math.log2(b / a))))
        geo = a * (b / a) ** (np.arange(1, k + 1) / k)
        for x in geo:
            prev = edges[-1]
            m = max(1, int(math.ceil((x - prev) / 0.05)))
            edges.extend(prev + (x - prev) * np.arange(1, m + 1) / m)
    return np.asarray(edges)


def reconstruct_1d(state, t, xs, chunk=256):
    """u(t, x) = (1/π) ∫_0^∞ û(t, r) cos(x r) dr for n = 1.

    Composite Gauss-Legendre on panels that are geometric toward r = 0 and
    uniform at larger r; the integral is truncated where û₁ falls below
    1e-17 of its peak.  Values depend on |x| only.
    """
    if state.params.n != 1:
        raise DomainError("spatial reconstruction is implemented for n = 1 only")
    if not t > 0:
        raise DomainError("t must be positive")
    xs = np.abs(np.asarray(xs, dtype=float))
    edges = _reconstruction_panels(state, t)
    c = 0.5 * (edges[1:] + edges[:-1])
    h = 0.5 * (edges[1:] - edges[:-1])
    r = (c[:, None] + h[:, None] * _GL_NODES[None, :]).ravel()
    w = (h[:, None] * _GL_WEIGHTS[None, :]).ravel()
    k, _ = mode_kernels(state.params, t, r)
    spec = k * state.datum.transform(r) * w
    flat = xs.ravel()
    out = np.empty(flat.size)
    for i in range(0, flat.size, chunk):
        out[i:i + chunk] = np.cos(np.outer(flat[i:i + chunk], r)) @ spec
    return (out / math.pi).reshape(xs.shape)
