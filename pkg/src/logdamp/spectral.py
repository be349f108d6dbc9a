"""Mode-wise solution, asymptotic profile and remainder terms.

Fourier transforms are unnormalised, ``f̂(ξ) = ∫ e^{-ix·ξ} f(x) dx``, so the
transform of the initial velocity at zero frequency equals its mass P₁.
The initial displacement is zero throughout.

All evaluators broadcast over ``t`` and ``r``.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .kernels import one_minus_exp_ratio, sinc
from .model import ModelParams, Thresholds, compute_thresholds, r_function, root_arrays

# Past this |z| = |disc| t²/4 the three-term series is no longer used in the
# degenerate band and the sign branch takes over.
_SERIES_Z_MAX = 1e-3


class Family(enum.Enum):
    GAUSSIAN = "gaussian"
    SCALED_GAUSSIAN = "scaled_gaussian"


@dataclass(frozen=True)
class InitialDatum:
    """Radial Gaussian initial velocity ``u₁(x) = c (2πw²)^{-n/2} exp(-|x|²/(2w²))``.

    ``GAUSSIAN`` fixes the mass ``c = 1``; ``SCALED_GAUSSIAN`` takes it as
    ``amplitude``.  The transform is ``û₁(r) = c exp(-w² r²/2)``.
    """

    family: Family
    n: int
    width: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.n!r}")
        if not (self.width > 0 and math.isfinite(self.width)):
            raise DomainError("width must be positive and finite")
        if not math.isfinite(self.amplitude):
            raise DomainError("amplitude must be finite")
        if self.family is Family.GAUSSIAN and self.amplitude != 1.0:
            raise DomainError("the unit Gaussian has amplitude 1; use SCALED_GAUSSIAN")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "amplitude", float(self.amplitude))

    @property
    def p1(self):
        return self.amplitude

    @property
    def l1_norm(self):
        return abs(self.amplitude)

    def weighted_norm(self, kappa):
        """‖u₁‖ in L^{1,κ}, i.e. ∫(1 + |x|^κ)|u₁| dx, in closed form."""
        n, w = self.n, self.width
        moment = w**kappa * 2.0 ** (kappa / 2.0) * math.exp(
            math.lgamma((n + kappa) / 2.0) - math.lgamma(n / 2.0))
        return abs(self.amplitude) * (1.0 + moment)

    def transform(self, r):
        r = np.asarray(r, dtype=float)
        out = self.amplitude * np.exp(-0.5 * (self.width * r) ** 2)
        return out if out.ndim else float(out)

    def value(self, x):
        """u₁ at points of radius |x|."""
        x = np.asarray(x, dtype=float)
        w = self.width
        norm = (2.0 * math.pi * w * w) ** (-self.n / 2.0)
        out = self.amplitude * norm * np.exp(-0.5 * (x / w) ** 2)
        return out if out.ndim else float(out)

    def cutoff_radius(self, abs_tol):
        """Radius beyond which ``û₁(r)² r^{n-1}`` stays below ``abs_tol``."""
        c2 = max(self.amplitude**2, 1e-300)
        R = math.sqrt(max(math.log(c2 / abs_tol), 1.0)) / self.width
        while c2 * math.exp(-(self.width * R) ** 2) * R ** (self.n - 1) >= abs_tol:
            R *= 1.25
        return R


def gaussian(n, width=1.0):
    return InitialDatum(Family.GAUSSIAN, n, width)


def scaled_gaussian(n, width=1.0, amplitude=1.0):
    return InitialDatum(Family.SCALED_GAUSSIAN, n, width, amplitude)


def moment_bound_constant(kappa):
    """K with |1 - cos y| <= K |y|^κ for all real y, 0 < κ <= 2."""
    if not 0 < kappa <= 2:
        raise DomainError("kappa must lie in (0, 2]")
    return 2.0 ** (1.0 - kappa)


@dataclass(frozen=True)
class SpectralState:
    params: ModelParams
    datum: InitialDatum
    thresholds: Thresholds = field(default=None)

    def __post_init__(self):
        if self.datum.n != self.params.n:
            raise DomainError("datum dimension does not match the model")
        if self.thresholds is None:
            object.__setattr__(self, "thresholds", compute_thresholds(self.params))


def make_state(n, theta, width=1.0, amplitude=1.0):
    fam = Family.GAUSSIAN if amplitude == 1.0 else Family.SCALED_GAUSSIAN
    return SpectralState(ModelParams(n, theta), InitialDatum(fam, n, width, amplitude))


@dataclass(frozen=True)
class ProfileValue:
    """φ and its two diffusion parts; φ agrees with φ₁ - φ₂ up to rounding."""

    phi: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray


def _squeeze(x):
    x = np.asarray(x)
    return x if x.ndim else float(x)


def _check_tr(t, r, strict_t=False):
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("frequencies must be positive")
    if np.any(t < 0) or (strict_t and np.any(t <= 0)):
        raise DomainError("times must be positive" if strict_t else "times must be nonnegative")
    return np.broadcast_arrays(t, r)


def _series(z):
    s = 1.0 + z / 6.0 + z * z / 120.0 + z * z * z / 5040.0
    ds = 1.0 / 6.0 + z / 60.0 + z * z / 1680.0
    return s, ds


def mode_kernels(p, t, r):
    """Kernels ``(k, k_t)`` with ``û = k û₁`` and ``û_t = k_t û₁``.

    ``k = (e^{tλ₊} - e^{tλ₋})/(λ₊ - λ₋)`` in every zone:

    * real roots: ``t e^{tλ₊} (1 - e^{-2Ct})/(2Ct)``, which never forms the
      overflowing ``sinh(Ct)`` at large ``t``;
    * complex roots: ``t e^{-at} sin(bt)/(bt)``;
    * near the double root: ``t e^{-at} S(z)``, ``z = disc t²/4``, with
      ``S`` the common series of sinh(√z)/√z and sin(√-z)/√-z.
    """
    t, r = _check_tr(t, r)
    L, disc, low, high = root_arrays(r, p)
    a = 0.5 * L
    k = np.empty_like(t)
    kt = np.empty_like(t)

    z = 0.25 * disc * t * t
    use_series = ~(low | high) & (np.abs(z) <= _SERIES_Z_MAX)
    low = low | (~use_series & ~high & (disc >= 0))
    high = high | (~use_series & ~low)

    if np.any(low):
        tl, rl, Ll, dl = t[low], r[low], L[low], disc[low]
        sq = np.sqrt(dl)
        lam = -2.0 * rl * rl / (Ll + sq)
        kern = one_minus_exp_ratio(sq * tl)
        e = np.exp(tl * lam)
        k[low] = tl * e * kern
        kt[low] = e * (lam * tl * kern + np.exp(-sq * tl))
    if np.any(high):
        th, ah, dh = t[high], a[high], disc[high]
        b = 0.5 * np.sqrt(-dh)
        e = np.exp(-ah * th)
        sc = sinc(b * th)
        k[high] = th * e * sc
        kt[high] = e * (np.cos(b * th) - ah * th * sc)
    if np.any(use_series):
        ts, as_, ds, zs = t[use_series], a[use_series], disc[use_series], z[use_series]
        s, dsz = _series(zs)
        e = np.exp(-as_ * ts)
        k[use_series] = ts * e * s
        kt[use_series] = e * (s * (1.0 - as_ * ts) + dsz * ds * ts * ts / 2.0)
    return k, kt


def u_hat(state, t, r):
    """û(t, r) for the zero-displacement problem with velocity ``state.datum``."""
    k, _ = mode_kernels(state.params, t, r)
    return _squeeze(k * state.datum.transform(np.asarray(r, dtype=float)))


def u_hat_dt(state, t, r):
    _, kt = mode_kernels(state.params, t, r)
    return _squeeze(kt * state.datum.transform(np.asarray(r, dtype=float)))


def profile_parts(p, p1, t, r):
    """Arrays ``(phi, phi1, phi2)`` for mass ``p1``.

    φ₁ = P₁ e^{-r²t/L}/L and φ₂ = P₁ e^{-Lt}/L.  Their difference is formed
    from one exponential and an expm1 of the exponent gap, so it stays
    accurate when the two rates nearly coincide and as r -> 0.
    """
    t, r = _check_tr(t, r, strict_t=True)
    L = np.log1p(r ** (2.0 * p.theta))
    slow = r * r / L
    e1 = np.exp(-slow * t)
    e2 = np.exp(-L * t)
    x = t * (L - slow)
    with np.errstate(over="ignore", invalid="ignore"):
        diff = np.where(x >= 0, -e1 * np.expm1(-np.maximum(x, 0.0)),
                        e2 * np.expm1(np.minimum(x, 0.0)))
    # diff/L can be written t (1 - e^{-x})/x e^{-slow t}; this is finite as L -> 0
    small = L < 1e-300
    if np.any(small):
        diff = np.where(small, 0.0, diff)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(small, p1 * t, p1 * diff / np.where(small, 1.0, L))
        phi1 = p1 * e1 / L
        phi2 = p1 * e2 / L
    return phi, phi1, phi2


def profile_phi(state, t, r):
    phi, phi1, phi2 = profile_parts(state.params, state.datum.p1, t, r)
    return ProfileValue(_squeeze(phi), _squeeze(phi1), _squeeze(phi2))


def moment_decomposition(datum, r):
    """``(A₁, B₁, P₁)`` with ``û₁(r) = A₁ - i B₁ + P₁``.

    For real radial data the sine moment B₁ vanishes and
    A₁ = ∫(cos(x·ξ) - 1) u₁ dx = P₁ expm1(-w²r²/2).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("frequency magnitude must be nonnegative")
    a1 = datum.amplitude * np.expm1(-0.5 * (datum.width * r) ** 2)
    return _squeeze(a1), _squeeze(np.zeros_like(a1)), datum.p1


def remainder_terms(state, t, r):
    """The six terms F₁..F₆ with û - φ = F₁ + ... + F₆ on 0 < r <= η³.

    F₆ is whatever the first five leave over; it collects the λ₋ correction.
    Returns an array whose leading axis has length 6.
    """
    p = state.params
    t, r = _check_tr(t, r, strict_t=True)
    if np.any(r > state.thresholds.eta_cubed):
        raise DomainError(f"remainder terms need r <= eta^3 = {state.thresholds.eta_cubed}")
    L = np.log1p(r ** (2.0 * p.theta))
    sq = np.sqrt((L - 2.0 * r) * (L + 2.0 * r))
    lam = -2.0 * r * r / (L + sq)
    R = np.asarray(r_function(r, p))
    u1 = state.datum.transform(r)
    a1, _, p1 = moment_decomposition(state.datum, r)
    e1 = np.exp(-r * r * t / L)
    e2 = np.exp(-L * t)
    f1 = R * e1 * u1
    f2 = -R * e2 * u1
    f3 = e1 * a1 / L
    f4 = e1 * np.expm1(-lam * lam * t / L) / sq * u1
    f5 = -e2 * a1 / L
    resid = (np.asarray(u_hat(state, t, r)) - profile_parts(p, p1, t, r)[0])
    f6 = resid - (f1 + f2 + f3 + f4 + f5)
    return np.stack([f1, f2, f3, f4, f5, f6])


def ode_residual(state, t, r, h=None):
    """Normalised residual of û_tt + L û_t + r² û from 5-point differences in t.

    The residual is taken on the kernel ``k = û/û₁``: the equation is linear
    and û₁(r) is constant in t, while at high r it underflows and would leave
    only denormals to difference.  The step defaults to
    ``min(0.05/max(r, L), t/4)``, a fixed fraction of the mode's own time
    scale, so rounding in the second difference stays small for slow modes
    while fast or oscillating ones remain resolved.
    """
    t, r = float(t), float(r)
    L = math.log1p(r ** (2.0 * state.params.theta))
    if h is None:
        h = min(0.05 / max(r, L), t / 4.0)
    if not (t - 2 * h >= 0 and r > 0):
        raise DomainError("need t >= 2h and r > 0")
    u, _ = mode_kernels(state.params, t + h * np.arange(-2.0, 3.0), r)
    utt = (-u[0] + 16 * u[1] - 30 * u[2] + 16 * u[3] - u[4]) / (12 * h * h)
    ut = (u[0] - 8 * u[1] + 8 * u[3] - u[4]) / (12 * h)
    terms = (utt, L * ut, r * r * u[2])
    scale = max(abs(x) for x in terms)
    return 0.0 if scale == 0 else float(abs(sum(terms)) / scale)
