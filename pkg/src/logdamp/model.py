"""Model parameters, the damping symbol, characteristic roots and zone thresholds.

Every Fourier mode of ``u_tt - Δu + log(I + (-Δ)^θ) u_t = 0`` obeys

    û_tt + L(r) û_t + r² û = 0,      L(r) = log(1 + r^{2θ}),

whose characteristic roots are real for ``r <= δ(θ)`` and complex beyond.
"""

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, LogDampError, RootNotBracketed

#: Half-width of the degenerate band, measured on disc/L², i.e. on the squared
#: relative root gap ((λ₊ - λ₋)/(λ₊ + λ₋))².  A band on the raw discriminant
#: would swallow every r with L(r)² < TOL_DEG, far from the double root.
TOL_DEG = 1e-9

# Coefficient in the comparison inequality (2/25^3) L^2 >= 4 r^2, written as c L >= 2 r.
_BETA_COEFF = math.sqrt(2.0 / 25.0**3)


@dataclass(frozen=True)
class ModelParams:
    """Spatial dimension ``n`` and damping exponent ``theta`` in (0, 1/2)."""

    n: int
    theta: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension n must be a positive integer, got {self.n!r}")
        if not 0.0 < self.theta < 0.5:
            raise DomainError(f"theta must lie in (0, 1/2), got {self.theta!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "theta", float(self.theta))

    def symbol(self, r):
        return damping_symbol(r, self)


@dataclass(frozen=True)
class Thresholds:
    delta: float
    eta: float
    eta_cubed: float
    beta: float

    @property
    def chain_holds(self):
        return 0.0 < self.beta <= self.eta_cubed < self.eta < self.delta < 1.0


class Zone(enum.Enum):
    LOW = "low"
    DEGENERATE = "degenerate"
    HIGH = "high"


@dataclass(frozen=True)
class CharRoots:
    """Roots of λ² + L λ + r² = 0 at a single frequency.

    In the real zones ``lambda_plus``/``lambda_minus`` are set and ``gap`` is
    the half-distance ``C = sqrt(L² - 4r²)/2``.  In the complex zone the roots
    are ``-a ± i b`` with ``gap = b`` and the real roots are ``None``.
    """

    zone: Zone
    a: float
    gap: float
    lambda_plus: float | None = None
    lambda_minus: float | None = None

    @property
    def b(self):
        return self.gap if self.zone is Zone.HIGH else 0.0


def damping_symbol(r, p):
    """log(1 + r^{2θ}); vectorised, total on r >= 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("frequency magnitude must be nonnegative")
    out = np.log1p(r ** (2.0 * p.theta))
    return out if out.ndim else float(out)


def discriminant(r, p):
    """L(r)² - 4r², evaluated in factored form (L - 2r)(L + 2r)."""
    r = np.asarray(r, dtype=float)
    L = np.asarray(damping_symbol(r, p))
    out = (L - 2.0 * r) * (L + 2.0 * r)
    return out if out.ndim else float(out)


def root_arrays(r, p):
    """Vectorised root data.

    Returns ``(L, disc, low, high)`` where ``low``/``high`` are boolean masks of
    the strict real and complex zones; the rest is the degenerate band.
    """
    r = np.asarray(r, dtype=float)
    L = np.log1p(r ** (2.0 * p.theta))
    disc = (L - 2.0 * r) * (L + 2.0 * r)
    band = TOL_DEG * L * L
    return L, disc, disc >= band, disc <= -band


def char_roots(r, p):
    """Characteristic roots at a single frequency ``r > 0``."""
    r = float(r)
    if not r > 0:
        raise DomainError("char_roots requires r > 0")
    L = math.log1p(r ** (2.0 * p.theta))
    disc = (L - 2.0 * r) * (L + 2.0 * r)
    a = 0.5 * L
    band = TOL_DEG * L * L
    if disc >= band:
        sq = math.sqrt(disc)
        # λ+ through the product form avoids cancelling L against sqrt(disc)
        lam_plus = -2.0 * r * r / (L + sq)
        lam_minus = -0.5 * (L + sq)
        return CharRoots(Zone.LOW, a, 0.5 * sq, lam_plus, lam_minus)
    if disc <= -band:
        return CharRoots(Zone.HIGH, a, 0.5 * math.sqrt(-disc))
    return CharRoots(Zone.DEGENERATE, a, 0.0, -a, -a)


# --------------------------------------------------------------------------- roots


def _comparison(coeff, theta):
    """f(r) = coeff*log(1+r^{2θ}) - 2r and its derivative."""

    def f(r):
        return coeff * math.log1p(r ** (2.0 * theta)) - 2.0 * r

    def fprime(r):
        s = r ** (2.0 * theta)
        return coeff * 2.0 * theta * s / (r * (1.0 + s)) - 2.0

    return f, fprime


def bisect_newton(f, lo, hi, fprime=None, rtol=4 * np.finfo(float).eps, max_iter=4000):
    """Bracketed bisection followed by a single guarded Newton step.

    Bisection is geometric while the bracket spans more than a factor 4, so
    roots many decades below the upper end are found in a bounded number of
    steps.  Terminates when the bracket is below ``rtol`` relative width
    (which for roots of order one is well under 1e-14 absolute).
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise RootNotBracketed(f"no sign change on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}")
    for _ in range(max_iter):
        if hi - lo <= rtol * abs(hi):
            break
        mid = math.sqrt(lo * hi) if lo > 0 and hi > 4.0 * lo else 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x = lo if abs(flo) < abs(fhi) else hi
    if fprime is not None:
        d = fprime(x)
        if d != 0.0 and math.isfinite(d):
            cand = x - f(x) / d
            if lo <= cand <= hi and abs(f(cand)) <= abs(f(x)):
                x = cand
    return x


@functools.lru_cache(maxsize=256)
def compute_thresholds(p):
    """Frequency thresholds δ, η, η³ and β for the given parameters."""
    theta = p.theta
    f, fp = _comparison(1.0, theta)
    delta = bisect_newton(f, 1e-300, 1.0, fp)
    eta = 25.0 ** (-1.0 / (2.0 - 4.0 * theta))
    eta_cubed = eta**3
    fb, fbp = _comparison(_BETA_COEFF, theta)
    beta = bisect_newton(fb, 1e-300, 1.0, fbp)
    th = Thresholds(delta, eta, eta_cubed, beta)
    if not th.chain_holds:
        raise LogDampError(f"threshold chain violated for theta={theta}: {th}")
    return th


def eta_condition(r, p):
    """True where r^{2-4θ} <= 1/25, the defining inequality of η."""
    r = np.asarray(r, dtype=float)
    return r ** (2.0 - 4.0 * p.theta) <= 1.0 / 25.0


# ----------------------------------------------------------------- auxiliary g, R


def g_function(s, p):
    """g(s) = 1 + sqrt(1 - 4 s^6 / log^2(1 + s^{6θ})), with g(0) = 2.

    Defined on [0, δ]; takes values in [1, 2].
    """
    s = np.asarray(s, dtype=float)
    delta = compute_thresholds(p).delta
    if np.any(s < 0) or np.any(s > delta):
        raise DomainError(f"g is defined on [0, delta={delta}]")
    pos = s > 0
    ss = np.where(pos, s, 1.0)
    ratio = np.where(pos, 4.0 * ss**6 / np.log1p(ss ** (6.0 * p.theta)) ** 2, 0.0)
    out = 1.0 + np.sqrt(np.maximum(1.0 - ratio, 0.0))
    return out if out.ndim else float(out)


def r_function(r, p):
    """R(r) with 1/(λ+ - λ-) = 1/L(r) + R(r); defined on (0, η³]."""
    r = np.asarray(r, dtype=float)
    th = compute_thresholds(p)
    if np.any(r <= 0) or np.any(r > th.eta_cubed):
        raise DomainError(f"R is defined on (0, eta^3={th.eta_cubed}]")
    L = np.log1p(r ** (2.0 * p.theta))
    root = np.sqrt(1.0 - 4.0 * r * r / (L * L))
    out = 4.0 * r * r / (L**3 * root * (1.0 + root))
    return out if out.ndim else float(out)
