"""Adaptive radial quadrature and the reference integrals I_p, J_p.

Integrals over (0, ∞) are split at user-supplied points.  Finite segments
with a positive left end are integrated in the variable ``s = log r`` on
octave panels, refined by a vectorised adaptive Gauss-Kronrod (7, 15) rule.
A segment touching r = 0 is graded geometrically: panels [b 2^{-k-1}, b 2^{-k}]
are added until their contribution drops below the tolerance; the same
doubling is used outward for an infinite upper end.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, Divergent, NonFiniteIntegrand, ToleranceNotMet
from .kernels import sinh_exp_ratio

# Gauss-Kronrod 7-15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])           # 15 nodes, ascending
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5]] = _WG[:3]
_GWEIGHTS[7] = _WG[3]
_GWEIGHTS[[9, 11, 13]] = _WG[2::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and splitting for :func:`integrate_radial`.

    ``tail_cutoff_rule`` optionally maps ``(t, datum)`` to a truncation radius;
    callers that know their integrand decays (e.g. through a Gaussian datum)
    use it to supply the last split point.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    split_points: Sequence[float] = ()
    tail_cutoff_rule: Callable | None = None
    max_panels: int = 40000
    min_grading_levels: int = 4

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol >= 0):
            raise ValueError("rel_tol must be positive and abs_tol nonnegative")
        pts = tuple(float(x) for x in self.split_points)
        if any(x <= 0 for x in pts) or any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("split_points must be positive and strictly increasing")
        object.__setattr__(self, "split_points", pts)


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int = 0
    details: dict = field(default_factory=dict, repr=False)


class _Counter:
    def __init__(self, f):
        self.f = f
        self.count = 0

    def __call__(self, x):
        self.count += x.size
        y = np.asarray(self.f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
        if not np.all(np.isfinite(y)):
            raise NonFiniteIntegrand("integrand returned a non-finite value")
        return y


def _gk15(g, lo, hi):
    """Kronrod estimates and QUADPACK-style error for arrays of intervals."""
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * _NODES[None, :]
    fx = g(x)
    resk = fx @ _KWEIGHTS
    resg = fx @ _GWEIGHTS
    mean = 0.5 * resk
    resasc = np.abs(fx - mean[:, None]) @ _KWEIGHTS
    resabs = np.abs(fx) @ _KWEIGHTS
    err = np.abs(resk - resg) * np.abs(h)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(resasc * np.abs(h) > 0,
                         np.minimum(1.0, (200.0 * err / (resasc * np.abs(h))) ** 1.5), 1.0)
    err = np.where(resasc > 0, resasc * np.abs(h) * scale, err)
    err = np.maximum(err, 50.0 * _EPS * resabs * np.abs(h))
    return resk * h, err


def _adaptive(g, lo, hi, rel_tol, abs_tol, max_panels):
    """Globally adaptive GK15 over a batch of starting panels.

    Returns per-starting-panel sums of values and errors so callers can
    attribute contributions to the original panels.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    owner = np.arange(lo.size)
    val, err = _gk15(g, lo, hi)
    while True:
        total = val.sum()
        budget = max(abs_tol, rel_tol * abs(total))
        etot = err.sum()
        if etot <= budget:
            break
        if lo.size >= max_panels:
            raise ToleranceNotMet(
                f"error estimate {etot:.3e} exceeds budget {budget:.3e} after {lo.size} panels")
        # refine panels whose error density exceeds the uniform share of the budget
        width = hi - lo
        share = budget * width / width.sum()
        split = err > 0.5 * share
        if not np.any(split):
            split = err >= err.max()
        mid = 0.5 * (lo[split] + hi[split])
        if np.any((mid <= lo[split]) | (mid >= hi[split])):
            raise ToleranceNotMet("panels cannot be subdivided further")
        nlo = np.concatenate([lo[split], mid])
        nhi = np.concatenate([mid, hi[split]])
        nown = np.concatenate([owner[split], owner[split]])
        nval, nerr = _gk15(g, nlo, nhi)
        keep = ~split
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        owner = np.concatenate([owner[keep], nown])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])
    nstart = int(owner.max()) + 1 if owner.size else 0
    # fixed-order reduction per starting panel, so results are reproducible
    order = np.lexsort((lo, owner))
    vsum = np.zeros(nstart)
    esum = np.zeros(nstart)
    np.add.at(vsum, owner[order], val[order])
    np.add.at(esum, owner[order], err[order])
    return vsum, esum


def _log_integrand(f):
    def g(s):
        r = np.exp(s)
        return f(r) * r

    return g


def _octaves(a, b):
    """Log-space panel edges covering [a, b] with roughly octave spacing."""
    la, lb = math.log(a), math.log(b)
    k = max(1, int(math.ceil((lb - la) / math.log(2.0))))
    return np.linspace(la, lb, k + 1)


def integrate(f, a, b, rel_tol=1e-9, abs_tol=1e-14, panels=1, max_panels=40000):
    """Adaptive GK15 integral of a vectorised ``f`` over a finite interval [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integrate requires finite limits")
    if a == b:
        return IntegralResult(0.0, 0.0, 0)
    fc = _Counter(f)
    edges = np.linspace(a, b, panels + 1)
    v, e = _adaptive(fc, edges[:-1], edges[1:], rel_tol, abs_tol, max_panels)
    return IntegralResult(float(v.sum()), float(e.sum()), fc.count)


def _graded(g, anchor, direction, spec, main_value, batch=12, max_levels=1000):
    """Geometric panels leaving ``anchor`` toward 0 (direction -1) or ∞ (+1).

    Stops once the per-level contribution is below the tolerance, has been
    nonincreasing over three levels, and at least ``spec.min_grading_levels``
    levels were taken.  The remaining tail is extrapolated geometrically from
    the last two levels.
    """
    ln2 = math.log(2.0)
    s0 = math.log(anchor)
    contrib, errs = [], []
    while len(contrib) < max_levels:
        ks = np.arange(len(contrib), len(contrib) + batch)
        if direction < 0:
            lo, hi = s0 - (ks + 1) * ln2, s0 - ks * ln2
        else:
            lo, hi = s0 + ks * ln2, s0 + (ks + 1) * ln2
        v, e = _adaptive(g, lo, hi, spec.rel_tol, spec.abs_tol * 1e-3, spec.max_panels)
        for vi, ei in zip(v, e):
            contrib.append(float(vi))
            errs.append(float(ei))
            if len(contrib) < max(3, spec.min_grading_levels):
                continue
            running = abs(main_value + sum(contrib))
            thresh = max(spec.abs_tol, 0.1 * spec.rel_tol * running)
            c1, c2, c3 = (abs(x) for x in contrib[-3:])
            if not (c3 <= thresh and c3 <= c2 <= c1):
                continue
            q = c3 / c2 if c2 > 0 else 0.0
            tail = contrib[-1] * q / (1.0 - q) if q < 1.0 else math.inf
            if abs(tail) > max(spec.abs_tol, spec.rel_tol * running):
                continue
            err = sum(errs) + 0.5 * abs(tail)
            return sum(contrib) + tail, err, len(contrib)
    raise Divergent(
        f"graded panels toward {'0' if direction < 0 else 'infinity'} did not converge "
        f"after {max_levels} levels")


def integrate_radial(f, spec=QuadratureSpec(), lower=0.0, upper=math.inf, anchor=None):
    """∫_lower^upper f(r) dr for a vectorised integrand on r > 0.

    ``f`` may carry an integrable power or logarithmic singularity at 0.
    Split points outside (lower, upper) are ignored.
    """
    if lower < 0 or not upper > lower:
        raise DomainError("need 0 <= lower < upper")
    fc = _Counter(f)
    g = _log_integrand(fc)
    pts = [x for x in spec.split_points if lower < x < upper]
    if not pts and (lower == 0 or math.isinf(upper)):
        if anchor is None:
            anchor = 1.0 if (lower < 1.0 < upper) else (
                2.0 * lower if math.isinf(upper) else 0.5 * upper)
        pts = [anchor]
    inner = ([lower] if lower > 0 else []) + pts + ([upper] if math.isfinite(upper) else [])
    edges = []
    for a, b in zip(inner[:-1], inner[1:]):
        e = _octaves(a, b)
        edges.append(np.column_stack([e[:-1], e[1:]]))
    main_v = main_e = 0.0
    if edges:
        panels = np.concatenate(edges)
        v, e = _adaptive(g, panels[:, 0], panels[:, 1], spec.rel_tol, spec.abs_tol, spec.max_panels)
        main_v, main_e = float(v.sum()), float(e.sum())
    details = {}
    value, err = main_v, main_e
    if lower == 0:
        tv, te, lv = _graded(g, inner[0], -1, spec, value)
        value += tv
        err += te
        details["levels_to_zero"] = lv
    if math.isinf(upper):
        tv, te, lv = _graded(g, inner[-1], +1, spec, value)
        value += tv
        err += te
        details["levels_to_infinity"] = lv
    budget = spec.rel_tol * abs(value) + spec.abs_tol
    if err > budget:
        raise ToleranceNotMet(f"error estimate {err:.3e} exceeds {budget:.3e}")
    return IntegralResult(value, err, fc.count, details)


# ------------------------------------------------------------- reference integrals


def _power_damped(t, a, q):
    def f(r):
        return np.exp(-t * np.log1p(r**a)) * r**q

    return f


def _scale_points(t, a, upper):
    base = t ** (-1.0 / a)
    return tuple(x for x in (base / 16.0, base, 16.0 * base) if x < upper)


def weighted_power_integral(t, a, q, upper=1.0, rel_tol=1e-11):
    """∫_0^upper (1 + r^a)^{-t} r^q dr, computed as exp(-t log1p(r^a)) r^q."""
    if q <= -1:
        raise DomainError("q must exceed -1")
    if not (t > 0 and a > 0 and 0 < upper <= 1):
        raise DomainError("need t > 0, a > 0 and upper in (0, 1]")
    spec = QuadratureSpec(rel_tol=rel_tol, abs_tol=0.0,
                          split_points=_scale_points(t, a, upper))
    return integrate_radial(_power_damped(t, a, q), spec, 0.0, upper).value


def i_p(t, p, rel_tol=1e-11):
    """I_p(t) = ∫_0^1 (1+r²)^{-t} r^p dr, p > -1."""
    if p <= -1:
        raise DomainError("I_p requires p > -1")
    if t <= 0:
        raise DomainError("I_p requires t > 0")
    return weighted_power_integral(t, 2.0, p, 1.0, rel_tol)


def j_p(t, p, rel_tol=1e-11):
    """J_p(t) = ∫_1^∞ (1+r²)^{-t} r^p dr, convergent iff t > (p+1)/2."""
    if t <= (p + 1.0) / 2.0:
        raise Divergent(f"J_p diverges for t={t} <= (p+1)/2={(p + 1) / 2}")
    if t <= 1:
        raise DomainError("J_p is considered for t > 1")
    pts = tuple(1.0 + k / t for k in (0.25, 1.0, 4.0, 16.0))
    spec = QuadratureSpec(rel_tol=rel_tol, abs_tol=0.0, split_points=pts)
    return integrate_radial(_power_damped(t, 2.0, p), spec, 1.0, math.inf).value


def middle_band_bound_check(t, eta_low, p):
    """Value of ∫_{eta_low}^1 (1+r²)^{-t} r^p dr and the bound C (1+eta_low²)^{-t}.

    C is calibrated at t = 1, i.e. C = (1+eta_low²) ∫_{eta_low}^1 (1+r²)^{-1} r^p dr,
    which makes the bound valid for every t >= 1.
    """
    if not 0 < eta_low <= 1:
        raise DomainError("eta_low must lie in (0, 1]")
    if eta_low == 1.0:
        return 0.0, 0.0

    def value(s):
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=0.0)
        return integrate_radial(_power_damped(s, 2.0, p), spec, eta_low, 1.0).value

    c = value(1.0) * (1.0 + eta_low**2)
    return value(t), c * (1.0 + eta_low**2) ** (-t)


def sinh_bound_supremum(x):
    """Empirical sup of sinh(x)/(x e^x) over the sample points ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("sample points must be positive")
    return float(np.max(sinh_exp_ratio(x)))
