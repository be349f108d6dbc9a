"""Command-line experiment runner.

Usage::

    logdamp --command decay-fit --n 2 --theta 0.2 --out runs/decay
    logdamp --config scenario.cfg --seed 7

A config file holds flat ``key = value`` lines (``#`` starts a comment);
command-line flags override it.  Every command writes ``report.json`` and,
where it computes time series, ``series_<command>.csv`` plus two-column
``plot_<command>_<name>.dat`` files.

Exit status: 0 when every assertion passes, 1 when one fails, 2 for a bad
configuration, 3 when a computation fails.
"""

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    NormKind,
    energy_balance,
    fit_power_law,
    fit_sqrt_log,
    l2_norm_sq,
    norm_series,
    profile_error_rate_check,
    reconstruct_1d,
    solution_exponent,
    time_grid,
)
from .errors import DomainError, LogDampError, RangeError
from .model import (
    ModelParams,
    char_roots,
    compute_thresholds,
    discriminant,
    eta_condition,
    g_function,
    r_function,
)
from .quadrature import i_p, j_p, sinh_bound_supremum, weighted_power_integral
from .spectral import SpectralState, InitialDatum, Family, ode_residual

COMMANDS = ("thresholds", "simulate", "decay-fit", "profile-error", "blowup",
            "lemma-check", "energy-check", "reconstruct")

CSV_COLUMNS = ("t", "norm_solution_sq", "norm_profile_sq", "norm_error_sq", "energy")


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    n: int = 1
    theta: float = 0.2
    family: str = "gaussian"
    width: float = 1.0
    amplitude: float = 1.0
    t_min: float | None = None
    t_max: float | None = None
    fit_t_min: float | None = None
    fit_t_max: float | None = None
    points_per_decade: int = 4
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    out: str = "logdamp-out"
    seed: int = 0
    samples: int = 200


_FIELDS = tuple(ExperimentConfig.__annotations__)
_CASTS = {"command": str, "n": int, "theta": float, "family": str, "width": float,
          "amplitude": float, "t_min": float, "t_max": float, "fit_t_min": float,
          "fit_t_max": float, "points_per_decade": int, "rel_tol": float, "abs_tol": float,
          "out": str, "seed": int, "samples": int}

# default (t_min, t_max, fit_t_min, fit_t_max) per command
_WINDOWS = {
    "simulate": (1.0, 1e4, None, None),
    "decay-fit": (1e2, 1e6, 1e2, 1e6),
    "profile-error": (1e2, 1e6, 1e2, 1e6),
    "blowup": (1e2, 1e8, 1e4, 1e8),
    "energy-check": (1e-2, 1e4, None, None),
    "reconstruct": (1.0, 1.0, None, None),
}


def read_config_file(path):
    """Parse flat ``key = value`` text into a dict of strings."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def build_config(raw):
    """Validate and convert a dict of raw values."""
    unknown = set(raw) - set(_FIELDS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "command" not in raw or raw["command"] is None:
        raise ConfigError("no command given")
    vals = {}
    for key, value in raw.items():
        if value is None:
            continue
        try:
            vals[key] = _CASTS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    cmd = vals["command"]
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}; choose from {', '.join(COMMANDS)}")
    t0, t1, f0, f1 = _WINDOWS.get(cmd, (None, None, None, None))
    for key, dflt in (("t_min", t0), ("t_max", t1), ("fit_t_min", f0), ("fit_t_max", f1)):
        vals.setdefault(key, dflt)
    cfg = ExperimentConfig(**vals)
    try:
        ModelParams(cfg.n, cfg.theta)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.family not in ("gaussian", "scaled_gaussian"):
        raise ConfigError("family must be gaussian or scaled_gaussian")
    if cfg.family == "gaussian" and cfg.amplitude != 1.0:
        raise ConfigError("the gaussian family has amplitude 1; use scaled_gaussian")
    if not (cfg.width > 0 and cfg.rel_tol > 0 and cfg.abs_tol >= 0 and cfg.points_per_decade > 0
            and cfg.samples > 0):
        raise ConfigError("width, rel_tol, points_per_decade and samples must be positive")
    if cfg.t_min is not None and not 0 < cfg.t_min <= cfg.t_max:
        raise ConfigError("need 0 < t_min <= t_max")
    if cfg.fit_t_min is not None and not 0 < cfg.fit_t_min < cfg.fit_t_max:
        raise ConfigError("need 0 < fit_t_min < fit_t_max")
    return cfg


def rng_from_seed(seed):
    """Counter-based generator; every random draw in a run derives from it."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass
class Assertion:
    name: str
    predicted: object
    measured: object
    tolerance: object
    passed: bool

    def row(self):
        d = asdict(self)
        d["verdict"] = "pass" if d.pop("passed") else "fail"
        return d


def _close(name, predicted, measured, tol):
    return Assertion(name, predicted, measured, tol, bool(abs(measured - predicted) <= tol))


def _state(cfg):
    fam = Family(cfg.family)
    return SpectralState(ModelParams(cfg.n, cfg.theta), InitialDatum(fam, cfg.n, cfg.width, cfg.amplitude))


def _grid(cfg):
    return time_grid(cfg.t_min, cfg.t_max, cfg.points_per_decade)


def _series(state, cfg, kind, times):
    return norm_series(state, kind, times, cfg.rel_tol, cfg.abs_tol)


def _fit_window(series, cfg):
    return series.window(cfg.fit_t_min, cfg.fit_t_max)


# ----------------------------------------------------------------- commands


def cmd_thresholds(cfg, rng):
    p = ModelParams(cfg.n, cfg.theta)
    th = compute_thresholds(p)
    res = abs(math.log1p(th.delta ** (2 * p.theta)) - 2 * th.delta)
    r = np.exp(rng.uniform(math.log(1e-8), math.log(1e2), cfg.samples))
    r = r[np.abs(r - th.delta) > 1e-9]
    d = np.asarray(discriminant(r, p))
    partition = bool(np.all((d > 0) == (r < th.delta)))
    eta_ok = bool(eta_condition(th.eta * (1 - 1e-9), p)) and not bool(eta_condition(th.eta * (1 + 1e-9), p))
    asserts = [
        Assertion("chain beta<=eta^3<eta<delta<1", True, th.chain_holds, 0, th.chain_holds),
        Assertion("delta root residual", 0.0, res, 1e-12, res < 1e-12),
        Assertion("discriminant sign partition", True, partition, 0, partition),
        Assertion("eta sup boundary", True, eta_ok, 1e-9, eta_ok),
    ]
    payload = {"delta": th.delta, "eta": th.eta, "eta_cubed": th.eta_cubed, "beta": th.beta}
    return payload, asserts, {}


def cmd_simulate(cfg, rng):
    state = _state(cfg)
    times = _grid(cfg)
    cols = {c: [] for c in CSV_COLUMNS}
    n, theta = cfg.n, cfg.theta
    for t in times:
        t = float(t)
        cols["t"].append(t)
        cols["norm_solution_sq"].append(l2_norm_sq(state, NormKind.SOLUTION, t, cfg.rel_tol, cfg.abs_tol))
        finite = t > n / (4 * theta)
        for key, kind in (("norm_profile_sq", NormKind.PROFILE), ("norm_error_sq", NormKind.PROFILE_ERROR)):
            cols[key].append(l2_norm_sq(state, kind, t, cfg.rel_tol, cfg.abs_tol) if finite else None)
        cols["energy"].append(l2_norm_sq(state, NormKind.ENERGY, t, cfg.rel_tol, cfg.abs_tol))
    e = np.array(cols["energy"])
    asserts = [Assertion("energy nonincreasing", True, bool(np.all(np.diff(e) <= 0)), 0,
                         bool(np.all(np.diff(e) <= 0)))]
    tri, low = [], []
    for u, ph, er in zip(cols["norm_solution_sq"], cols["norm_profile_sq"], cols["norm_error_sq"]):
        if ph is None:
            continue
        tri.append(math.sqrt(u) <= math.sqrt(er) + math.sqrt(ph) + 1e-12 * math.sqrt(u))
        low.append(0.5 * ph - er <= u * (1 + 1e-12))
    if tri:
        asserts.append(Assertion("triangle |u| <= |u-phi| + |phi|", True, all(tri), 0, all(tri)))
        asserts.append(Assertion("lower bound phi^2/2 - |u-phi|^2 <= |u|^2", True, all(low), 0, all(low)))
    payload = {"points": len(times)}
    return payload, asserts, {"series": cols}


def cmd_decay_fit(cfg, rng):
    if cfg.n <= 4 * cfg.theta:
        raise ConfigError(f"decay law needs n > 4θ (got n={cfg.n}, θ={cfg.theta}); use blowup for n=1, θ>=1/4")
    state = _state(cfg)
    ser = _series(state, cfg, NormKind.SOLUTION, _grid(cfg))
    fit = fit_power_law(_fit_window(ser, cfg))
    pred = solution_exponent(cfg.n, cfg.theta)
    asserts = [_close("solution norm exponent", pred, fit.exponent, 0.03)]
    payload = {"fit": _fit_dict(fit), "predicted_exponent": pred}
    return payload, asserts, {"series": {"t": list(ser.times), "norm_solution_sq": list(ser.values)}}


def cmd_profile_error(cfg, rng):
    try:
        state = _state(cfg)
        times = _grid(cfg)
        rep = profile_error_rate_check(
            state, (cfg.fit_t_min, cfg.fit_t_max), cfg.points_per_decade, cfg.rel_tol, cfg.abs_tol,
            error_series=_series(state, cfg, NormKind.PROFILE_ERROR, times),
            profile_series=_series(state, cfg, NormKind.PROFILE, times))
    except RangeError as exc:
        raise ConfigError(str(exc)) from exc
    asserts = [
        Assertion("error exponent <= -rho + 0.05", -rep.rho + 0.05, rep.error_fit.exponent, 0.05,
                  rep.bound_holds),
        Assertion("error decays faster than profile", rep.profile_fit.exponent, rep.error_fit.exponent,
                  0, rep.faster_than_profile),
    ]
    payload = {"rho": rep.rho, "error_fit": _fit_dict(rep.error_fit),
               "profile_fit": _fit_dict(rep.profile_fit)}
    return payload, asserts, {}


def cmd_blowup(cfg, rng):
    if not (cfg.n == 1 and cfg.theta >= 0.25):
        raise ConfigError(f"growth laws hold for n = 1 and 1/4 <= θ < 1/2 (got n={cfg.n}, θ={cfg.theta})")
    state = _state(cfg)
    ser = _series(state, cfg, NormKind.SOLUTION, _grid(cfg))
    win = _fit_window(ser, cfg)
    power = fit_power_law(win)
    payload = {"power_fit": _fit_dict(power)}
    if cfg.theta == 0.25:
        logfit = fit_sqrt_log(win)
        drift = logfit.details["ratio_drift"]
        payload["sqrt_log_fit"] = _fit_dict(logfit)
        asserts = [
            Assertion("norm^2/log t endpoint drift", 0.0, drift, 0.10, abs(drift) <= 0.10),
            Assertion("power exponent magnitude", 0.0, power.exponent, 0.03, abs(power.exponent) < 0.03),
        ]
    else:
        pred = solution_exponent(1, cfg.theta)
        grows = bool(ser.values[-1] > ser.values[0])
        asserts = [_close("growth exponent", pred, power.exponent, 0.02),
                   Assertion("norm grows over the grid", True, grows, 0, grows)]
        payload["predicted_exponent"] = pred
    return payload, asserts, {"series": {"t": list(ser.times), "norm_solution_sq": list(ser.values)}}


def cmd_lemma_check(cfg, rng):
    asserts = []
    for p in (-0.5, 0.0, 1.0, 2.0):
        ts = np.logspace(3, 7, 9)
        slope = np.polyfit(np.log(ts), np.log([i_p(t, p) for t in ts]), 1)[0]
        asserts.append(_close(f"I_p slope p={p}", -(p + 1) / 2, float(slope), 0.01))
    a, b = (j_p(t, 0.0) * (t - 1) * 2.0**t for t in (40.0, 60.0))
    asserts.append(_close("J_0 (t-1) 2^t ratio t=40/60", 1.0, a / b, 0.05))
    a_, q = 2 * cfg.theta, 0.5
    lhs = weighted_power_integral(7.0, a_, q, 1.0)
    rhs = (2 / a_) * i_p(7.0, 2 * (q + 1) / a_ - 1)
    asserts.append(_close("substitution identity (rel)", 0.0, lhs / rhs - 1, 1e-9))
    p = ModelParams(cfg.n, cfg.theta)
    th = compute_thresholds(p)
    worst = 0.0
    for r in th.delta * rng.uniform(1e-6, 1 - 1e-6, cfg.samples):
        cr = char_roots(float(r), p)
        if cr.lambda_plus is None:
            continue
        L = math.log1p(r ** (2 * p.theta))
        worst = max(worst, abs((cr.lambda_plus + cr.lambda_minus) / -L - 1),
                    abs(cr.lambda_plus * cr.lambda_minus / (r * r) - 1))
    asserts.append(Assertion("Vieta relative error", 0.0, worst, 1e-12, worst < 1e-12))
    g = g_function(np.linspace(0.0, th.delta, 10_000), p)
    g_ok = bool(np.all((g >= 1) & (g <= 2)))
    asserts.append(Assertion("1 <= g <= 2", True, g_ok, 0, g_ok))
    lim13 = r_function(1e-9, ModelParams(1, 1 / 3))
    asserts.append(_close("R(1e-9), θ=1/3 (rel)", 0.0, lim13 / 2.0 - 1, 0.01))
    asserts.append(Assertion("R(1e-6), θ=0.2", 0.0, float(r_function(1e-6, ModelParams(1, 0.2))), 1e-3,
                             float(r_function(1e-6, ModelParams(1, 0.2))) < 1e-3))
    r = 1e-14
    lim512 = math.sqrt(r) * r_function(r, ModelParams(2, 5 / 12))
    asserts.append(_close("sqrt(r) R(r), θ=5/12 (rel)", 0.0, lim512 / 2.0 - 1, 0.02))
    sup = sinh_bound_supremum(np.logspace(-8, math.log10(700), 2000))
    asserts.append(Assertion("sup sinh(x)/(x e^x)", 1.0, sup, 0, sup <= 1.0))
    worst = 0.0
    for _ in range(cfg.samples):
        n = int(rng.integers(1, 4))
        theta = float(rng.uniform(0.01, 0.49))
        t = float(rng.uniform(0.1, 100))
        r = float(np.exp(rng.uniform(math.log(1e-4), math.log(50))))
        st = SpectralState(ModelParams(n, theta), InitialDatum(Family.GAUSSIAN, n))
        worst = max(worst, ode_residual(st, t, r))
    asserts.append(Assertion("mode ODE residual", 0.0, worst, 1e-5, worst < 1e-5))
    return {"samples": cfg.samples}, asserts, {}


def cmd_energy_check(cfg, rng):
    state = _state(cfg)
    asserts, rows = [], {}
    for T in (1.0, 10.0, 100.0):
        bal = energy_balance(state, T)
        rows[str(T)] = {"energy_0": bal.energy_0, "energy_T": bal.energy_T, "dissipated": bal.dissipated}
        asserts.append(Assertion(f"energy identity T={T:g}", 0.0, bal.residual, 1e-5, abs(bal.residual) < 1e-5))
    ser = _series(state, cfg, NormKind.ENERGY, _grid(cfg))
    mono = bool(np.all(np.diff(ser.values) <= 0))
    asserts.append(Assertion("energy nonincreasing", True, mono, 0, mono))
    return {"balance": rows}, asserts, {"series": {"t": list(ser.times), "energy": list(ser.values)}}


def cmd_reconstruct(cfg, rng):
    if cfg.n != 1:
        raise ConfigError("reconstruct is available for n = 1 only")
    state = _state(cfg)
    t = cfg.t_min
    xs = np.linspace(-400.0, 400.0, 16001)
    u = reconstruct_1d(state, t, xs)
    grid_l2 = float(np.sum((u[1:] ** 2 + u[:-1] ** 2) * 0.5 * np.diff(xs)))
    spec_l2 = l2_norm_sq(state, NormKind.SOLUTION, t, cfg.rel_tol, cfg.abs_tol) / (2 * math.pi)
    mirror = reconstruct_1d(state, t, -xs)
    small_t = 1e-4
    u0 = float(reconstruct_1d(state, small_t, [0.0])[0])
    ref = small_t * float(state.datum.value(0.0))
    asserts = [
        _close("Parseval ratio", 1.0, grid_l2 / spec_l2, 0.02),
        Assertion("even symmetry", 0.0, float(np.max(np.abs(u - mirror))), 0.0, bool(np.array_equal(u, mirror))),
        _close("u(t,0)/(t u1(0)) at t=1e-4", 1.0, u0 / ref, 0.01),
    ]
    return {"t": t}, asserts, {"plots": {"profile": (list(xs), list(u))}}


_DISPATCH = {
    "thresholds": cmd_thresholds,
    "simulate": cmd_simulate,
    "decay-fit": cmd_decay_fit,
    "profile-error": cmd_profile_error,
    "blowup": cmd_blowup,
    "lemma-check": cmd_lemma_check,
    "energy-check": cmd_energy_check,
    "reconstruct": cmd_reconstruct,
}


def _fit_dict(fit):
    return {"law": fit.law.value, "exponent": fit.exponent, "intercept": fit.intercept,
            "max_rel_residual": fit.max_rel_residual, "window": list(fit.window), **fit.details}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def _fmt(v):
    return "" if v is None else repr(float(v))


def write_outputs(out, command, report, extras):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps(_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n")
    stem = command.replace("-", "_")
    series = extras.get("series")
    if series:
        m = len(series["t"])
        lines = [",".join(CSV_COLUMNS)]
        for i in range(m):
            lines.append(",".join(_fmt(series[c][i]) if c in series else "" for c in CSV_COLUMNS))
        (out / f"series_{stem}.csv").write_text("\n".join(lines) + "\n")
        for c in CSV_COLUMNS[1:]:
            if c in series:
                pts = [(t, v) for t, v in zip(series["t"], series[c]) if v is not None]
                (out / f"plot_{stem}_{c}.dat").write_text(
                    "".join(f"{_fmt(t)} {_fmt(v)}\n" for t, v in pts))
    for name, (x, y) in extras.get("plots", {}).items():
        (out / f"plot_{stem}_{name}.dat").write_text(
            "".join(f"{_fmt(a)} {_fmt(b)}\n" for a, b in zip(x, y)))


def run(cfg):
    """Execute one command; returns ``(report, extras)``."""
    start = time.perf_counter()
    payload, asserts, extras = _DISPATCH[cfg.command](cfg, rng_from_seed(cfg.seed))
    report = {
        "command": cfg.command,
        "config": asdict(cfg),
        "payload": payload,
        "assertions": [a.row() for a in asserts],
        "passed": all(a.passed for a in asserts),
        "version": __version__,
        "wall_time_s": time.perf_counter() - start,
    }
    return report, extras


def make_parser():
    ap = argparse.ArgumentParser(prog="logdamp", description="Logarithmically damped wave experiments")
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--command", choices=COMMANDS)
    ap.add_argument("--n", type=int)
    ap.add_argument("--theta", type=float)
    ap.add_argument("--t-min", type=float)
    ap.add_argument("--t-max", type=float)
    ap.add_argument("--points-per-decade", type=int)
    ap.add_argument("--out")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--rel-tol", type=float)
    ap.add_argument("--abs-tol", type=float)
    return ap


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        raw = read_config_file(args.config) if args.config else {}
        for key, value in vars(args).items():
            if key != "config" and value is not None:
                raw[key] = value
        cfg = build_config(raw)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report, extras = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (LogDampError, FloatingPointError) as exc:
        print(f"compute error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    write_outputs(cfg.out, cfg.command, report, extras)
    for row in report["assertions"]:
        print(f"{row['verdict'].upper():4s}  {row['name']}: measured {row['measured']!r}, "
              f"predicted {row['predicted']!r}, tol {row['tolerance']!r}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
