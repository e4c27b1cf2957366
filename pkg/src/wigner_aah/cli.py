"""Command line front end.

    wigner-aah COMMAND [options]

Commands: portrait, flow, quantifiers, equilibria, scan, threshold,
trajectory, verify.  Options may also come from a flat JSON file given with
``--config``; flags override file values, file values override defaults.

Exit status: 0 on success, 1 on a usage error, 2 on a solver, integration or
verification failure.
"""

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from wigner_aah import __version__
from wigner_aah.dynamics import FieldKind, integrate
from wigner_aah.equilibrium import (
    BracketError,
    SolverError,
    Stability,
    classify,
    equilibrium_report,
    find_equilibria,
    find_equilibrium,
    jacobian_at,
    saddle_threshold,
    stability_scan,
    symmetric_guess,
)
from wigner_aah.model import (
    AahParams,
    EnergyClass,
    PhaseState,
    aah_energy,
    classify_energy,
)
from wigner_aah.numerics import DomainError, IntegrationError
from wigner_aah.svg import class_map_svg, curves_svg, vector_field_svg
from wigner_aah.wigner import (
    GaussianEnsemble,
    aah_closure,
    current_jk,
    current_jx,
    flow_sample,
    gaussian_value,
    liouvillianity,
    liouvillianity_quotient,
    series_div_currents,
    div_jx,
    div_jk,
    stationarity,
    velocity,
)

__all__ = ["RunConfig", "UsageError", "main", "parse_config", "run"]

COMMANDS = (
    "portrait",
    "flow",
    "quantifiers",
    "equilibria",
    "scan",
    "threshold",
    "trajectory",
    "verify",
)
FORMATS = {
    "portrait": ("csv", "json", "svg"),
    "flow": ("csv", "json", "svg"),
    "quantifiers": ("csv", "json", "svg"),
    "equilibria": ("csv", "json"),
    "scan": ("csv", "json", "svg"),
    "threshold": ("json",),
    "trajectory": ("csv", "json", "svg"),
    "verify": ("json",),
}
THREADS_ENV = "WIGNER_AAH_THREADS"

FLOW_COLUMNS = ("x", "k", "density", "j_x", "j_k", "div_j", "div_w")
SCAN_COLUMNS = ("alpha", "a", "x_eq", "k_eq", "trace", "det", "delta", "class", "residual")
TRAJECTORY_COLUMNS = ("tau", "x", "k", "energy")
THRESHOLD_KEYS = ("w", "alpha_star", "alpha_star_perturbative", "bracket", "iterations")

# tolerances of the verify report
SERIES_TOL = 1e-9
CONTINUITY_TOL = 1e-6
QUOTIENT_TOL = 1e-9
JACOBIAN_TOL = 1e-6


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    a: float = 1.0
    w: float = 0.4
    alpha: float = 0.5
    x_range: Tuple[float, float] = (-math.pi, math.pi)
    k_range: Tuple[float, float] = (-math.pi, math.pi)
    nx: int = 101
    nk: int = 101
    step: float = 1e-3
    horizon: float = 200.0
    alpha_range: Tuple[float, float, int] = (0.0, 4.0, 81)
    a_range: Tuple[float, float, int] = (0.5, 1.5, 41)
    bracket: Tuple[float, float] = (1.5, 3.5)
    n: int = 32
    tol: float = 1e-9
    field: str = "quantum"
    x0: Optional[float] = None
    k0: Optional[float] = None
    stride: Optional[int] = None
    speed_threshold: Optional[float] = None
    exhaustive: bool = False
    vector: str = "velocity"
    background: Optional[str] = None
    output: str = "-"
    format: Optional[str] = None
    workers: Optional[int] = None

    @property
    def params(self):
        return AahParams(a=self.a, w=self.w)

    @property
    def ensemble(self):
        return GaussianEnsemble(self.alpha)

    @property
    def xs(self):
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    @property
    def ks(self):
        return np.linspace(self.k_range[0], self.k_range[1], self.nk)


# -- value conversion (shared by flags and config file) ----------------------


def _number(key, value):
    if isinstance(value, bool):
        raise UsageError(f"{key}: expected a number, got {value!r}")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise UsageError(f"{key}: value must be finite, got {value!r}")
    return out


def _positive(key, value):
    out = _number(key, value)
    if out <= 0:
        raise UsageError(f"{key}: must be positive, got {value!r}")
    return out


def _nonneg(key, value):
    out = _number(key, value)
    if out < 0:
        raise UsageError(f"{key}: must be non-negative, got {value!r}")
    return out


def _integer(lo, hi=None):
    def conv(key, value):
        if isinstance(value, bool):
            raise UsageError(f"{key}: expected an integer, got {value!r}")
        try:
            out = int(value) if not isinstance(value, float) else None
        except (TypeError, ValueError):
            out = None
        if out is None or (isinstance(value, float) and value != int(value)):
            raise UsageError(f"{key}: expected an integer, got {value!r}")
        if out < lo or (hi is not None and out > hi):
            bound = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
            raise UsageError(f"{key}: must be {bound}, got {value!r}")
        return out

    return conv


def _parts(key, value, count):
    if isinstance(value, str):
        parts = value.split(":")
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise UsageError(f"{key}: expected {count} ':'-separated values, got {value!r}")
    if len(parts) != count:
        raise UsageError(f"{key}: expected {count} ':'-separated values, got {value!r}")
    return parts


def _interval(key, value):
    lo, hi = (_number(key, p) for p in _parts(key, value, 2))
    if not lo < hi:
        raise UsageError(f"{key}: range must be ordered lo < hi, got {value!r}")
    return (lo, hi)


def _sweep(min_lo, strict):
    def conv(key, value):
        lo_s, hi_s, n_s = _parts(key, value, 3)
        lo, hi = _number(key, lo_s), _number(key, hi_s)
        n = _integer(2)(key, n_s)
        if not lo < hi:
            raise UsageError(f"{key}: range must be ordered lo < hi, got {value!r}")
        if lo < min_lo or (strict and lo <= min_lo):
            rel = ">" if strict else ">="
            raise UsageError(f"{key}: lower end must be {rel} {min_lo}, got {lo}")
        return (lo, hi, n)

    return conv


def _choice(*options):
    def conv(key, value):
        if value not in options:
            raise UsageError(f"{key}: must be one of {', '.join(options)}, got {value!r}")
        return value

    return conv


def _flag(key, value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false"):
        return value.lower() == "true"
    raise UsageError(f"{key}: expected true/false, got {value!r}")


def _text(key, value):
    if not isinstance(value, str) or not value:
        raise UsageError(f"{key}: expected a non-empty string, got {value!r}")
    return value


CONVERTERS = {
    "command": _choice(*COMMANDS),
    "a": _positive,
    "w": _number,
    "alpha": _positive,
    "x_range": _interval,
    "k_range": _interval,
    "nx": _integer(2),
    "nk": _integer(2),
    "step": _positive,
    "horizon": _positive,
    "alpha_range": _sweep(0.0, strict=False),
    "a_range": _sweep(0.0, strict=True),
    "bracket": _interval,
    "n": _integer(0, 64),
    "tol": _positive,
    "field": _choice("quantum", "classical"),
    "x0": _number,
    "k0": _number,
    "stride": _integer(1),
    "speed_threshold": _nonneg,
    "exhaustive": _flag,
    "vector": _choice("velocity", "current"),
    "background": _choice("div_j", "div_w", "density"),
    "output": _text,
    "format": _choice("csv", "json", "svg"),
    "workers": _integer(1),
}
assert set(CONVERTERS) == {f.name for f in fields(RunConfig)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    p = _Parser(prog="wigner-aah", description=__doc__.split("\n\n")[0])
    p.add_argument("command", nargs="?", default=argparse.SUPPRESS, help=", ".join(COMMANDS))
    p.add_argument("--config", default=None, help="JSON file with option values")
    sup = argparse.SUPPRESS
    for key in CONVERTERS:
        if key == "command":
            continue
        flag = "--" + key.replace("_", "-")
        if key == "exhaustive":
            p.add_argument(flag, dest=key, action="store_const", const=True, default=sup)
        elif key == "output":
            p.add_argument("-o", flag, dest=key, default=sup)
        else:
            p.add_argument(flag, dest=key, default=sup)
    p.add_argument("--version", action="version", version=f"wigner-aah {__version__}")
    return p


def parse_config(argv=None, config_file=None) -> RunConfig:
    """Merge defaults, an optional JSON config file and command line flags.

    Raises :class:`UsageError` naming the offending key on any malformed or
    unknown value, or when no command is given.
    """
    ns = vars(_build_parser().parse_args(argv if argv is not None else []))
    path = ns.pop("config", None) or config_file
    values = {}
    if path is not None:
        try:
            with open(path) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError(f"config file {path} must hold a JSON object")
        unknown = sorted(set(loaded) - set(CONVERTERS))
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        values.update(loaded)
    values.update(ns)
    if "command" not in values:
        raise UsageError(f"missing command; choose one of {', '.join(COMMANDS)}")
    converted = {}
    for key, value in values.items():
        if value is None and key not in ("command",):
            continue
        converted[key] = CONVERTERS[key](key, value)
    cfg = RunConfig(**converted)
    fmt = cfg.format or _infer_format(cfg)
    if fmt not in FORMATS[cfg.command]:
        raise UsageError(
            f"format: {cfg.command} supports {', '.join(FORMATS[cfg.command])}, got {fmt!r}"
        )
    return replace(cfg, format=fmt)


def _infer_format(cfg):
    ext = os.path.splitext(cfg.output)[1].lstrip(".").lower()
    if ext in ("csv", "json", "svg"):
        return ext
    return FORMATS[cfg.command][0]


def resolve_workers(cfg: RunConfig) -> int:
    if cfg.workers is not None:
        return cfg.workers
    env = os.environ.get(THREADS_ENV)
    if env:
        return _integer(1)(THREADS_ENV, env)
    return os.cpu_count() or 1


# -- serialization -----------------------------------------------------------


def fmt_float(v):
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return ""
    if isinstance(v, (bool, str)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(stream, columns, rows):
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(fmt_float(v) for v in row) + "\n")


def dump_json(obj, indent=0):
    """JSON with every float written to 17 significant digits (NaN -> null)."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dump_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dump_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    return json.dumps(str(obj))


def _rows_as_records(columns, rows):
    return [
        {c: (None if isinstance(v, float) and not math.isfinite(v) else v) for c, v in zip(columns, row)}
        for row in rows
    ]


# -- grid evaluation ---------------------------------------------------------


def _grid_row(args):
    alpha, a, w, x, ks = args
    ens, params = GaussianEnsemble(alpha), AahParams(a=a, w=w)
    out = []
    for k in ks:
        s = PhaseState(x, k)
        sample = flow_sample(ens, params, s)
        try:
            ox, ok = velocity(ens, params, s)
        except DomainError:
            ox = ok = math.nan
        out.append((sample, ox, ok))
    return out


def evaluate_grid(cfg: RunConfig, workers: int):
    """Row-major ``[(x, k, FlowSample, omega_x, omega_k), ...]``."""
    ks = [float(k) for k in cfg.ks]
    xs = [float(x) for x in cfg.xs]
    jobs = [(cfg.alpha, cfg.a, cfg.w, x, ks) for x in xs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_grid_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_grid_row(job) for job in jobs]
    return [
        (x, k, sample, ox, ok)
        for x, row in zip(xs, rows)
        for k, (sample, ox, ok) in zip(ks, row)
    ]


def _grid_arrays(cfg, grid, key):
    arr = np.array([key(item) for item in grid], dtype=float)
    return arr.reshape(cfg.nx, cfg.nk)


# -- commands ----------------------------------------------------------------


def _portrait_levels(params):
    """Fixed levels, plus one open and one separatrix level per sign when the
    pure Harper pattern has open orbits (w = 0, a > 1)."""
    levels = {2.5, 2.0, 1.5, 1.0, 0.5, 0.0, -0.5, -1.0, -1.5, -2.0, -2.5}
    gap = params.a2 - 1.0
    if params.w == 0 and gap > 0:
        levels |= {gap, -gap, 0.5 * gap, -0.5 * gap}
    return sorted(levels, reverse=True)


def _diagonal_seed(params, eps):
    ts = np.linspace(0.0, math.pi, 257)
    vals = [aah_energy(params, PhaseState(t, t)) - eps for t in ts]
    for t0, t1, f0, f1 in zip(ts, ts[1:], vals, vals[1:]):
        if f0 == 0:
            return PhaseState(t0, t0)
        if f0 * f1 < 0:
            t = brentq(lambda t: aah_energy(params, PhaseState(t, t)) - eps, t0, t1, xtol=1e-14)
            return PhaseState(t, t)
    return None


PORTRAIT_COLORS = {
    EnergyClass.CLOSED_POSITIVE: "#000000",
    EnergyClass.CLOSED_NEGATIVE: "#d7191c",
    EnergyClass.OPEN: "#2c7bb6",
    EnergyClass.THRESHOLD: "#1a9641",
    EnergyClass.OUT_OF_RANGE: "#999999",
    None: "#555555",
}


def cmd_portrait(cfg, out):
    params = cfg.params
    stride = cfg.stride or 100
    curves = []
    for eps in _portrait_levels(params):
        seed = _diagonal_seed(params, eps)
        if seed is None:
            continue
        eclass = classify_energy(params, eps) if params.w == 0 else None
        traj = integrate(FieldKind.CLASSICAL, None, params, seed, cfg.step, cfg.horizon)
        curves.append((eps, eclass, traj))
    label = lambda c: "unclassified" if c is None else c.value
    if cfg.format == "svg":
        payload = [(traj.states[::stride], PORTRAIT_COLORS[c]) for _, c, traj in curves]
        out.write(
            curves_svg(
                payload,
                cfg.x_range,
                cfg.k_range,
                f"classical AAH portrait a={cfg.a:g} w={cfg.w:g}",
                __version__,
            )
        )
        return 0
    columns = ("eps", "class", "tau", "x", "k")
    rows = [
        (eps, label(c), traj.times[i], traj.states[i, 0], traj.states[i, 1])
        for eps, c, traj in curves
        for i in range(0, len(traj), stride)
    ]
    if cfg.format == "json":
        out.write(dump_json({"a": cfg.a, "w": cfg.w, "curves": [
            {"eps": eps, "class": label(c),
             "tau": traj.times[::stride].tolist(),
             "x": traj.states[::stride, 0].tolist(),
             "k": traj.states[::stride, 1].tolist()}
            for eps, c, traj in curves
        ]}) + "\n")
    else:
        write_csv(out, columns, rows)
    return 0


def _meta(cfg):
    return {"alpha": cfg.alpha, "a": cfg.a, "w": cfg.w}


def cmd_flow(cfg, out, workers):
    grid = evaluate_grid(cfg, workers)
    if cfg.format == "svg":
        if cfg.vector == "current":
            u = _grid_arrays(cfg, grid, lambda g: g[2].j_x)
            v = _grid_arrays(cfg, grid, lambda g: g[2].j_k)
        else:
            u = _grid_arrays(cfg, grid, lambda g: g[3])
            v = _grid_arrays(cfg, grid, lambda g: g[4])
        bg_key = cfg.background or "div_j"
        bg = _grid_arrays(cfg, grid, lambda g: getattr(g[2], bg_key))
        out.write(
            vector_field_svg(
                cfg.xs, cfg.ks, u, v, bg,
                f"Wigner flow alpha={cfg.alpha:g} a={cfg.a:g} w={cfg.w:g}; background {bg_key}",
                __version__,
            )
        )
        return 0
    rows = [
        (x, k, s.density, s.j_x, s.j_k, s.div_j, s.div_w) for x, k, s, _, _ in grid
    ]
    if cfg.format == "json":
        out.write(dump_json({**_meta(cfg), "samples": _rows_as_records(FLOW_COLUMNS, rows)}) + "\n")
    else:
        write_csv(out, FLOW_COLUMNS, rows)
    return 0


def cmd_quantifiers(cfg, out, workers):
    grid = evaluate_grid(cfg, workers)
    columns = ["x", "k", "div_j", "div_w", "speed"]
    thr = cfg.speed_threshold
    if thr is not None:
        columns.append("stagnant")
    rows = []
    for x, k, s, ox, ok in grid:
        speed = math.hypot(ox, ok)
        row = [x, k, s.div_j, s.div_w, speed]
        if thr is not None:
            row.append(1 if speed < thr else 0)
        rows.append(tuple(row))
    if cfg.format == "svg":
        u = _grid_arrays(cfg, grid, lambda g: g[3])
        v = _grid_arrays(cfg, grid, lambda g: g[4])
        bg_key = cfg.background or "div_w"
        bg = _grid_arrays(cfg, grid, lambda g: getattr(g[2], bg_key))
        out.write(
            vector_field_svg(
                cfg.xs, cfg.ks, u, v, bg,
                f"quantifier {bg_key} alpha={cfg.alpha:g} a={cfg.a:g} w={cfg.w:g}",
                __version__,
            )
        )
    elif cfg.format == "json":
        out.write(dump_json({**_meta(cfg), "speed_threshold": thr,
                             "samples": _rows_as_records(columns, rows)}) + "\n")
    else:
        write_csv(out, columns, rows)
    return 0


def _report_row(alpha, a, rep):
    if rep is None:
        return (alpha, a, None, None, None, None, None, Stability.UNRESOLVED.value, None)
    j = rep.jacobian
    return (
        alpha, a, rep.point.x, rep.point.k, j.trace, j.det, j.delta,
        rep.stability.value, rep.residual,
    )


def _write_table(cfg, out, columns, rows, extra=None):
    if cfg.format == "json":
        out.write(dump_json({**(extra or {}), "rows": _rows_as_records(columns, rows)}) + "\n")
    else:
        write_csv(out, columns, rows)


def cmd_equilibria(cfg, out):
    ens, params = cfg.ensemble, cfg.params
    if cfg.exhaustive:
        reports = find_equilibria(ens, params, tol=cfg.tol)
    else:
        guess = symmetric_guess(cfg.w)
        if cfg.x0 is not None or cfg.k0 is not None:
            guess = PhaseState(
                cfg.x0 if cfg.x0 is not None else guess.x,
                cfg.k0 if cfg.k0 is not None else guess.k,
            )
        reports = [equilibrium_report(ens, params, guess, cfg.tol)]
    rows = [_report_row(cfg.alpha, cfg.a, rep) for rep in reports]
    _write_table(cfg, out, SCAN_COLUMNS, rows, {"w": cfg.w})
    return 0


def cmd_scan(cfg, out, workers):
    alphas = np.linspace(*cfg.alpha_range)
    a_values = np.linspace(*cfg.a_range)
    cells = stability_scan(alphas, a_values, cfg.w, tol=cfg.tol, workers=workers)
    if cfg.format == "svg":
        names = [[c.stability.value for c in cells[i * len(a_values):(i + 1) * len(a_values)]]
                 for i in range(len(alphas))]
        out.write(class_map_svg(alphas, a_values, names,
                                f"hyperbolic stability w={cfg.w:g}", __version__))
        return 0
    rows = [_report_row(c.alpha, c.a, c.report) for c in cells]
    _write_table(cfg, out, SCAN_COLUMNS, rows, {"w": cfg.w})
    return 0


def cmd_threshold(cfg, out):
    res = saddle_threshold(cfg.params, cfg.bracket)
    out.write(dump_json({key: getattr(res, key) for key in THRESHOLD_KEYS}) + "\n")
    return 0


def _default_start(cfg, kind):
    guess = symmetric_guess(cfg.w)
    if kind is FieldKind.QUANTUM:
        centre = find_equilibrium(cfg.ensemble, cfg.params, guess)
    else:
        centre = guess if abs(cfg.w) < 1 else PhaseState(0.0, 0.0)
    return PhaseState(centre.x + 0.3, centre.k)


def cmd_trajectory(cfg, out):
    kind = FieldKind(cfg.field)
    ens = cfg.ensemble if kind is FieldKind.QUANTUM else None
    start = _default_start(cfg, kind)
    start = PhaseState(
        cfg.x0 if cfg.x0 is not None else start.x,
        cfg.k0 if cfg.k0 is not None else start.k,
    )
    traj = integrate(kind, ens, cfg.params, start, cfg.step, cfg.horizon)
    stride = cfg.stride or 1
    idx = range(0, len(traj), stride)
    if cfg.format == "svg":
        pts = traj.states[::stride]
        pad = 0.1 * max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1]), 1e-3)
        out.write(curves_svg(
            [(pts, "#d7191c" if kind is FieldKind.QUANTUM else "#000000")],
            (pts[:, 0].min() - pad, pts[:, 0].max() + pad),
            (pts[:, 1].min() - pad, pts[:, 1].max() + pad),
            f"{kind.value} trajectory alpha={cfg.alpha:g} a={cfg.a:g} w={cfg.w:g}",
            __version__,
        ))
        return 0
    params = cfg.params
    rows = []
    for i in idx:
        x, k = traj.states[i]
        energy = aah_energy(params, PhaseState(x, k)) if kind is FieldKind.CLASSICAL else None
        rows.append((traj.times[i], x, k, energy))
    _write_table(cfg, out, TRAJECTORY_COLUMNS, rows, {**_meta(cfg), "field": kind.value})
    return 0


def verification_report(cfg: RunConfig):
    """Closed forms against the Hermite series, finite differences and the
    quotient route for the Liouvillianity quantifier, on the configured grid."""
    ens, params = cfg.ensemble, cfg.params
    closure = aah_closure(params, cfg.n)
    series_dev = continuity_dev = quotient_dev = 0.0
    h = 1e-5
    for x in cfg.xs:
        for k in cfg.ks:
            s = PhaseState(float(x), float(k))
            ser = series_div_currents(ens, closure, s)
            for approx, exact in ((ser.div_jx, div_jx(ens, params, s)),
                                  (ser.div_jk, div_jk(ens, params, s))):
                scale = max(abs(approx), abs(exact))
                if scale > 1e-300:
                    series_dev = max(series_dev, abs(approx - exact) / scale)
            fd = (current_jx(ens, params, (s.x + h, s.k)) - current_jx(ens, params, (s.x - h, s.k))
                  + current_jk(ens, params, (s.x, s.k + h)) - current_jk(ens, params, (s.x, s.k - h))) / (2 * h)
            continuity_dev = max(continuity_dev, abs(fd - stationarity(ens, params, s)))
            if gaussian_value(ens, s) > 1e-100:
                direct = liouvillianity(ens, params, s)
                quotient = liouvillianity_quotient(ens, params, s)
                quotient_dev = max(quotient_dev, abs(direct - quotient) / max(1.0, abs(direct)))
    eq = find_equilibrium(ens, params, symmetric_guess(cfg.w))
    jac = jacobian_at(ens, params, eq)
    hj = 1e-6

    def vel(x, k):
        return velocity(ens, params, PhaseState(x, k))

    fx_p, fx_m = vel(eq.x + hj, eq.k), vel(eq.x - hj, eq.k)
    fk_p, fk_m = vel(eq.x, eq.k + hj), vel(eq.x, eq.k - hj)
    fd_entries = (
        (fx_p[0] - fx_m[0]) / (2 * hj), (fk_p[0] - fk_m[0]) / (2 * hj),
        (fx_p[1] - fx_m[1]) / (2 * hj), (fk_p[1] - fk_m[1]) / (2 * hj),
    )
    jac_dev = max(abs(a - b) for a, b in zip(fd_entries, (jac.dxdx, jac.dxdk, jac.dkdx, jac.dkdk)))
    checks = {
        "series_max_rel_dev": (series_dev, SERIES_TOL),
        "continuity_max_abs_dev": (continuity_dev, CONTINUITY_TOL),
        "liouvillianity_routes_max_dev": (quotient_dev, QUOTIENT_TOL),
        "jacobian_fd_max_abs_dev": (jac_dev, JACOBIAN_TOL),
    }
    report = {**_meta(cfg), "n": cfg.n, "nx": cfg.nx, "nk": cfg.nk}
    for key, (value, tol) in checks.items():
        report[key] = value
        report[key + "_tol"] = tol
    report["equilibrium"] = [eq.x, eq.k]
    report["equilibrium_class"] = classify(jac, cfg.tol).value
    report["passed"] = all(value <= tol for value, tol in checks.values())
    return report


def cmd_verify(cfg, out):
    report = verification_report(cfg)
    out.write(dump_json(report) + "\n")
    return 0 if report["passed"] else 2


def run(cfg: RunConfig) -> int:
    """Execute one command; artifacts go to ``cfg.output`` (``-`` for stdout)."""
    workers = resolve_workers(cfg)
    buf = io.StringIO()
    if cfg.command == "portrait":
        status = cmd_portrait(cfg, buf)
    elif cfg.command == "flow":
        status = cmd_flow(cfg, buf, workers)
    elif cfg.command == "quantifiers":
        status = cmd_quantifiers(cfg, buf, workers)
    elif cfg.command == "equilibria":
        status = cmd_equilibria(cfg, buf)
    elif cfg.command == "scan":
        status = cmd_scan(cfg, buf, workers)
    elif cfg.command == "threshold":
        status = cmd_threshold(cfg, buf)
    elif cfg.command == "trajectory":
        status = cmd_trajectory(cfg, buf)
    else:
        status = cmd_verify(cfg, buf)
    if cfg.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return status


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        # constructing these validates alpha / a against the model invariants
        cfg.params, cfg.ensemble
    except (UsageError, ValueError) as exc:
        print(f"wigner-aah: usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return run(cfg)
    except (SolverError, IntegrationError, DomainError, BracketError) as exc:
        print(f"wigner-aah: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
