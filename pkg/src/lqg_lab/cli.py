"""Command-line entry point.

Every subcommand is deterministic in its flags and ``--seed``. Outputs go
to ``--out`` (default: the current directory). Exit status is 0 on
success, 1 when a check fails and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .core import (Grid, RngStream, Topology, derive_stream, dumps_json, fmt_float, parallel_map,
                   resolve_threads, write_csv_rows, write_json, write_path_csv)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUBCOMMANDS = ("gff", "measure", "levy", "csbp", "surface", "qle", "exponent", "acceptance")


class UsageError(ValueError):
    """Bad flag values or an inconsistent configuration."""


# ----------------------------------------------------------------------------
# configuration

@dataclass
class ExperimentConfig:
    name: str
    module: str
    parameters: dict = field(default_factory=dict)
    seed: int = 7
    trials: int = 1
    output_dir: str = "."

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise UsageError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        raw = json.loads(text)
        unknown = set(raw) - {"name", "module", "parameters", "seed", "trials", "output_dir"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)


def load_configs(path: str) -> list[ExperimentConfig]:
    """One config object or a list of them; names must be unique."""
    text = Path(path).read_text()
    raw = json.loads(text)
    items = raw if isinstance(raw, list) else [raw]
    cfgs = [ExperimentConfig.from_json(json.dumps(x)) for x in items]
    names = [c.name for c in cfgs]
    if len(set(names)) != len(names):
        raise UsageError("config names must be unique")
    return cfgs


def parse_gamma_sq(text: str) -> float:
    """``gamma`` from a rational ``gamma^2`` such as ``8/3``."""
    try:
        g2 = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --gamma-sq {text!r}") from exc
    if not 0 < g2 < 4:
        raise UsageError("gamma^2 must lie in (0, 4)")
    return math.sqrt(float(g2))


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc
    if not vals:
        raise UsageError("empty number list")
    return vals


# ----------------------------------------------------------------------------
# SVG output

def _nice(x: float) -> str:
    return f"{x:.6g}"


def emit_svg(series: Sequence[dict], style: Optional[dict] = None, destination=None) -> str:
    """Standalone SVG line/scatter plot.

    ``series`` entries have keys ``name``, ``x`` and ``y``. ``style`` may
    set ``title``, ``xlabel``, ``ylabel``, ``log`` (log-log axes) and
    ``fit`` (overlay a least-squares line, in log coordinates when
    ``log`` is set, and put its slope in the legend). Output depends only
    on the inputs.
    """
    style = dict(style or {})
    if not series or all(len(s.get("x", ())) == 0 for s in series):
        raise ValueError("nothing to plot")
    log = bool(style.get("log", False))
    W, H, L, R, T, B = 640, 420, 70, 20, 40, 55
    tx = (lambda v: np.log10(v)) if log else (lambda v: np.asarray(v, dtype=float))
    pts = []
    for s in series:
        x, y = np.asarray(s["x"], dtype=float), np.asarray(s["y"], dtype=float)
        if x.shape != y.shape:
            raise ValueError(f"series {s.get('name')!r}: x and y differ in length")
        if log and (np.any(x <= 0) or np.any(y <= 0)):
            raise ValueError("log axes need positive data")
        pts.append((s.get("name", ""), tx(x), tx(y)))
    allx = np.concatenate([p[1] for p in pts])
    ally = np.concatenate([p[2] for p in pts])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(v):
        return L + (v - x0) / (x1 - x0) * (W - L - R)

    def py(v):
        return H - B - (v - y0) / (y1 - y0) * (H - T - B)

    colors = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e")
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<line x1="{L}" y1="{H - B}" x2="{W - R}" y2="{H - B}" stroke="black"/>',
           f'<line x1="{L}" y1="{T}" x2="{L}" y2="{H - B}" stroke="black"/>']
    for k in range(5):
        xv = x0 + (x1 - x0) * k / 4
        yv = y0 + (y1 - y0) * k / 4
        xl = _nice(10 ** xv) if log else _nice(xv)
        yl = _nice(10 ** yv) if log else _nice(yv)
        out.append(f'<text x="{px(xv):.2f}" y="{H - B + 18}" font-size="11" text-anchor="middle">{xl}</text>')
        out.append(f'<text x="{L - 6}" y="{py(yv) + 4:.2f}" font-size="11" text-anchor="end">{yl}</text>')
    if style.get("title"):
        out.append(f'<text x="{W / 2:.1f}" y="22" font-size="14" text-anchor="middle">{style["title"]}</text>')
    if style.get("xlabel"):
        out.append(f'<text x="{(L + W - R) / 2:.1f}" y="{H - 12}" font-size="12" text-anchor="middle">{style["xlabel"]}</text>')
    if style.get("ylabel"):
        out.append(f'<text x="16" y="{(T + H - B) / 2:.1f}" font-size="12" text-anchor="middle" '
                   f'transform="rotate(-90 16 {(T + H - B) / 2:.1f})">{style["ylabel"]}</text>')
    legend_y = T + 4
    for i, (name, x, y) in enumerate(pts):
        c = colors[i % len(colors)]
        if x.size > 1:
            d = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{d}" fill="none" stroke="{c}" stroke-width="1"/>')
        for a, b in zip(x, y):
            out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{c}"/>')
        label = str(name)
        if style.get("fit") and x.size >= 2 and np.ptp(x) > 0:
            slope, icpt = np.polyfit(x, y, 1)
            out.append(f'<line x1="{px(x.min()):.2f}" y1="{py(icpt + slope * x.min()):.2f}" '
                       f'x2="{px(x.max()):.2f}" y2="{py(icpt + slope * x.max()):.2f}" '
                       f'stroke="{c}" stroke-dasharray="5,3"/>')
            label = f"{label} (slope {slope:.4f})"
        out.append(f'<text x="{W - R - 8}" y="{legend_y + 12 * (i + 1)}" font-size="11" '
                   f'text-anchor="end" fill="{c}">{label}</text>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if destination is not None:
        Path(destination).write_text(text)
    return text


# ----------------------------------------------------------------------------
# subcommands

def _outdir(args) -> Path:
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _emit(args, payload) -> None:
    text = dumps_json(payload)
    if args.report:
        Path(args.report).write_text(text)
    sys.stdout.write(text)


def cmd_gff(args) -> int:
    from .gff import Normalization, sample_gff, write_field
    try:
        grid = Grid(args.grid, args.spacing or 1.0 / args.grid, Topology(args.topology))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    norm = Normalization(args.normalization) if args.normalization else None
    out = _outdir(args)
    stats = []
    for i in range(args.trials):
        f = sample_gff(grid, derive_stream(args.seed, (i,)), norm)
        write_field(f, out / f"field_{i:04d}.lqgf")
        stats.append({"trial": i, "mean": float(f.values.mean()), "std": float(f.values.std())})
    _emit(args, {"grid": args.grid, "topology": grid.topology.value, "fields": stats})
    return EXIT_OK


def cmd_measure(args) -> int:
    from .estimators import loglog_fit
    from .lqg_measure import ball_moment_curve, xi
    gamma = parse_gamma_sq(args.gamma_sq)
    qs = parse_floats(args.q)
    radii = 2.0 ** np.arange(args.rmin_exp, args.rmax_exp + 1e-9, 0.5)
    m = ball_moment_curve(gamma, qs, radii, args.trials, RngStream(args.seed), size=args.grid)
    out = _outdir(args)
    fits = {}
    series = []
    for q in qs:
        f = loglog_fit(radii, m[q])
        fits[str(q)] = {"slope": f.slope, "stderr": f.stderr, "xi": float(xi(q, gamma))}
        write_csv_rows(out / f"moments_q{q}.csv", ("x", "y"),
                       [(r, v) for r, v in zip(radii, m[q])] + [("slope", f.slope)])
        series.append({"name": f"q={q}", "x": radii, "y": m[q]})
    emit_svg(series, {"title": "ball moments", "xlabel": "r", "ylabel": "E mu(B_r)^q",
                      "log": True, "fit": True}, out / "moments.svg")
    _emit(args, {"gamma_sq": args.gamma_sq, "fits": fits})
    return EXIT_OK


def cmd_levy(args) -> int:
    from .stable_levy import Side, StableSpec, jump_histogram, sample_stable_path, unit_scale_coefficient
    coef = args.density if args.density is not None else unit_scale_coefficient(args.alpha)
    try:
        spec = StableSpec(args.alpha, Side.UP if args.side == "up" else Side.DOWN, coef)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = _outdir(args)
    paths = []
    for i in range(args.paths):
        p = sample_stable_path(spec, args.x0, args.T, args.dt, stream=derive_stream(args.seed, (i,)))
        paths.append(p)
        if i < args.write_paths:
            write_path_csv(p, out / f"levy_{i:04d}.csv", {"alpha": args.alpha, "side": args.side})
    bins = np.geomspace(max(args.dt, 1e-3), 10.0, 13)
    rows = jump_histogram(paths, bins)
    write_csv_rows(out / "jump_histogram.csv", ("bin_lo", "bin_hi", "count"), rows)
    _emit(args, {"paths": args.paths, "laplace_scale": spec.laplace_scale,
                 "mean_final": float(np.mean([p.values[-1] for p in paths]))})
    return EXIT_OK


def cmd_csbp(args) -> int:
    from .csbp import extinction_check, laplace_transform, simulate_csbp
    from .estimators import laplace_compare
    b = simulate_csbp(args.y0, args.paths, (args.t,), RngStream(args.seed), alpha=args.alpha,
                      to_extinction=args.extinction is not None,
                      horizon=max(parse_floats(args.extinction)) if args.extinction else math.inf)
    payload = {"alpha": args.alpha, "y0": args.y0, "t": args.t, "paths": args.paths}
    ok = True
    if args.check_laplace:
        cs = laplace_compare(b.records[args.t], parse_floats(args.check_laplace),
                             lambda l: laplace_transform(args.y0, args.t, l, args.alpha))
        payload["laplace"] = [c.to_dict() for c in cs]
        ok &= all(c.ok() for c in cs)
    if args.extinction:
        cs = [extinction_check(args.y0, v, 0, alpha=args.alpha, batch=b) for v in parse_floats(args.extinction)]
        payload["extinction"] = [c.to_dict() for c in cs]
        ok &= all(c.ok() for c in cs)
    payload["pass"] = bool(ok)
    _emit(args, payload)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_surface(args) -> int:
    from .surface_encodings import (Role, bessel_dimension, radial_encoding, sample_bessel_excursion,
                                    write_encoding_csv)
    gamma = parse_gamma_sq(args.gamma_sq)
    role = Role(args.role)
    out = _outdir(args)
    if role in (Role.DISK, Role.SPHERE):
        delta = bessel_dimension(role, gamma)
        enc = None
        for attempt in range(50):
            exc = sample_bessel_excursion(delta, (0.5, 2.0), 1e-4, derive_stream(args.seed, (attempt,)))
            try:
                enc = radial_encoding(role, gamma, exc, dx=args.dx, extent=args.extent)
                break
            except ValueError:
                continue
        if enc is None:
            raise UsageError("no excursion covered the requested extent; lower --extent")
    else:
        if args.cone_alpha is None:
            raise UsageError(f"{role.value} needs --cone-alpha")
        enc = radial_encoding(role, gamma, RngStream(args.seed), dx=args.dx, extent=args.extent,
                              alpha=args.cone_alpha)
    write_encoding_csv(enc, out / f"encoding_{role.value}.csv")
    _emit(args, {"role": role.value, "delta": enc.delta, "samples": int(enc.process.size),
                 "qv_rate": enc.realized_qv_rate()})
    return EXIT_OK


def cmd_qle(args) -> int:
    from .qle_boundary import (build_necklace_ledger, calibration_constant, distance_time_change,
                               marked_point_walk, write_ledger_csv)
    out = _outdir(args)
    led = build_necklace_ledger(args.delta, args.necklaces, args.x0, stream=derive_stream(args.seed, (0,)),
                                substeps=args.substeps)
    walk = marked_point_walk(led, args.marks, derive_stream(args.seed, (1,))) if len(led) else None
    write_ledger_csv(led, out / "ledger.csv", walk)
    path = led.boundary_path()
    write_path_csv(path, out / "boundary.csv", {"delta": args.delta})
    tm = distance_time_change(path)
    payload = {"necklaces": len(led), "absorbed": led.terminal,
               "calibration": calibration_constant(led.top, args.delta) if len(led) else None,
               "distance_time": float(tm.distance[-1]),
               "hits": walk.hit_counts().tolist() if walk is not None else []}
    _emit(args, payload)
    return EXIT_OK


EXPONENTS = ("typical-ball", "multifractal", "diameter", "hit-count", "boundary-tail")


def cmd_exponent(args) -> int:
    from .estimators import gaussian_tail_exponent, linear_fit, loglog_fit
    gamma = parse_gamma_sq(args.gamma_sq)
    out = _outdir(args)
    stream = RngStream(args.seed)
    kind = args.kind
    if kind == "typical-ball":
        from .lqg_measure import typical_ball_slopes
        radii = 2.0 ** np.arange(-9, -2.99, 0.5)
        s = typical_ball_slopes(gamma, radii, args.trials, stream, size=args.grid,
                                spacing=1.0 / args.grid, norm_radius=0.25)
        target, value, tol = 2.0 / 3.0, float(np.median(s)), 0.1
        se = float(1.2533 * s.std(ddof=1) / math.sqrt(s.size)) if s.size > 1 else float("nan")
        x, y = np.arange(s.size, dtype=float), s
        extra = {"mean": float(s.mean())}
        log = False
    elif kind == "multifractal":
        from .lqg_measure import ball_moment_curve, xi
        radii = 2.0 ** np.arange(-7, -2.99, 0.5)
        q = args.q
        m = ball_moment_curve(gamma, [q], radii, args.trials, stream, size=args.grid)
        f = loglog_fit(radii, m[q])
        target, value, tol, se = float(xi(q, gamma)), f.slope, 0.1 if q == 1 else 0.15, f.stderr
        x, y, extra, log = radii, m[q], {"q": q}, True
    elif kind == "diameter":
        from .surface_encodings import diameter_exponent, diameter_exponent_samples
        eps = 2.0 ** -np.linspace(1, 3, 5)
        smp = diameter_exponent_samples(gamma, eps, args.trials, stream, size=args.grid)
        r = diameter_exponent(smp, gamma)
        target, value, tol, se = 6.0, r["cv"], 0.5, r["cv_stderr"]
        x, y, extra, log = eps, np.exp(np.log(smp.radii).mean(axis=0)), r, True
    elif kind == "hit-count":
        from .qle_boundary import explore_batch
        x = np.array([1e-2, 10 ** -2.5, 1e-3])
        y = np.array([explore_batch(args.trials, 4.0, d, 1, derive_stream(args.seed, (i,)),
                                    necklaces=int(round(1 / d))).hits[:, 0].mean()
                      for i, d in enumerate(x)])
        f = loglog_fit(x, y)
        target, value, tol, se, extra, log = -1.0 / 3.0, f.slope, 0.05, f.stderr, {}, True
    else:
        from .lqg_measure import boundary_length_tail_samples
        s = boundary_length_tail_samples(gamma, args.trials, stream, size=args.grid)
        eta = np.linspace(-3.0, -1.0, 9)
        f = gaussian_tail_exponent(s, eta, lower=True)
        target, value, tol, se = 2.0, f.slope, 0.5, f.stderr
        x = np.abs(eta)
        y = -np.log(np.maximum(np.mean(s[None, :] <= eta[:, None], axis=1), 1e-300))
        extra, log = {}, True
    ok = abs(value - target) <= tol
    extra = {**extra, "resolved": bool(np.isfinite(se) and se <= tol / 2)}
    write_csv_rows(out / f"{kind}.csv", ("x", "y"), [(a, b) for a, b in zip(x, y)] + [("fit", value)])
    emit_svg([{"name": kind, "x": x, "y": y}], {"title": kind, "log": log and np.all(np.asarray(y) > 0),
                                                "fit": kind != "typical-ball"}, out / f"{kind}.svg")
    _emit(args, {"kind": kind, "target": target, "measured": value, "stderr": se, "tolerance": tol,
                 "pass": bool(ok), "details": extra})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_acceptance(args) -> int:
    from .acceptance import parse_suite, run_criterion
    try:
        ids = parse_suite(args.suite)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    results = parallel_map(lambda cid: run_criterion(cid, args.seed), ids, args.threads)
    for r in results:
        print(r.line())
    records = [r.to_record() for r in results]
    if args.no_runtime:
        for rec in records:
            rec["runtime_seconds"] = 0.0
    if args.report:
        write_json(args.report, records)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ----------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit seed (default 7)")
    common.add_argument("--threads", type=int, default=None, help="worker count (default: cores)")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--report", default=None, help="write the JSON result here")
    common.add_argument("--config", default=None, help="JSON experiment config")

    p = argparse.ArgumentParser(prog="lqg-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gff", parents=[common], help="sample lattice free fields")
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--spacing", type=float, default=None)
    s.add_argument("--topology", default="torus", choices=[t.value for t in Topology])
    s.add_argument("--normalization", default=None)
    s.add_argument("--trials", type=int, default=1)
    s.set_defaults(func=cmd_gff)

    s = sub.add_parser("measure", parents=[common], help="ball moments of the area measure")
    s.add_argument("--gamma-sq", default="8/3")
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--q", default="1,2")
    s.add_argument("--rmin-exp", type=float, default=-6.0)
    s.add_argument("--rmax-exp", type=float, default=-3.0)
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("levy", parents=[common], help="stable paths with jump ledgers")
    s.add_argument("--alpha", type=float, default=1.5)
    s.add_argument("--side", choices=("up", "down"), default="up")
    s.add_argument("--density", type=float, default=None, help="Lévy density coefficient")
    s.add_argument("--x0", type=float, default=0.0)
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--paths", type=int, default=10)
    s.add_argument("--write-paths", type=int, default=3)
    s.set_defaults(func=cmd_levy)

    s = sub.add_parser("csbp", parents=[common], help="CSBP closed-form checks")
    s.add_argument("--alpha", type=float, default=1.5)
    s.add_argument("--y0", type=float, default=1.0)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--paths", type=int, default=10_000)
    s.add_argument("--check-laplace", default=None)
    s.add_argument("--extinction", default=None, help="comma list of times v")
    s.set_defaults(func=cmd_csbp)

    s = sub.add_parser("surface", parents=[common], help="radial encodings of quantum surfaces")
    s.add_argument("--role", choices=("disk", "sphere", "cone", "wedge"), default="disk")
    s.add_argument("--gamma-sq", default="8/3")
    s.add_argument("--cone-alpha", type=float, default=None)
    s.add_argument("--dx", type=float, default=1e-2)
    s.add_argument("--extent", type=float, default=0.5)
    s.set_defaults(func=cmd_surface)

    s = sub.add_parser("qle", parents=[common], help="necklace ledger and marked points")
    s.add_argument("--delta", type=float, default=1e-2)
    s.add_argument("--necklaces", type=int, default=100)
    s.add_argument("--x0", type=float, default=1.0)
    s.add_argument("--marks", type=int, default=1)
    s.add_argument("--substeps", type=int, default=8)
    s.set_defaults(func=cmd_qle)

    s = sub.add_parser("exponent", parents=[common], help="scaling-exponent experiments")
    s.add_argument("kind", choices=EXPONENTS)
    s.add_argument("--gamma-sq", default="8/3")
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--q", type=float, default=1.0)
    s.set_defaults(func=cmd_exponent)

    s = sub.add_parser("acceptance", parents=[common], help="run the acceptance suite")
    s.add_argument("--suite", default="all", help="'all' or a comma list of criterion ids")
    s.add_argument("--no-runtime", action="store_true",
                   help="write 0 for runtimes so reports compare byte for byte")
    s.set_defaults(func=cmd_acceptance)
    return p


def _apply_config(args, parser) -> None:
    """Fill flags left unset from ``--config``, then from defaults."""
    cfg = None
    if args.config:
        cfgs = load_configs(args.config)
        matching = [c for c in cfgs if c.module == args.command]
        if not matching:
            raise UsageError(f"config has no entry for module {args.command!r}")
        cfg = matching[0]
        for key, val in cfg.parameters.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise UsageError(f"config parameter {key!r} is not a flag of {args.command}")
            if getattr(args, attr) == parser_default(parser, args.command, attr):
                setattr(args, attr, val)
        if hasattr(args, "trials") and args.trials == parser_default(parser, args.command, "trials"):
            args.trials = cfg.trials
    if args.seed is None:
        args.seed = cfg.seed if cfg else 7
    if args.out is None:
        args.out = cfg.output_dir if cfg else "."
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    args.threads = resolve_threads(args.threads)


def parser_default(parser, command: str, attr: str):
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return sub.choices[command].get_default(attr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        _apply_config(args, parser)
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        parser.print_usage(sys.stderr)
        print(f"lqg-lab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(subcommand: str, flags: Sequence[str] = ()) -> int:
    """Programmatic form of ``lqg-lab <subcommand> <flags>``."""
    if subcommand not in SUBCOMMANDS:
        print(f"unknown subcommand {subcommand!r}", file=sys.stderr)
        return EXIT_USAGE
    return main([subcommand, *flags])


if __name__ == "__main__":
    sys.exit(main())
