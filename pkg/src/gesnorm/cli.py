"""Command-line front end: ``gesnorm <subcommand> [options]``.

Subcommands:
    norm     scaled (or non-scaled) GES norm of a vector, or its alpha profile
    dual     dual norm of a vector
    project  projection of a point onto a polyhedron
    sweep    projection value over an alpha grid for several distortions
    detect   rolling-window anomaly detection on a dated CSV series
    compare  overlap table of several detectors
    disk     unit-disk boundary polyline
    synth    synthetic return series with injected spikes
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import re
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from gesnorm.anomaly.config import DetectorConfig, IForestParams, Method
from gesnorm.anomaly.detectors import detect
from gesnorm.anomaly.overlap import overlap_matrix
from gesnorm.anomaly.synthetic import synthetic_returns
from gesnorm.distortion import parse_distortion
from gesnorm.dual import ges_dual_norm
from gesnorm.io import DatedSeries, DetectionReport, csv_text, fmt, load_series, round_sig, write_series
from gesnorm.norms import alpha_profile, nonscaled_ges_norm, scaled_ges_norm, unit_disk_boundary
from gesnorm.optimize.experiments import DEFAULT_ALPHA_GRID, ProjectionInstance, alpha_sweep, generate_instance
from gesnorm.optimize.milp import project_milp
from gesnorm.optimize.projection import project_enumerate, project_lp

DEFAULT_WINDOWS = {Method.GES: 30, Method.MAD: 30, Method.POT: 180, Method.IFOREST: 180}
DEFAULT_COMPARE = "ges:identity,ges:power:2,mad,pot,iforest"
SYNTH_START = dt.date(2020, 1, 1)

_NEG_VALUE = re.compile(r"^-[\d.]")


class CliError(Exception):
    pass


def parse_vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",") if t.strip()], dtype=float)
    except ValueError:
        raise CliError(f"bad vector {text!r}: expected comma-separated numbers") from None
    if v.size == 0:
        raise CliError("empty vector")
    return v


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop included) or a comma-separated list."""
    if ":" in text:
        try:
            start, stop, step = (float(t) for t in text.split(":"))
        except ValueError:
            raise CliError(f"bad grid {text!r}: expected start:stop:step") from None
        if step <= 0 or stop < start:
            raise CliError(f"bad grid {text!r}")
        k = int(np.floor((stop - start) / step + 1e-9))
        return [round(start + i * step, 12) for i in range(k + 1)]
    return parse_vector(text).tolist()


def _distortion(spec: str | None, default: str):
    return parse_distortion(spec or default)


def _write(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _table(args, header: Sequence[str], rows: list[Sequence]) -> str:
    if args.format == "json":
        recs = [{h: (round_sig(v) if isinstance(v, float) else v) for h, v in zip(header, r)}
                for r in rows]
        return json.dumps(recs, indent=1) + "\n"
    return csv_text(header, rows)


# --- subcommands -----------------------------------------------------------

def cmd_norm(args) -> None:
    g = _distortion(args.distortion, "identity")
    x = parse_vector(args.x)
    if args.alpha_grid:
        prof = alpha_profile(x, g, parse_grid(args.alpha_grid))
        _write(args, _table(args, ["alpha", "scaled", "nonscaled"],
                            [tuple(float(v) for v in row) for row in prof]))
        return
    alpha = 0.0 if args.alpha is None else args.alpha
    f = nonscaled_ges_norm if args.nonscaled else scaled_ges_norm
    _write(args, fmt(f(x, alpha, g)) + "\n")


def cmd_dual(args) -> None:
    g = _distortion(args.distortion, "identity")
    alpha = 0.0 if args.alpha is None else args.alpha
    _write(args, fmt(ges_dual_norm(parse_vector(args.y), alpha, g)) + "\n")


def _instance(args) -> ProjectionInstance:
    if args.input:
        return ProjectionInstance.from_dict(json.loads(Path(args.input).read_text()))
    return generate_instance(args.n, args.m, 0 if args.seed is None else args.seed)


def cmd_project(args) -> None:
    g = _distortion(args.distortion, "identity")
    alpha = 0.0 if args.alpha is None else args.alpha
    inst = _instance(args)
    if args.method == "lp":
        res = project_lp(inst.q, inst.polyhedron, alpha, g)
    elif args.method == "enumerate":
        res = project_enumerate(inst.q, inst.polyhedron, alpha, g)
    else:
        res = project_milp(inst.q, inst.polyhedron, alpha, g, node_limit=args.node_limit)
    if args.format == "csv":
        header = ["method", "value", *(f"x{i + 1}" for i in range(inst.n))]
        _write(args, csv_text(header, [[res.method, float(res.value), *map(float, res.x)]]))
        return
    out = {
        "method": res.method,
        "distortion": g.label,
        "alpha": alpha,
        "value": round_sig(res.value),
        "x": [round_sig(v) for v in res.x],
        "lp_count": res.lp_count,
        "nodes": res.nodes,
        "proven_optimal": res.proven_optimal,
    }
    _write(args, json.dumps(out, indent=1) + "\n")


def cmd_sweep(args) -> None:
    specs = args.distortions.split(",") if args.distortions else (
        [args.distortion] if args.distortion else ["identity", "power:2"])
    gs = [parse_distortion(s) for s in specs]
    inst = _instance(args)
    if args.save_instance:
        Path(args.save_instance).write_text(inst.to_json())
    grid = parse_grid(args.alphas) if args.alphas else list(DEFAULT_ALPHA_GRID)
    rows = alpha_sweep(inst, grid, gs)
    _write(args, _table(args, ["g", "alpha", "value"], [(l, float(a), float(v)) for l, a, v in rows]))


def _series(args) -> DatedSeries:
    if not args.input:
        raise CliError("--input is required")
    s = load_series(args.input, args.kind)
    return s.to_returns(log=args.log_returns)


def _config(args, method: Method, distortion: str | None = None) -> DetectorConfig:
    window = args.window or DEFAULT_WINDOWS[method]
    return DetectorConfig(
        method=method,
        window=window,
        alpha=0.95 if args.alpha is None else args.alpha,
        distortion=_distortion(distortion or args.distortion, "power:2"),
        z_threshold=args.z_threshold,
        pot_rule=args.pot_rule,
        iforest=IForestParams(trees=args.trees, subsample=args.subsample,
                              seed=0 if args.seed is None else args.seed),
    )


def cmd_detect(args) -> None:
    s = _series(args)
    cfg = _config(args, Method(args.method))
    det = detect(s.values, cfg)
    rep = DetectionReport.build(s.dates, s.values, det, cfg.to_dict())
    _write(args, rep.to_csv() if args.format == "csv" else rep.to_json())


def _method_specs(text: str) -> list[tuple[str, Method, str | None]]:
    out = []
    for item in text.split(","):
        item = item.strip()
        name, _, dist = item.partition(":")
        try:
            m = Method(name)
        except ValueError:
            raise CliError(f"unknown method {name!r}") from None
        if dist and m is not Method.GES:
            raise CliError(f"only ges takes a distortion, got {item!r}")
        out.append((item, m, dist or None))
    if len({o[0] for o in out}) != len(out):
        raise CliError("duplicate method in --methods")
    return out


def cmd_compare(args) -> None:
    if args.input:
        s = _series(args)
        dates, r = s.dates, s.values
    else:
        syn = synthetic_returns(args.n, args.synthetic_window, args.spikes,
                                seed=0 if args.seed is None else args.seed)
        r = syn.returns
        dates = [SYNTH_START + dt.timedelta(days=i) for i in range(r.size)]
    flags = {}
    for name, m, dist in _method_specs(args.methods):
        flags[name] = detect(r, _config(args, m, dist)).flags
    mat = overlap_matrix(flags)
    if args.format == "json":
        out = {
            "methods": list(mat.names),
            "counts": mat.counts.tolist(),
            "percentages": [[round_sig(v) for v in row] for row in mat.percentages],
            "n_points": len(dates),
        }
        _write(args, json.dumps(out, indent=1) + "\n")
    else:
        _write(args, mat.to_csv())


def cmd_disk(args) -> None:
    g = _distortion(args.distortion, "identity")
    alpha = 0.0 if args.alpha is None else args.alpha
    pts = unit_disk_boundary(g, alpha, samples=args.samples, scaled=not args.nonscaled)
    _write(args, _table(args, ["theta", "x", "y"], [tuple(float(v) for v in row) for row in pts]))


def cmd_synth(args) -> None:
    syn = synthetic_returns(args.n, args.window or 30, args.spikes,
                            seed=0 if args.seed is None else args.seed)
    dates = [SYNTH_START + dt.timedelta(days=i) for i in range(syn.returns.size)]
    series = DatedSeries(dates, syn.returns, "return")
    if not args.output:
        raise CliError("--output is required")
    write_series(args.output, series)
    if args.spikes_output:
        Path(args.spikes_output).write_text(
            csv_text(["index", "date"], [[int(t), dates[t].isoformat()] for t in syn.spikes]))


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--distortion", help="identity | sqrt | power:<p> | table:<path>")
    shared.add_argument("--alpha", type=float, help="level in [0, 1]")
    shared.add_argument("--seed", type=int, help="random seed (default 0)")
    shared.add_argument("--input", help="input file")
    shared.add_argument("--output", help="output file (default stdout)")
    shared.add_argument("--format", choices=["json", "csv"], help="output format")

    p = argparse.ArgumentParser(prog="gesnorm", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("norm", parents=[shared], help="GES norm of a vector")
    q.add_argument("--x", required=True, help="comma-separated vector")
    q.add_argument("--nonscaled", action="store_true", help="multiply by n(1 - alpha)")
    q.add_argument("--alpha-grid", help="start:stop:step or list; prints alpha,scaled,nonscaled")
    q.set_defaults(func=cmd_norm, default_format="csv")

    q = sub.add_parser("dual", parents=[shared], help="dual GES norm of a vector")
    q.add_argument("--y", required=True, help="comma-separated vector")
    q.set_defaults(func=cmd_dual, default_format="csv")

    def instance_args(q):
        q.add_argument("--n", type=int, default=10, help="dimension of a generated instance")
        q.add_argument("--m", type=int, default=5, help="rows of a generated instance")

    q = sub.add_parser("project", parents=[shared], help="project onto a polyhedron")
    instance_args(q)
    q.add_argument("--method", choices=["lp", "enumerate", "milp"], default="lp")
    q.add_argument("--node-limit", type=int, default=1_000_000)
    q.set_defaults(func=cmd_project, default_format="json")

    q = sub.add_parser("sweep", parents=[shared], help="projection value over an alpha grid")
    instance_args(q)
    q.add_argument("--alphas", help="start:stop:step or list (default 0:0.95:0.05)")
    q.add_argument("--distortions", help="comma-separated list (default identity,power:2)")
    q.add_argument("--save-instance", help="also write the instance JSON here")
    q.set_defaults(func=cmd_sweep, default_format="csv")

    def detector_args(q):
        q.add_argument("--window", type=int, help="window size W, current point included")
        q.add_argument("--kind", choices=["price", "return"], help="input column (default: header)")
        q.add_argument("--log-returns", action="store_true", help="log instead of simple returns")
        q.add_argument("--z-threshold", type=float, default=3.0)
        q.add_argument("--pot-rule", choices=["gpd", "empirical"], default="gpd")
        q.add_argument("--trees", type=int, default=100)
        q.add_argument("--subsample", type=int, help="isolation subsample (default min(256, W-1))")

    q = sub.add_parser("detect", parents=[shared], help="rolling-window anomaly detection")
    detector_args(q)
    q.add_argument("--method", choices=[m.value for m in Method], default="ges")
    q.set_defaults(func=cmd_detect, default_format="json")

    q = sub.add_parser("compare", parents=[shared], help="overlap table of several detectors")
    detector_args(q)
    q.add_argument("--methods", default=DEFAULT_COMPARE,
                   help=f"comma-separated; ges may carry a distortion (default {DEFAULT_COMPARE})")
    q.add_argument("--n", type=int, default=1000, help="synthetic length when no --input")
    q.add_argument("--spikes", type=int, default=10, help="synthetic spikes when no --input")
    q.add_argument("--synthetic-window", type=int, default=30)
    q.set_defaults(func=cmd_compare, default_format="csv")

    q = sub.add_parser("disk", parents=[shared], help="unit-disk boundary in the plane")
    q.add_argument("--samples", type=int, default=360)
    q.add_argument("--nonscaled", action="store_true")
    q.set_defaults(func=cmd_disk, default_format="csv")

    q = sub.add_parser("synth", parents=[shared], help="synthetic returns with injected spikes")
    q.add_argument("--n", type=int, default=1000)
    q.add_argument("--window", type=int, help="spike reference window (default 30)")
    q.add_argument("--spikes", type=int, default=10)
    q.add_argument("--spikes-output", help="CSV of injected indices and dates")
    q.set_defaults(func=cmd_synth, default_format="csv")
    return p


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--x -2,1`` into ``--x=-2,1`` so argparse does not read an option."""
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEG_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = _glue_negative_values(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        args.func(args)
    except BrokenPipeError:
        return 1
    except (CliError, ValueError, RuntimeError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"gesnorm: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
