"""Command-line interface: simulate / estimate / select / experiment / theory."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import models
from .estimator import multitaper_oracle, multitaper_plugin
from .experiment import ConfigError, parse_config, run_experiment
from .hermite import TaperBasis
from .patterns import Window, read_pattern, write_pattern
from .select import CvConfig, select_tapers
from .simulate import SeedStream, sample_model

_MODEL_PARAM_FLAGS = ("intensity", "alpha", "sigma2", "mu", "rho", "sigma")


def _add_model_arguments(parser):
    parser.add_argument("--model", required=True, choices=models.model_names())
    for flag in _MODEL_PARAM_FLAGS:
        parser.add_argument(f"--{flag}", type=float, default=None,
                            help=f"model parameter {flag} (model dependent)")


def _model_from_args(args):
    params = {
        flag: getattr(args, flag)
        for flag in _MODEL_PARAM_FLAGS
        if getattr(args, flag) is not None
    }
    return models.make_model(args.model, **params)


def _direction(text, dim):
    vec = np.asarray([float(tok) for tok in text.split(",")], dtype=float)
    if vec.shape != (dim,) or not np.any(vec):
        raise ValueError(f"--direction needs {dim} comma-separated non-zero components")
    return vec / np.linalg.norm(vec)


def _write_lines(path, lines):
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(args):
    model = _model_from_args(args)
    window = Window.square(args.window, args.dim)
    pattern = sample_model(model, window, SeedStream(args.seed), h=args.h)
    write_pattern(args.out, pattern)
    return 0


def _cmd_estimate(args):
    pattern = read_pattern(args.pattern)
    basis = TaperBasis.for_window(pattern.window, args.imax, args.theta)
    direction = _direction(args.direction, pattern.d)
    norms = np.linspace(0.0, args.kmax, args.knum)
    lines = ["k_norm,estimate,taper_count"]
    for norm in norms:
        k = norm * direction
        if args.intensity == "plugin":
            est = multitaper_plugin(pattern, basis, k)
        else:
            est = multitaper_oracle(pattern, basis, k, float(args.intensity))
        lines.append(f"{float(norm)!r},{est.value!r},{est.taper_count}")
    _write_lines(args.out, lines)
    return 0


def _cmd_select(args):
    pattern = read_pattern(args.pattern)
    direction = _direction(args.direction, pattern.d)
    cfg = CvConfig(
        candidates=tuple(int(t) for t in args.candidates.split(",")),
        pilot_imax=args.pilot,
        theta=args.theta,
        pair_spacing=args.pairs_spacing,
        seed=SeedStream(args.seed),
    )
    nodes = [float(t) for t in args.nodes.split(",")]
    payload = []
    for norm in nodes:
        res = select_tapers(pattern, cfg, norm * direction)
        payload.append({
            "node_norm": norm,
            "selected_imax": res.i_max,
            "criterion_curve": {str(c): v for c, v in res.criterion_values.items()},
        })
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_experiment(args):
    with open(args.config) as fh:
        config = parse_config(fh.read())
    result = run_experiment(config, workers=args.workers)
    if not config.output:
        sys.stdout.write(result.csv_text())
    return 0


def _cmd_theory(args):
    model = _model_from_args(args)
    direction_text = args.direction or "1,0"
    direction = _direction(direction_text, 2)
    norms = np.linspace(0.0, args.kmax, args.knum)
    rows = models.theory_table(model, norms, direction)
    lines = ["model,k_norm,S"]
    for norm, value in rows:
        lines.append(f"{model.name},{norm!r},{value!r}")
    _write_lines(args.out, lines)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pointspectra",
        description="Structure-factor estimation for spatial point patterns",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a pattern and write a pattern file")
    _add_model_arguments(p)
    p.add_argument("--window", type=float, required=True, help="square half-width")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=float, default=None, help="field grid spacing (Cox models)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="estimate S(k) from a pattern file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--kmax", type=float, default=5.0)
    p.add_argument("--knum", type=int, default=26)
    p.add_argument("--direction", default="1,0")
    p.add_argument("--imax", type=int, default=8)
    p.add_argument("--theta", type=float, default=1.0 / 3.0)
    p.add_argument("--intensity", default="plugin",
                   help="'plugin' or a known intensity value")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("select", help="cross-validate the taper count at nodes")
    p.add_argument("--pattern", required=True)
    p.add_argument("--nodes", required=True, help="comma-separated node norms")
    p.add_argument("--candidates", default="2,4,8,16,25")
    p.add_argument("--pilot", type=int, required=True,
                   help="pilot i_max (8 suits clustered models, 2 repulsive ones)")
    p.add_argument("--theta", type=float, default=1.0 / 3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs-spacing", type=float, default=None)
    p.add_argument("--direction", default="1,0")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("experiment", help="run a config-driven campaign")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("theory", help="tabulate a theoretical structure factor")
    _add_model_arguments(p)
    p.add_argument("--kmax", type=float, default=5.0)
    p.add_argument("--knum", type=int, default=26)
    p.add_argument("--direction", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_theory)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
