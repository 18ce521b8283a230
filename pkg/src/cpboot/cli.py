"""Command-line driver: ``cpboot detect|test|power``.

Every report is a JSON object ``{"manifest": ..., "result": ...}``. The
manifest lists every resolved parameter, so a run can be repeated exactly.
Exit status is 0 on success, 1 on input/validation errors and 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, bootstrap_changepoint_distribution, percentile_interval
from .power import DESIGNS, NULL_METHODS, TestConfig, ci_length_test, power_curve
from .rng import Stream
from .scan import scan_changepoint
from .series import SeriesError, load_csv

DEFAULT_GRID = (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0)


def dumps(obj) -> str:
    """JSON text with floats written to 17 significant digits."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _grid(text: str):
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("grid must list at least one effect size")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _unit_interval(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--min-segment", type=_positive_int, default=3)
    common.add_argument("--alpha-ci", type=_unit_interval, default=0.05)
    common.add_argument("--alpha-test", type=_unit_interval, default=0.05)
    common.add_argument("--outer", type=_positive_int, default=200, help="outer repetitions R")
    common.add_argument("--null", choices=NULL_METHODS, default="demean")
    common.add_argument("--out", type=Path, help="also write the JSON report here")
    common.add_argument("--csv", type=Path, help="write tabular output here")
    common.add_argument("--workers", type=_positive_int, default=1,
                        help="processes to use; does not change results")

    parser = argparse.ArgumentParser(prog="cpboot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cpboot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", parents=[common], help="locate the changepoint")
    p.add_argument("input", type=Path)
    p.add_argument("--bootstrap", type=_positive_int, default=None, metavar="B",
                   help="also report a percentile interval from B replicates")

    p = sub.add_parser("test", parents=[common], help="interval-length changepoint test")
    p.add_argument("input", type=Path)
    p.add_argument("--bootstrap", type=_positive_int, default=1000, metavar="B")

    p = sub.add_parser("power", parents=[common], help="simulated power curve")
    p.add_argument("--bootstrap", type=_positive_int, default=1000, metavar="B")
    p.add_argument("--grid", type=_grid, default=list(DEFAULT_GRID))
    p.add_argument("--n", type=_positive_int, default=100)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--c0", type=_positive_int, default=None)
    p.add_argument("--design", choices=DESIGNS, default="fresh")
    p.add_argument("--repeats", type=_positive_int, default=1)
    return parser


def _manifest(args, input_digest=None) -> dict:
    power = args.command == "power"
    n = args.n if power else None
    return {
        "command": args.command,
        "tool_version": __version__,
        "seed": args.seed,
        "bootstrap": args.bootstrap,
        "outer": args.outer,
        "alpha_ci": args.alpha_ci,
        "alpha_test": args.alpha_test,
        "min_segment": args.min_segment,
        "null_method": args.null,
        "grid": args.grid if power else None,
        "n": n,
        "sigma": args.sigma if power else None,
        "c0": (args.c0 if args.c0 is not None else n // 2) if power else None,
        "design": args.design if power else None,
        "repeats": args.repeats if power else None,
        "input": str(args.input) if not power else None,
        "input_digest": input_digest,
    }


def _bootstrap_cfg(args, b=None) -> BootstrapConfig:
    return BootstrapConfig(
        b_inner=b if b is not None else args.bootstrap,
        r_outer=args.outer,
        alpha_ci=args.alpha_ci,
        seed=args.seed,
        min_segment=args.min_segment,
        workers=args.workers,
    )


def _fit(f) -> dict:
    return {"beta0": f.beta0, "beta1": f.beta1, "sigma2_mle": f.sigma2_mle, "m": f.m}


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_detect(args) -> dict:
    series = load_csv(args.input)
    scan = scan_changepoint(series, args.min_segment)
    result = {
        "n": series.n,
        "c_hat": scan.c_hat,
        "t_at_c_hat": float(series.t[scan.c_hat - 1]),
        "max_statistic": scan.max_statistic,
        "k": scan.ks.tolist(),
        "statistic": scan.statistic.tolist(),
        "left_fit": _fit(scan.left_fit),
        "right_fit": _fit(scan.right_fit),
        "full_fit": _fit(scan.full_fit),
    }
    if args.bootstrap is not None:
        cfg = _bootstrap_cfg(args, args.bootstrap)
        dist = bootstrap_changepoint_distribution(series, cfg, Stream(args.seed).child("detect"))
        ci = percentile_interval(dist, args.alpha_ci)
        values, counts = np.unique(dist.values, return_counts=True)
        result["interval"] = {
            "lower": ci.lower, "upper": ci.upper, "length": ci.length, "level": ci.level,
        }
        result["bootstrap_counts"] = [[int(v), int(c)] for v, c in zip(values, counts)]
    if args.csv:
        _write_csv(args.csv, ["k", "statistic"],
                   zip(scan.ks.tolist(), scan.statistic.tolist()))
    return {"manifest": _manifest(args, _digest(args.input)), "result": result}


def cmd_test(args) -> dict:
    series = load_csv(args.input)
    cfg = TestConfig(_bootstrap_cfg(args), args.alpha_test, args.null)
    rep = ci_length_test(series, cfg, Stream(args.seed))
    result = {
        "null_method": rep.null_method,
        "c_hat": rep.c_hat,
        "t_star": rep.t_star,
        "lambda1_point": rep.lambda1_point,
        "reject": rep.reject,
        "power": rep.power,
        "q_hat": rep.q_hat,
        "lambda1_samples": rep.lambda1_samples.tolist(),
        "lambda0_samples": rep.lambda0_samples.tolist(),
    }
    if args.csv:
        _write_csv(args.csv, ["repetition", "lambda1", "lambda0"],
                   zip(range(rep.lambda1_samples.size), rep.lambda1_samples.tolist(),
                       rep.lambda0_samples.tolist()))
    return {"manifest": _manifest(args, _digest(args.input)), "result": result}


def cmd_power(args) -> dict:
    if not args.sigma > 0:
        raise ValueError(f"--sigma must be positive, got {args.sigma}")
    cfg = TestConfig(_bootstrap_cfg(args), args.alpha_test, args.null)
    curve = power_curve(args.grid, args.n, args.sigma, cfg, Stream(args.seed), c0=args.c0,
                        design=args.design, repeats=args.repeats)
    rows = list(zip(curve.effect_grid.tolist(), curve.power.tolist()))
    if args.csv:
        _write_csv(args.csv, ["effect_m", "power"], rows)
    result = {"rows": [{"effect_m": m, "power": p} for m, p in rows]}
    if args.design == "fresh":
        result["t_star"] = [pt.t_star for pt in curve.points]
    return {"manifest": _manifest(args), "result": result}


COMMANDS = {"detect": cmd_detect, "test": cmd_test, "power": cmd_power}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except (SeriesError, ValueError, OSError) as exc:
        print(f"cpboot {args.command}: error: {exc}", file=sys.stderr)
        return 1
    text = dumps(report) + "\n"
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
