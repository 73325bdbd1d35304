"""Command-line front end: walk, sweep, localization.

Every run writes CSV tables plus a manifest.json recording the tool
version, the fully resolved parameters (angles in radians), and a sha256
digest of each output file.  Re-running from a manifest reproduces the
CSV bodies byte for byte; the worker count never changes output bits.

Exit codes: 0 success, 2 usage error, 3 simulation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .engine import (
    WalkConfig,
    localization_report,
    run_walk,
    sweep_theta,
)
from .observables import ObservableSeries, ProbabilityDistributions
from .randomness import RandomnessKind, RandomnessMode, Seed
from .translate import SimulationError, WalkVariant, max_steps

DEFAULT_SEED = 42
DEFAULT_GRID = 41
DEFAULT_WINDOW = 0.25


class UsageError(Exception):
    pass


# -- formatting ----------------------------------------------------------

def _fmt(value) -> str:
    """17 significant digits: lossless round-trip for float64."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def _series_csv(series: ObservableSeries) -> str:
    rows = zip(
        series.time,
        series.entropy,
        series.overlap,
        series.pop_plus,
        series.pop_minus,
        series.variance,
    )
    return _csv(["t", "ES", "overlap", "pop_plus", "pop_minus", "variance"], rows)


def _dist_csv(dist: ProbabilityDistributions) -> str:
    rows = zip(dist.x, dist.p_plus, dist.p_minus, dist.p_total)
    return _csv(["x", "P_plus", "P_minus", "P_total"], rows)


def _sweep_csv(result) -> str:
    rows = zip(
        result.thetas,
        result.es_mean,
        result.es_std,
        result.ov_mean,
        result.ov_std,
        result.flagged,
    )
    return _csv(["theta", "es_mean", "es_std", "ov_mean", "ov_std", "flagged"], rows)


def _localization_csv(report) -> str:
    header = [
        "realization",
        "exponent",
        "tail_exp_rate",
        "tail_exp_r2",
        "tail_gauss_r2",
        "tail_r_lo",
        "tail_r_hi",
        "tail_points",
    ]
    rows = []
    for r in range(report.realizations):
        t = report.tails[r]
        rows.append(
            (str(r), report.exponents[r], t.exp_rate, t.exp_r2, t.gauss_r2,
             t.r_lo, t.r_hi, t.n_points)
        )
    t = report.ensemble_tail
    rows.append(
        ("ensemble", report.ensemble_exponent, t.exp_rate, t.exp_r2, t.gauss_r2,
         t.r_lo, t.r_hi, t.n_points)
    )
    return _csv(header, rows)


def _write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".qwalk-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- parameter resolution ------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Discrete-time quantum walk simulator (CSV output, "
        "reproducible manifests).",
    )
    parser.add_argument(
        "--version", action="version", version=f"qwalk {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument(
            "--variant",
            required=True,
            choices=[v.value for v in WalkVariant],
        )
        sp.add_argument(
            "--n", type=int, required=True,
            help="lattice half width; sites run -n..-1, 1..n (no 0)",
        )
        sp.add_argument(
            "--steps", type=int, default=None,
            help="walk steps (default: the variant's maximum for --n)",
        )
        sp.add_argument("--phi1", type=float, default=None,
                        help="coin phase phi1 (default pi/2)")
        sp.add_argument("--phi2", type=float, default=None,
                        help="coin phase phi2 (default pi/2)")
        sp.add_argument(
            "--mode", choices=[k.value for k in RandomnessKind],
            default="none", help="coin randomness: none, time, or space",
        )
        sp.add_argument("--dtheta", type=float, default=None,
                        help="disorder half width (required for random modes)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="master seed (default 42)")
        sp.add_argument("--window", type=float, default=DEFAULT_WINDOW,
                        help="steady-state window fraction (default 0.25)")
        sp.add_argument("--degrees", action="store_true",
                        help="interpret angle flags in degrees")
        sp.add_argument("--out", default=".", help="output directory")

    walk = sub.add_parser("walk", help="single walk: observable series")
    common(walk)
    walk.add_argument("--theta", type=float, required=True)
    walk.add_argument(
        "--snapshot", type=int, action="append", default=None, metavar="T",
        help="write dist_t<T>.csv for this step (repeatable)",
    )
    walk.add_argument("--realization", type=int, default=0,
                      help="realization index of the coin schedule")

    sweep = sub.add_parser("sweep", help="steady state over a theta grid")
    common(sweep)
    sweep.add_argument(
        "--grid", "--theta0-grid", dest="grid", type=int, default=DEFAULT_GRID,
        help=f"number of theta grid points (default {DEFAULT_GRID})",
    )
    sweep.add_argument("--theta-min", type=float, default=None,
                       help="grid start (default 0, or dtheta in random modes)")
    sweep.add_argument("--theta-max", type=float, default=None,
                       help="grid end (default pi, or pi-dtheta in random modes)")
    sweep.add_argument("--realizations", type=int, default=None,
                       help="ensemble size per grid point "
                       "(default 1, or 100 in random modes)")
    sweep.add_argument("--workers", type=int, default=None,
                       help="process pool size (never affects output bits)")

    loc = sub.add_parser(
        "localization", help="variance exponents and tail fits (random modes)"
    )
    common(loc)
    loc.add_argument("--theta", type=float, required=True)
    loc.add_argument("--realizations", type=int, default=100)
    loc.add_argument("--workers", type=int, default=None)

    return parser


def _angle(value: float | None, default: float, degrees: bool) -> float:
    if value is None:
        return default
    return math.radians(value) if degrees else value


def _resolve(args: argparse.Namespace) -> dict:
    """Expand flags into a fully resolved parameter mapping, radians only."""
    variant = WalkVariant(args.variant)
    if args.n < 2:
        raise UsageError(f"--n must be >= 2, got {args.n}")
    limit = max_steps(variant, args.n)
    steps = args.steps if args.steps is not None else limit
    phi1 = _angle(args.phi1, math.pi / 2, args.degrees)
    phi2 = _angle(args.phi2, math.pi / 2, args.degrees)
    kind = RandomnessKind(args.mode)
    if kind is RandomnessKind.NONE:
        if args.dtheta is not None:
            raise UsageError("--dtheta is only meaningful with --mode time/space")
        dtheta = 0.0
    else:
        if args.dtheta is None:
            raise UsageError(f"--mode {kind.value} requires --dtheta")
        dtheta = _angle(args.dtheta, 0.0, args.degrees)
        if dtheta <= 0:
            raise UsageError(f"--dtheta must be positive, got {args.dtheta}")
    if not 0 < args.window <= 1:
        raise UsageError(f"--window must lie in (0, 1], got {args.window}")

    params = {
        "command": args.command,
        "variant": variant.value,
        "n": args.n,
        "steps": steps,
        "mode": kind.value,
        "dtheta": dtheta,
        "phi1": phi1,
        "phi2": phi2,
        "seed": args.seed,
        "window": args.window,
    }

    if args.command == "walk":
        params["theta"] = _angle(args.theta, 0.0, args.degrees)
        params["realization"] = args.realization
        snaps = sorted(set(args.snapshot or ()))
        for k in snaps:
            if not 0 <= k <= steps:
                raise UsageError(f"--snapshot {k} outside 0..{steps}")
        params["snapshots"] = snaps
    elif args.command == "sweep":
        lo_default = dtheta if kind is not RandomnessKind.NONE else 0.0
        hi_default = math.pi - lo_default
        lo = _angle(args.theta_min, lo_default, args.degrees)
        hi = _angle(args.theta_max, hi_default, args.degrees)
        if not hi > lo:
            raise UsageError(f"--theta-max must exceed --theta-min ({lo} .. {hi})")
        if args.grid < 2:
            raise UsageError(f"--grid must be >= 2, got {args.grid}")
        params["theta_min"] = lo
        params["theta_max"] = hi
        params["grid"] = args.grid
        if args.realizations is not None and args.realizations < 1:
            raise UsageError(f"--realizations must be >= 1, got {args.realizations}")
        params["realizations"] = args.realizations if args.realizations is not None \
            else (100 if kind is not RandomnessKind.NONE else 1)
    else:  # localization
        if kind is RandomnessKind.NONE:
            raise UsageError("localization requires --mode time or --mode space")
        params["theta"] = _angle(args.theta, 0.0, args.degrees)
        if args.realizations < 1:
            raise UsageError(f"--realizations must be >= 1, got {args.realizations}")
        params["realizations"] = args.realizations

    return params


def _mode_of(params: dict, theta: float) -> RandomnessMode:
    kind = RandomnessKind(params["mode"])
    if kind is RandomnessKind.NONE:
        return RandomnessMode.none(theta, phi1=params["phi1"], phi2=params["phi2"])
    if kind is RandomnessKind.TIME:
        return RandomnessMode.time_random(
            theta, params["dtheta"], phi1=params["phi1"], phi2=params["phi2"]
        )
    return RandomnessMode.space_random(
        theta, params["dtheta"], phi1=params["phi1"], phi2=params["phi2"]
    )


# -- execution -----------------------------------------------------------

def _execute_walk(params: dict) -> dict[str, str]:
    config = WalkConfig(
        variant=WalkVariant(params["variant"]),
        n_half=params["n"],
        steps=params["steps"],
        mode=_mode_of(params, params["theta"]),
        seed=Seed(params["seed"], params["realization"]),
        window_fraction=params["window"],
        record_distributions=tuple(params["snapshots"]),
    )
    series = run_walk(config)
    files = {"series.csv": _series_csv(series)}
    for k in params["snapshots"]:
        files[f"dist_t{k}.csv"] = _dist_csv(series.snapshots[k])
    return files


def _execute_sweep(params: dict, workers: int | None) -> dict[str, str]:
    base = WalkConfig(
        variant=WalkVariant(params["variant"]),
        n_half=params["n"],
        steps=params["steps"],
        mode=_mode_of(params, params["theta_min"]),
        seed=Seed(params["seed"], 0),
        window_fraction=params["window"],
    )
    grid = np.linspace(params["theta_min"], params["theta_max"], params["grid"])
    result = sweep_theta(base, grid, params["realizations"], workers=workers)
    return {"sweep.csv": _sweep_csv(result)}


def _execute_localization(params: dict, workers: int | None) -> dict[str, str]:
    config = WalkConfig(
        variant=WalkVariant(params["variant"]),
        n_half=params["n"],
        steps=params["steps"],
        mode=_mode_of(params, params["theta"]),
        seed=Seed(params["seed"], 0),
        window_fraction=params["window"],
    )
    report = localization_report(config, params["realizations"], workers=workers)
    return {
        "localization.csv": _localization_csv(report),
        "dist_final_ensemble.csv": _dist_csv(report.ensemble_distribution),
    }


def _execute(params: dict, workers: int | None = None) -> dict[str, str]:
    command = params["command"]
    if command == "walk":
        return _execute_walk(params)
    if command == "sweep":
        return _execute_sweep(params, workers)
    if command == "localization":
        return _execute_localization(params, workers)
    raise UsageError(f"unknown command {command!r} in manifest")


def _write_outputs(out_dir: str, params: dict, files: dict[str, str]) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    digests = {}
    written = []
    for name, text in sorted(files.items()):
        path = os.path.join(out_dir, name)
        _write_atomic(path, text)
        digests[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        written.append(path)
    manifest = {
        "tool": "qwalk",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "params": params,
        "outputs": digests,
    }
    mpath = os.path.join(out_dir, "manifest.json")
    _write_atomic(mpath, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(mpath)
    return written


def rerun_manifest(
    manifest_path: str, out_dir: str, workers: int | None = None
) -> list[str]:
    """Reproduce a run from its manifest; CSV bodies come out byte-identical."""
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    params = manifest["params"]
    files = _execute(params, workers=workers)
    return _write_outputs(out_dir, params, files)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params = _resolve(args)
        workers = getattr(args, "workers", None)
        files = _execute(params, workers=workers)
        written = _write_outputs(args.out, params, files)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
