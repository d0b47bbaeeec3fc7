"""Command-line entry point: ``rocsbb {estimate,simulate,cdf-bands}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical degeneracy.
``ROCSBB_SEED`` and ``ROCSBB_THREADS`` supply ``--seed`` / ``--threads`` when
the flags are absent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BbConfig, bb_cdf_band, bb_estimate
from .classical import bootstrap_vus_ci, plug_in_surface, vus_estimate
from .core import DegenerateInputError, InvalidArgumentError, default_grid
from .io import (
    DataParseError,
    load_csv,
    load_tmt,
    sha256_file,
    tmt_path,
    write_band_csv,
    write_draws_csv,
    write_json,
    write_study_csv,
    write_surface_csv,
)
from .simulation import ScenarioSpec, StudyConfig, run_study, scenario

EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 2, 3, 4
BUILTIN_TMT = "builtin:tmt"
METHODS = ("bb", "empirical", "kernel-nrd0", "kernel-ucv", "normal")


class UsageError(Exception):
    pass


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _sizes(text):
    try:
        sizes = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must look like 50,50,50") from None
    if len(sizes) != 3 or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be three positive integers")
    return sizes


def _add_common(p, *, with_input=True):
    if with_input:
        p.add_argument("--input", required=True, help=f"CSV path, or {BUILTIN_TMT}")
        p.add_argument("--group-column", default="group")
        p.add_argument("--value-column", default="value")
        p.add_argument("--labels", help="comma-separated group labels, lowest group first")
    p.add_argument("--seed", type=_u64, default=None)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--out", required=True, type=Path, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rocsbb", description="Three-class ROC surface estimation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate the ROC surface and VUS of a dataset")
    _add_common(est)
    est.add_argument("--method", choices=METHODS, default="bb")
    est.add_argument("--b", type=_positive_int, default=None, help="BB replicates (default 5000)")
    est.add_argument("--grid", type=int, default=50, help="grid points per axis")
    est.add_argument("--level", type=float, default=0.95)
    est.add_argument("--resamples", type=_positive_int, default=None,
                     help="bootstrap resamples for frequentist intervals (default 1000)")
    est.add_argument("--save-draws", action="store_true", help="also write per-draw VUS values")

    sim = sub.add_parser("simulate", help="run the EMSE and/or coverage simulation study")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", type=int, choices=(1, 2, 3, 4))
    src.add_argument("--spec", type=Path, help="JSON scenario file")
    _add_common(sim, with_input=False)
    sim.add_argument("--sizes", type=_sizes, default=(50, 50, 50))
    sim.add_argument("--datasets", type=_positive_int, default=300)
    sim.add_argument("--b", type=_positive_int, default=2000)
    sim.add_argument("--grid", type=int, default=50)
    sim.add_argument("--level", type=float, default=0.95)
    sim.add_argument("--study", choices=("emse", "coverage", "both"), default="both")
    sim.add_argument("--estimators", default="bb,empirical,kernel-nrd0,kernel-ucv")

    cdf = sub.add_parser("cdf-bands", help="Bayesian-bootstrap CDF with pointwise bands")
    _add_common(cdf)
    cdf.add_argument("--group", type=int, choices=(1, 2, 3), required=True)
    cdf.add_argument("--b", type=_positive_int, default=5000)
    cdf.add_argument("--level", type=float, default=0.95)
    cdf.add_argument("--grid-z", type=_positive_int, default=100)
    return parser


def _env_int(name):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def _resolve_runtime(args):
    if args.seed is None:
        env = _env_int("ROCSBB_SEED")
        args.seed = 1 if env is None else _u64(str(env))
    if args.threads is None:
        env = _env_int("ROCSBB_THREADS")
        args.threads = env if env is not None else (os.cpu_count() or 1)
    if args.threads < 1:
        raise UsageError("threads must be positive")
    if not 0.0 < args.level < 1.0:
        raise UsageError("--level must be in (0, 1)")


def _load_input(args):
    if args.input == BUILTIN_TMT:
        return load_tmt(), tmt_path()
    path = Path(args.input)
    if not path.is_file():
        raise DataParseError(f"input file not found: {path}")
    labels = args.labels.split(",") if args.labels else None
    sample = load_csv(path, args.group_column, args.value_column, labels)
    return sample, path


def _manifest(args, command, start, input_path, outputs, settings):
    entry = {
        "command": command,
        "argv": sys.argv[1:],
        "seed": args.seed,
        "settings": settings,
        "artifact_version": __version__,
        "outputs": sorted(outputs),
        "threads": args.threads,
    }
    if input_path is not None:
        entry["input"] = {"path": str(input_path), "sha256": sha256_file(input_path)}
    entry["wall_clock_seconds"] = round(time.perf_counter() - start, 6)
    return entry


def cmd_estimate(args) -> int:
    _resolve_runtime(args)
    if args.method != "bb" and args.b is not None:
        raise UsageError("--b applies only to --method bb")
    if args.method in ("bb", "normal") and args.resamples is not None:
        raise UsageError(f"--resamples does not apply to --method {args.method}")
    if args.method == "normal" and args.save_draws:
        raise UsageError("--save-draws needs a method that produces draws")
    start = time.perf_counter()
    sample, input_path = _load_input(args)
    grid = default_grid(args.grid)
    args.out.mkdir(parents=True, exist_ok=True)
    settings = {"method": args.method, "level": args.level,
                "grid": {"n_points": args.grid, "lower": 0.0001, "upper": 0.9999}}
    draws = None
    if args.method == "bb":
        b = args.b or 5000
        settings["b"] = b
        surface, post = bb_estimate(
            sample, BbConfig(b, grid, args.level, args.seed), threads=args.threads
        )
        vus, (lo, hi), count, draws = post.mean, post.interval, b, post.draws
    else:
        surface = plug_in_surface(sample, args.method, grid)
        if args.method == "normal":
            vus, lo, hi, count = vus_estimate(sample, "normal"), None, None, None
        else:
            count = args.resamples or 1000
            settings["resamples"] = count
            res = bootstrap_vus_ci(sample, args.method, count, args.level, args.seed, threads=args.threads)
            vus, (lo, hi), draws = res.point, res.interval, res.draws
    outputs = ["surface.csv", "vus.json", "manifest.json"]
    write_surface_csv(args.out / "surface.csv", surface)
    write_json(
        args.out / "vus.json",
        {"method": args.method, "vus": vus, "ci_lower": lo, "ci_upper": hi,
         "b_or_resamples": count, "seed": args.seed},
    )
    if args.save_draws and draws is not None:
        write_draws_csv(args.out / "draws.csv", draws)
        outputs.append("draws.csv")
    write_json(args.out / "manifest.json", _manifest(args, "estimate", start, input_path, outputs, settings))
    return 0


def cmd_simulate(args) -> int:
    _resolve_runtime(args)
    start = time.perf_counter()
    if args.spec is not None:
        try:
            spec = ScenarioSpec.from_dict(json.loads(args.spec.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataParseError(f"cannot read scenario file: {exc}") from None
        input_path = args.spec
    else:
        spec, input_path = scenario(args.scenario), None
    estimators = tuple(e.strip() for e in args.estimators.split(",") if e.strip())
    if args.study == "coverage":
        estimators = ("bb",)
    elif args.study == "both" and "bb" not in estimators:
        raise UsageError("--study both needs the bb estimator")
    config = StudyConfig(
        scenario=spec,
        sample_sizes=args.sizes,
        n_datasets=args.datasets,
        estimators=estimators,
        bb_config=BbConfig(args.b, default_grid(args.grid), args.level, 0),
        seed=args.seed,
        threads=args.threads,
    )
    result = run_study(config, coverage=args.study != "emse")
    args.out.mkdir(parents=True, exist_ok=True)
    write_study_csv(args.out / "study.csv", result)
    write_json(args.out / "summary.json", result.summary())
    settings = {"scenario": spec.to_dict(), "sizes": list(args.sizes), "datasets": args.datasets,
                "b": args.b, "grid": args.grid, "level": args.level, "study": args.study,
                "estimators": list(estimators)}
    write_json(args.out / "manifest.json", _manifest(
        args, "simulate", start, input_path, ["study.csv", "summary.json", "manifest.json"], settings))
    return 0


def cmd_cdf_bands(args) -> int:
    _resolve_runtime(args)
    start = time.perf_counter()
    sample, input_path = _load_input(args)
    values = sample.groups[args.group - 1]
    lo, hi = float(values.min()), float(values.max())
    pad = 0.1 * (hi - lo) if hi > lo else 1.0
    z = np.linspace(lo - pad, hi + pad, args.grid_z)
    band = bb_cdf_band(values, z, args.b, args.level, np.random.default_rng(args.seed))
    args.out.mkdir(parents=True, exist_ok=True)
    name = f"cdf_band_group{args.group}.csv"
    write_band_csv(args.out / name, band)
    settings = {"group": args.group, "b": args.b, "level": args.level, "grid_z": args.grid_z}
    write_json(args.out / "manifest.json", _manifest(args, "cdf-bands", start, input_path, [name, "manifest.json"], settings))
    return 0


COMMANDS = {"estimate": cmd_estimate, "simulate": cmd_simulate, "cdf-bands": cmd_cdf_bands}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidArgumentError) as exc:
        parser.error(str(exc))
    except DataParseError as exc:
        print(f"rocsbb: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DegenerateInputError as exc:
        print(f"rocsbb: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
