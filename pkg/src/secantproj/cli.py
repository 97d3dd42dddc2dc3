"""Command-line harness: ``secantproj {synth,sap,sweep,compare,estimate-dim}``.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure,
5 dimension estimate not found.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import synth
from ._validation import MEMORY_BUDGET_ENV
from .analysis import (
    DimensionCurve,
    bilipschitz_constants,
    compare_projections,
    estimate_dimension,
    repeated_sample_sweep,
    sweep,
)
from .exceptions import (
    DataFormatError,
    EmptySecantSetError,
    InvalidArgumentError,
    MemoryBudgetError,
    NumericalFailureError,
)
from .io import (
    ResultsDocument,
    load_dataset,
    read_curves_csv,
    save_basis,
    save_dataset,
    write_curves_csv,
    write_results,
)
from .sap import SapConfig, project, run_sap
from .secants import compute_secants

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4
EXIT_NOT_FOUND = 5


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be >= 1")
    return value


def _non_negative_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"{value} must be >= 0")
    return value


def _float_in(low=None, high=None, strict_low=False):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
        if not np.isfinite(value):
            raise argparse.ArgumentTypeError(f"{text!r} is not finite")
        if low is not None and (value <= low if strict_low else value < low):
            raise argparse.ArgumentTypeError(f"{value} is out of range")
        if high is not None and value > high:
            raise argparse.ArgumentTypeError(f"{value} must be <= {high}")
        return value

    return parse


def _dims(text):
    """``a:b`` (inclusive) or a comma list such as ``1,2,5``."""
    try:
        if ":" in text:
            lo, hi = (int(part) for part in text.split(":"))
            if lo < 1 or hi < lo:
                raise argparse.ArgumentTypeError(f"invalid dimension range {text!r}")
            return list(range(lo, hi + 1))
        dims = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimension list {text!r}") from None
    if any(d < 1 for d in dims) or any(b <= a for a, b in zip(dims, dims[1:])):
        raise argparse.ArgumentTypeError(f"dimensions must be positive and increasing: {text!r}")
    return dims


def _add_common(p):
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="worker threads (default: all CPUs); never changes results")
    p.add_argument("--memory-budget", type=_positive_int, default=None,
                   help=f"byte limit for the secant matrix (default 8 GiB, env {MEMORY_BUDGET_ENV})")
    p.add_argument("--has-header", action="store_true", help="skip the first row of a CSV input")


def _add_sap_flags(p):
    p.add_argument("--iterations", type=_non_negative_int, default=100,
                   help="maximum number of SAP steps (default 100)")
    p.add_argument("--alpha", type=_float_in(0.0, 1.0), default=0.01,
                   help="shift parameter in [0, 1] (default 0.01)")
    p.add_argument("--threshold", type=_float_in(0.0), default=None,
                   help="drop secants shorter than this before normalizing")
    p.add_argument("--stop-tolerance", type=_float_in(0.0), default=None,
                   help="stop when the best value gains at most this over 20 steps")
    p.add_argument("--return-best", action="store_true",
                   help="report the best iterate instead of the last")
    p.add_argument("--record-timing", action="store_true",
                   help="add wall-clock timing to the results JSON (breaks byte-identical reruns)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="secantproj",
        description="Secant-avoidance projections and secant-based dimension estimates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("generator", choices=sorted(synth.GENERATORS), help="manifold to sample")
    p.add_argument("--count", type=_positive_int, default=256, help="number of points")
    p.add_argument("--seed", type=int, default=0, help="sampling and embedding seed")
    p.add_argument("--target-dim", type=_positive_int, default=15,
                   help="ambient dimension after isometric embedding (not used by trig-moment)")
    p.add_argument("--R", dest="R", type=_float_in(0.0, strict_low=True), default=2.0,
                   help="torus major radius")
    p.add_argument("--r", dest="r", type=_float_in(0.0, strict_low=True), default=1.0,
                   help="torus minor radius")
    p.add_argument("--sigma", type=_float_in(0.0), default=0.0,
                   help="standard deviation of added Gaussian noise")
    p.add_argument("--noise-seed", type=int, default=None,
                   help="seed for the noise (default: --seed + 1)")
    p.add_argument("-o", "--output", required=True,
                   help="output file; .csv writes CSV, anything else the SEC1 binary format")

    p = sub.add_parser("sap", help="compute one projection")
    p.add_argument("input", help="dataset (.csv or SEC1 binary)")
    p.add_argument("--m", type=_positive_int, required=True, help="target dimension")
    _add_sap_flags(p)
    _add_common(p)
    p.add_argument("-o", "--output-dir", required=True, help="directory for result files")
    p.add_argument("--format", choices=["csv", "sec"], default="csv",
                   help="file format for the basis and projected data")

    p = sub.add_parser("sweep", help="min projected secant norm against dimension")
    p.add_argument("input", help="dataset (.csv or SEC1 binary)")
    p.add_argument("--dims", type=_dims, required=True, help="a:b inclusive, or 1,2,5")
    p.add_argument("--sample-size", type=_positive_int, default=None,
                   help="subsample this many points per run")
    p.add_argument("--runs", type=_positive_int, default=1, help="number of subsampled runs")
    p.add_argument("--seed", type=int, default=0, help="base seed for subsampling")
    _add_sap_flags(p)
    _add_common(p)
    p.add_argument("-o", "--output-dir", required=True, help="directory for result files")

    p = sub.add_parser("compare", help="naive vs PCA vs SAP at one dimension")
    p.add_argument("input", help="dataset (.csv or SEC1 binary)")
    p.add_argument("--m", type=_positive_int, required=True, help="target dimension")
    _add_sap_flags(p)
    _add_common(p)
    p.add_argument("-o", "--output", default=None, help="optional results JSON")

    p = sub.add_parser("estimate-dim", help="read off embedding and manifold dimension")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--curve", help="curve CSV (dim,min_norm,run_id); runs are averaged")
    src.add_argument("--data", help="dataset to sweep first")
    p.add_argument("--dims", type=_dims, default=None, help="dimensions to sweep with --data")
    p.add_argument("--jump-ratio", type=_float_in(1.0, strict_low=True), default=2.0,
                   help="required growth over the previous dimension (default 2)")
    p.add_argument("--floor", type=_float_in(0.0), default=0.1,
                   help="minimum min-norm at the chosen dimension (default 0.1)")
    _add_sap_flags(p)
    _add_common(p)
    return parser


def _config(args, m):
    return SapConfig(
        m=m,
        iterations=args.iterations,
        alpha=args.alpha,
        stop_tolerance=args.stop_tolerance,
        return_best=args.return_best,
    )


def _config_echo(args, **extra):
    echo = {
        "iterations": args.iterations,
        "alpha": args.alpha,
        "threshold": args.threshold,
        "stop_tolerance": args.stop_tolerance,
        "return_best": args.return_best,
    }
    echo.update(extra)
    return echo


def _history(result):
    return [[rec.iteration, rec.index, rec.min_norm] for rec in result.history]


def cmd_synth(args):
    make = synth.GENERATORS[args.generator]
    if args.generator == "trig-moment":
        data = make(args.count, args.seed)
    elif args.generator == "torus":
        data = make(args.count, args.seed, R=args.R, r=args.r, target_dim=args.target_dim)
    else:
        data = make(args.count, args.seed, target_dim=args.target_dim)
    if args.sigma > 0:
        noise_seed = args.seed + 1 if args.noise_seed is None else args.noise_seed
        data = synth.add_gaussian_noise(data, args.sigma, noise_seed)
    save_dataset(data, args.output)
    print(f"k={data.k} n={data.n} seed={args.seed} -> {args.output}")
    return EXIT_OK


def cmd_sap(args):
    data = load_dataset(args.input, has_header=args.has_header)
    config = _config(args, args.m)
    if config.m > data.n:
        raise InvalidArgumentError(f"--m {config.m} exceeds the data dimension {data.n}")
    started = time.perf_counter()
    secants = compute_secants(
        data, threshold=args.threshold, memory_budget=args.memory_budget, n_jobs=args.workers
    )
    result = run_sap(secants, config, args.workers)
    bounds = bilipschitz_constants(result.basis, secants, args.workers)
    elapsed = time.perf_counter() - started

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = ".csv" if args.format == "csv" else ".sec"
    basis_file = "basis" + ext
    projected_file = "projected" + ext
    save_basis(result.basis, out / basis_file)
    if result.return_best:
        save_basis(result.final_basis, out / ("final_basis" + ext))
    save_dataset(project(result.basis, data), out / projected_file)
    doc = ResultsDocument(
        kind="sap",
        config=_config_echo(args, input=str(args.input), m=config.m),
        outputs={
            "points": data.k,
            "secants": secants.p,
            "dropped_duplicates": secants.dropped_duplicates,
            "dropped_short": secants.dropped_short,
            "iterations_run": result.iterations_run,
            "initial_min_norm": result.initial_min_norm,
            "final_min_norm": result.final_min_norm,
            "best_min_norm": result.best_min_norm,
            "best_iteration": result.best_iteration,
            "m1": bounds.m1,
            "m2": bounds.m2,
            "history": _history(result),
            "basis_file": basis_file,
            "projected_file": projected_file,
        },
        timing={"seconds": elapsed} if args.record_timing else None,
    )
    write_results(doc, out / "results.json")
    print(f"final_min_norm={result.final_min_norm:.6f} best_min_norm={result.best_min_norm:.6f}"
          f" (iteration {result.best_iteration})")
    return EXIT_OK


def _curve_record(curve):
    return {
        "dims": list(curve.dims),
        "min_norms": list(curve.min_norms),
        "init_norms": list(curve.init_norms),
        "final_norms": list(curve.final_norms),
        "points": curve.meta.get("points"),
        "secants": curve.meta.get("secants"),
        "sample_seed": curve.meta.get("sample_seed"),
    }


def cmd_sweep(args):
    data = load_dataset(args.input, has_header=args.has_header)
    if max(args.dims) > data.n:
        raise InvalidArgumentError(f"--dims reaches {max(args.dims)} but the data live in R^{data.n}")
    if args.sample_size is not None and args.sample_size > data.k:
        raise InvalidArgumentError(f"--sample-size {args.sample_size} exceeds {data.k} points")
    config = _config(args, args.dims[0])
    started = time.perf_counter()
    if args.sample_size is None and args.runs == 1:
        curves = [sweep(data, args.dims, config, args.threshold, args.memory_budget, args.workers)]
        mean = np.array(curves[0].min_norms)
        spread = np.zeros_like(mean)
    else:
        size = data.k if args.sample_size is None else args.sample_size
        rep = repeated_sample_sweep(
            data, size, args.runs, args.dims, config, seed=args.seed,
            threshold=args.threshold, memory_budget=args.memory_budget, n_jobs=args.workers,
        )
        curves, mean, spread = rep.curves, rep.mean, rep.spread
    elapsed = time.perf_counter() - started
    estimate = estimate_dimension(DimensionCurve(args.dims, mean))

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_curves_csv(curves, out / "curve.csv")
    doc = ResultsDocument(
        kind="sweep",
        config=_config_echo(
            args, input=str(args.input), dims=args.dims, sample_size=args.sample_size,
            runs=args.runs, seed=args.seed,
        ),
        outputs={
            "curves": [_curve_record(c) for c in curves],
            "mean": mean,
            "spread": spread,
            "embedding_dim": estimate.embedding_dim,
            "manifold_dim": estimate.manifold_dim,
            "curve_file": "curve.csv",
        },
        timing={"seconds": elapsed} if args.record_timing else None,
    )
    write_results(doc, out / "results.json")
    for dim, value in zip(args.dims, mean):
        print(f"m={dim:3d} min_norm={value:.6f}")
    return EXIT_OK


def cmd_compare(args):
    data = load_dataset(args.input, has_header=args.has_header)
    if args.m > data.n:
        raise InvalidArgumentError(f"--m {args.m} exceeds the data dimension {data.n}")
    started = time.perf_counter()
    comparison = compare_projections(
        data, args.m, _config(args, args.m), threshold=args.threshold,
        memory_budget=args.memory_budget, n_jobs=args.workers,
    )
    elapsed = time.perf_counter() - started
    print(f"{'method':<8}min_norm")
    for name, value in comparison.as_dict().items():
        print(f"{name:<8}{value:.6f}")
    if args.output:
        doc = ResultsDocument(
            kind="compare",
            config=_config_echo(args, input=str(args.input), m=args.m),
            outputs=dict(comparison.as_dict(), history=_history(comparison.result)),
            timing={"seconds": elapsed} if args.record_timing else None,
        )
        write_results(doc, args.output)
    return EXIT_OK


def cmd_estimate_dim(args):
    if args.curve:
        curves = read_curves_csv(args.curve)
        dims = curves[0].dims
        if any(c.dims != dims for c in curves):
            raise DataFormatError(f"{args.curve}: runs cover different dimensions")
        mean = np.mean([c.min_norms for c in curves], axis=0)
        curve = DimensionCurve(dims, mean)
    else:
        data = load_dataset(args.data, has_header=args.has_header)
        dims = args.dims or list(range(1, data.n + 1))
        curve = sweep(data, dims, _config(args, dims[0]), args.threshold,
                      args.memory_budget, args.workers)
    estimate = estimate_dimension(curve, args.jump_ratio, args.floor)
    if not estimate.found:
        print("not found")
        return EXIT_NOT_FOUND
    print(f"embedding_dim={estimate.embedding_dim} manifold_dim={estimate.manifold_dim}")
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "sap": cmd_sap,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "estimate-dim": cmd_estimate_dim,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (DataFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidArgumentError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailureError, EmptySecantSetError, MemoryBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
