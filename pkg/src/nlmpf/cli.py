"""Command-line interface.

Subcommands: ``simulate`` (clean image + seed -> counts), ``denoise``
(counts -> estimate), ``oracle`` (clean + counts -> oracle estimate),
``evaluate`` (clean + estimate -> metrics CSV), ``rate-check`` (Monte-Carlo
rate experiment -> CSV) and ``bench`` (hot-loop timing).

Exit codes: 0 success, 1 validation/usage error, 2 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .estimators import Bandwidth
from .grid import as_count_image, as_intensity_image
from .io import FORMATS, ParseError, load_run_config, read_image, write_image
from .metrics import mse, nmise, psnr
from .phantoms import PHANTOMS, phantom, recommended_config
from .pipeline import FilterConfig, MetricsReport, denoise, oracle_image
from .noise import sample_poisson
from .theory import HolderSpec, rate_experiment


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we want exit 1
        self.print_usage(sys.stderr)
        raise _UsageError(message)


_FILTER_KEYS = ("search", "patch", "d", "delta", "mu", "hg", "kernel", "variant")


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--search", type=int, help="search window width (e.g. 19 for 19x19)")
    p.add_argument("--patch", type=int, help="patch width (e.g. 13 for 13x13)")
    p.add_argument("--d", type=int, help="post-smoothing radius in pixels")
    p.add_argument("--delta", type=float, help="count threshold for post-smoothing (default 15)")
    p.add_argument("--mu", type=float, help="adaptive bandwidth factor")
    p.add_argument("--hg", type=float, help="gaussian width h_g (alias sigma_h)")
    p.add_argument("--kernel", choices=("k0", "gaussian", "rect"), help="patch kernel")
    p.add_argument("--variant", choices=("plain", "split"), help="estimator variant")


def build_parser() -> _Parser:
    parser = _Parser(prog="nlmpf", description="Non-local means filtering for Poisson-noise images")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", help="sample Poisson counts from a clean image")
    p.add_argument("--input", help="clean intensity image")
    p.add_argument("--output", help="destination count image")
    p.add_argument("--seed", type=int, help="64-bit RNG seed")
    p.add_argument("--config", help="key=value run configuration file")
    p.add_argument("--format", choices=FORMATS, default="float_csv", help="output format")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("denoise", help="run the two-step filter on a count image")
    p.add_argument("--input", help="observed count image")
    p.add_argument("--output", help="destination estimate image")
    p.add_argument("--config", help="key=value run configuration file")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    p.add_argument("--format", choices=FORMATS, default="float_csv", help="output format")
    _add_filter_flags(p)
    p.set_defaults(func=_cmd_denoise)

    p = sub.add_parser("oracle", help="oracle estimate from the clean image's similarities")
    p.add_argument("--clean", required=True, help="clean intensity image")
    p.add_argument("--input", required=True, help="observed count image")
    p.add_argument("--output", required=True, help="destination estimate image")
    p.add_argument("--search", type=int, default=19, help="search window width")
    p.add_argument("--bandwidth", type=float, default=1.0, help="constant bandwidth H")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--format", choices=FORMATS, default="float_csv")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("evaluate", help="quality metrics of an estimate vs the clean image")
    p.add_argument("--clean", required=True, help="clean intensity image")
    p.add_argument("--estimate", required=True, help="reconstruction to score")
    p.add_argument("--output", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("rate-check", help="Monte-Carlo convergence-rate experiment")
    p.add_argument("--estimator", choices=("oracle", "split_adaptive"), default="oracle")
    p.add_argument("--beta", type=float, default=1.0, help="Hoelder exponent")
    p.add_argument("--lipschitz", type=float, default=1.0, help="Hoelder constant L")
    p.add_argument("--gamma-sup", type=float, default=4.0, help="sup intensity")
    p.add_argument("--sizes", default="4096,16384,65536",
                   help="comma-separated pixel counts (perfect squares)")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--samples", type=int, default=8, help="sample pixels per axis")
    p.add_argument("--alpha", type=float, default=0.25, help="patch-scaling exponent")
    p.add_argument("--output", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_rate_check)

    p = sub.add_parser("bench", help="time the filtering hot loop on a phantom")
    p.add_argument("--phantom", choices=sorted(PHANTOMS), default="spots")
    p.add_argument("--side", type=int, default=128, help="phantom side length")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    _add_filter_flags(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"nlmpf: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version print and exit 0
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args) or 0
    except ParseError as exc:
        print(f"nlmpf: parse error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"nlmpf: i/o error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"nlmpf: error: {exc}", file=sys.stderr)
        return 1


cli_main = main


def entry() -> None:
    raise SystemExit(main())


# --- subcommand bodies -------------------------------------------------------


def _merged(args, keys=("input", "output", "seed", "threads")) -> dict:
    """File config values overridden by explicit CLI flags."""
    merged = load_run_config(args.config) if getattr(args, "config", None) else {}
    for key in keys + _FILTER_KEYS:
        if hasattr(args, key) and getattr(args, key) is not None:
            merged[key] = getattr(args, key)
    return merged

def _filter_config(merged: dict) -> FilterConfig:
    kwargs = {("h_g" if k == "hg" else k): v for k, v in merged.items() if k in _FILTER_KEYS}
    return FilterConfig(**kwargs)


def _require(merged: dict, key: str):
    if key not in merged:
        raise ValueError(f"missing required setting {key!r} (flag or config file)")
    return merged[key]


def _cmd_simulate(args) -> int:
    merged = _merged(args)
    clean = as_intensity_image(read_image(_require(merged, "input")))
    counts = sample_poisson(clean, int(_require(merged, "seed")))
    write_image(counts, _require(merged, "output"), args.format)
    return 0


def _cmd_denoise(args) -> int:
    merged = _merged(args)
    cfg = _filter_config(merged)
    counts = as_count_image(read_image(_require(merged, "input")))
    out = denoise(counts, cfg, n_jobs=merged.get("threads"))
    write_image(out, _require(merged, "output"), args.format)
    return 0


def _cmd_oracle(args) -> int:
    clean = as_intensity_image(read_image(args.clean))
    counts = as_count_image(read_image(args.input))
    out = oracle_image(clean, counts, args.search, Bandwidth.constant(args.bandwidth),
                       n_jobs=args.threads)
    write_image(out, args.output, args.format)
    return 0


def _cmd_evaluate(args) -> int:
    clean = as_intensity_image(read_image(args.clean))
    estimate = np.asarray(read_image(args.estimate), dtype=np.float64)
    t0 = time.perf_counter()
    report = MetricsReport(
        nmise=nmise(estimate, clean),
        psnr=psnr(estimate, clean),
        mse=mse(estimate, clean),
        runtime_ms=int(1000 * (time.perf_counter() - t0)),
    )
    text = "nmise,psnr,mse,runtime_ms\n" + (
        f"{report.nmise:.9g},{report.psnr:.9g},{report.mse:.9g},{report.runtime_ms}\n"
    )
    if args.output:
        with open(args.output, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_rate_check(args) -> int:
    spec = HolderSpec(beta=args.beta, L=args.lipschitz, Gamma=args.gamma_sup)
    sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    result = rate_experiment(spec, args.estimator, sizes, args.trials, args.seed,
                             samples_per_side=args.samples, alpha=args.alpha)
    if args.output:
        result.to_csv(args.output)
    else:
        sys.stdout.write("n,mse_mean,mse_std,bound_c0_rate\n")
        for n, m, s, b in zip(result.sizes, result.mse, result.mse_std, result.bound):
            sys.stdout.write(f"{n},{m:.9g},{s:.9g},{b:.9g}\n")
    print(f"fitted_slope={result.fitted_slope:.4f} theory_slope={result.theory_slope:.4f}",
          file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    overrides = {("h_g" if k == "hg" else k): getattr(args, k)
                 for k in _FILTER_KEYS if getattr(args, k) is not None}
    cfg = recommended_config(args.phantom).with_overrides(**overrides)
    clean = phantom(args.phantom, args.side)
    counts = sample_poisson(clean, args.seed)
    times = []
    for _ in range(args.repeats):
        t0 = time.perf_counter()
        denoise(counts, cfg, n_jobs=args.threads)
        times.append(time.perf_counter() - t0)
    px = args.side * args.side
    best, mean = min(times), sum(times) / len(times)
    print(f"phantom={args.phantom} pixels={px} search={cfg.search} patch={cfg.patch} "
          f"d={cfg.d} kernel={cfg.kernel} variant={cfg.variant}")
    print(f"runs={args.repeats} best_ms={1000 * best:.1f} mean_ms={1000 * mean:.1f} "
          f"us_per_pixel={1e6 * best / px:.2f}")
    return 0
