"""
Command-line interface: estimate, simulate and bench subcommands.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import logging
import math
import sys
from pathlib import Path
from typing import Any, Sequence

from pspline_psd.bench import run_benchmark_async
from pspline_psd.config import (
    BenchmarkConfig,
    ChainConfig,
    RunConfig,
    apply_entries,
    read_config_file,
)
from pspline_psd.const import AR_MODELS, CHAIN_PRESETS, KNOT_SCHEMES, PENALTY_KINDS
from pspline_psd.errors import InputDomainError, PsdError
from pspline_psd.io import (
    knots_to_json,
    read_knots_json,
    read_series_csv,
    staged_outputs,
    write_estimate_csv,
    write_json,
    write_penalty_csv,
    write_series_csv,
    write_table_csv,
    write_trace_csv,
)
from pspline_psd.pipeline import EstimationResult, estimate_psd, log_curves
from pspline_psd.posterior import effective_sample_size
from pspline_psd.simulate import ARModel, simulate_ar

_LOG = logging.getLogger(__name__)

PROG = "pspline-psd"
ESTIMATE_FILE = "estimate.csv"
SUMMARY_FILE = "summary.json"
TRACE_FILE = "trace.csv"

_CHAIN_FLAGS = ("iterations", "burnin", "thin", "pilot_iterations", "pilot_burnin", "pilot_thin")
_PRIOR_FLAGS = ("alpha_phi", "beta_phi", "alpha_delta", "beta_delta", "alpha_tau", "beta_tau", "epsilon")


def _add_chain_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("chain")
    group.add_argument("--preset", choices=sorted(CHAIN_PRESETS), help="Named chain length preset")
    for name in _CHAIN_FLAGS:
        group.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int, default=None)
    prior = parser.add_argument_group("prior")
    for name in _PRIOR_FLAGS:
        prior.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Bayesian P-spline spectral density estimation")
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    est = sub.add_parser("estimate", help="Estimate the psd of a series stored in a CSV file")
    est.add_argument("--config", default=None, help="key = value configuration file")
    est.add_argument("--input", default=None, help="CSV file holding the series")
    est.add_argument("--out", dest="output", default=None, help="Output directory")
    est.add_argument("--column", default=None, help="Column name or index (default: first column)")
    est.add_argument("--scheme", dest="knot_scheme", choices=KNOT_SCHEMES, default=None)
    est.add_argument("--penalty", choices=PENALTY_KINDS, default=None)
    est.add_argument("--K", dest="K", type=int, default=None, help="Number of B-spline densities")
    est.add_argument("--d", dest="d", type=int, choices=(1, 2), default=None, help="Penalty order")
    est.add_argument("--r", dest="r", type=int, default=None, help="B-spline degree")
    est.add_argument("--sqrt", dest="apply_sqrt", action="store_const", const=True, default=None)
    est.add_argument("--alpha", type=float, default=None, help="Uniform band level (default 0.1)")
    est.add_argument("--seed", type=int, default=None)
    est.add_argument("--knots", default=None, help="JSON knot vector to reuse instead of placing knots")
    est.add_argument("--trace", action="store_const", const=True, default=None, help="Also write trace.csv")
    est.add_argument("--log-scale", dest="log_scale", action="store_const", const=True, default=None)
    est.add_argument("--penalty-csv", dest="penalty_csv", default=None, help="Export the penalty matrix")
    _add_chain_flags(est)

    sim = sub.add_parser("simulate", help="Simulate an autoregressive series")
    sim.add_argument("--model", default="ar", choices=["ar", *sorted(AR_MODELS)])
    sim.add_argument("--rho", default="", help="Comma-separated AR coefficients (model 'ar')")
    sim.add_argument("--sigma2", type=float, default=1.0, help="Innovation variance")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", required=True, help="Output CSV file")

    bench = sub.add_parser("bench", help="Run the AR simulation benchmark")
    bench.add_argument("--config", default=None, help="key = value configuration file")
    bench.add_argument("--out", dest="output", default=None, help="Output CSV file")
    bench.add_argument("--jobs", type=int, default=None, help="Worker processes (default 1)")
    bench.add_argument("--replications", type=int, default=None)
    bench.add_argument("--seed", dest="base_seed", type=int, default=None)
    _add_chain_flags(bench)
    return parser


def _apply_flags(target: RunConfig | BenchmarkConfig, args: argparse.Namespace) -> None:
    """Command-line values win over file values; unset flags leave the record untouched."""
    if getattr(args, "preset", None):
        target.chain = ChainConfig.preset(args.preset, seed=target.chain.seed)
    top = {f.name for f in dataclasses.fields(target)} - {"chain", "prior"}
    for name, value in vars(args).items():
        if value is None or name in ("subcommand", "config", "debug", "preset"):
            continue
        if name in top:
            setattr(target, name, value)
        elif name in _CHAIN_FLAGS:
            setattr(target.chain, name, value)
        elif name in _PRIOR_FLAGS:
            setattr(target.prior, name, value)


def settings_from_args(args: argparse.Namespace) -> RunConfig:
    settings = RunConfig(subcommand="estimate")
    if args.config:
        apply_entries(settings, read_config_file(args.config))
    _apply_flags(settings, args)
    if settings.input is None:
        raise InputDomainError("No input file given (--input or 'input' in the config file)")
    if settings.output is None:
        raise InputDomainError("No output directory given (--out or 'output' in the config file)")
    settings.validate()
    return settings


def bench_config_from_args(args: argparse.Namespace) -> BenchmarkConfig:
    cfg = BenchmarkConfig()
    if args.config:
        apply_entries(cfg, read_config_file(args.config))
    _apply_flags(cfg, args)
    if cfg.output is None:
        raise InputDomainError("No output file given (--out or 'output' in the config file)")
    cfg.validate()
    return cfg


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def run_summary(result: EstimationResult, settings: RunConfig, n: int, n_missing: int) -> dict[str, Any]:
    from pspline_psd import __version__

    trace = result.samples.trace_table()
    return {
        "version": __version__,
        "n": n,
        "n_missing": n_missing,
        "K": result.n_densities,
        "knots": knots_to_json(result.knots),
        "penalty": result.penalty.kind,
        "zeta": result.estimate.zeta,
        "alpha": result.estimate.alpha,
        "acceptance_rate": result.samples.acceptance_rate,
        "pilot_acceptance_rate": result.samples.pilot_acceptance_rate,
        "proposal_sigma": result.samples.sigma,
        "draws": result.samples.n_draws,
        "ess": {name: _finite_or_none(effective_sample_size(column)) for name, column in trace.items()},
        "runtime_seconds": result.runtime_seconds,
        "seed": result.seed,
        "config": dataclasses.asdict(settings),
    }


def cmd_estimate(settings: RunConfig) -> int:
    series = read_series_csv(settings.input, settings.column)
    knots = read_knots_json(settings.knots) if settings.knots else None
    result = estimate_psd(series, settings, knots=knots, label=Path(settings.input).stem)

    out = Path(settings.output)
    extra = log_curves(result.estimate) if settings.log_scale else None
    with staged_outputs() as stage:
        write_estimate_csv(result.estimate, stage.path(out / ESTIMATE_FILE), pgram=result.periodogram, extra=extra)
        if settings.trace:
            write_trace_csv(result.samples, stage.path(out / TRACE_FILE))
        if settings.penalty_csv:
            write_penalty_csv(result.penalty, stage.path(settings.penalty_csv))
        write_json(run_summary(result, settings, series.n, series.n_missing), stage.path(out / SUMMARY_FILE))
    _LOG.info("Wrote estimate for %d frequencies to %s", result.estimate.frequencies.size, out)
    return 0


def _parse_rho(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError as err:
        raise InputDomainError(f"Invalid AR coefficients '{raw}'") from err


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.model == "ar":
        model = ARModel(rho=_parse_rho(args.rho), sigma2=args.sigma2)
    else:
        model = ARModel.named(args.model, sigma2=args.sigma2)
    series = simulate_ar(model, args.n, seed=args.seed)
    write_series_csv(series, args.out)
    _LOG.info("Simulated AR(%d) series of length %d to %s", model.order, args.n, args.out)
    return 0


async def cmd_bench(cfg: BenchmarkConfig) -> int:
    last_step = -1

    def progress(done: int, total: int) -> None:
        nonlocal last_step
        percent = 100 * done // total
        if percent // 5 != last_step or done == total:
            last_step = percent // 5
            _LOG.info("Benchmark progress: %d/%d (%d%%)", done, total, percent)

    table = await run_benchmark_async(cfg, jobs=cfg.jobs, progress=progress)
    write_table_csv(table.to_dict("list"), cfg.output)
    _LOG.info("Wrote %d benchmark rows to %s", len(table), cfg.output)
    return 0


async def dispatch(args: argparse.Namespace) -> int:
    """
    Run one parsed command; library errors become a one-line diagnostic and status 1.

    Only bench awaits (its worker pool); estimate and simulate run inline on the loop thread.
    """
    try:
        if args.subcommand == "estimate":
            return cmd_estimate(settings_from_args(args))
        if args.subcommand == "simulate":
            return cmd_simulate(args)
        return await cmd_bench(bench_config_from_args(args))
    except (PsdError, OSError) as err:
        print(f"{PROG}: error: {err}", file=sys.stderr)
        return 1


def run(argv: Sequence[str] | None = None) -> int:
    from pspline_psd import main

    status = asyncio.run(main(argv))
    if argv is None:
        sys.exit(status)
    return status
