"""
Desk-scale simulation benchmark over AR models, lengths, knot schemes and penalty orders.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import asyncio
import dataclasses
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pandas as pd

from pspline_psd.config import BenchmarkConfig, RunConfig
from pspline_psd.const import AR_MODELS, BENCH_COLUMNS
from pspline_psd.errors import PsdError
from pspline_psd.pipeline import estimate_psd
from pspline_psd.posterior import coverage_flags, iae
from pspline_psd.simulate import ARModel, ar_psd, simulate_ar

_LOG = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], None]

# Entropy key per knot scheme for chain seeds.
KNOT_KEY = {"equidistant": 1, "qspaced": 2}


@dataclass(frozen=True)
class ReplicationTask:
    model: str
    n: int
    scheme: str
    d: int
    replication: int
    data_seed: int
    chain_seed: int
    settings: RunConfig


@dataclass(frozen=True)
class ReplicationResult:
    model: str
    n: int
    scheme: str
    d: int
    replication: int
    iae: float = float("nan")
    uniform_covered: bool = False
    pointwise_fraction: float = float("nan")
    runtime_seconds: float = float("nan")
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def _seed(*entropy: int) -> int:
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


def build_tasks(cfg: BenchmarkConfig) -> list[ReplicationTask]:
    """
    One task per (model, n, scheme, d, replication).

    The simulated series depends only on (model, n, replication), so every knot scheme
    and penalty order is fitted to the same data.
    """
    model_index = {name: i for i, name in enumerate(AR_MODELS)}
    tasks = []
    for model in cfg.models:
        for n in cfg.lengths:
            for scheme in cfg.schemes:
                for d in cfg.orders:
                    for rep in range(cfg.replications):
                        data_seed = _seed(cfg.base_seed, model_index[model], n, rep)
                        chain_seed = _seed(cfg.base_seed, model_index[model], n, rep, KNOT_KEY[scheme], d)
                        settings = RunConfig(
                            subcommand="bench",
                            knot_scheme=scheme,
                            d=d,
                            alpha=cfg.alpha,
                            seed=chain_seed,
                            chain=dataclasses.replace(cfg.chain, seed=chain_seed),
                            prior=dataclasses.replace(cfg.prior, d=d),
                        )
                        tasks.append(ReplicationTask(model, n, scheme, d, rep, data_seed, chain_seed, settings))
    return tasks


def run_replication(task: ReplicationTask) -> ReplicationResult:
    label = f"{task.model}-n{task.n}-{task.scheme}-d{task.d}-r{task.replication}"
    model = ARModel.named(task.model)
    started = time.perf_counter()
    try:
        series = simulate_ar(model, task.n, seed=task.data_seed)
        result = estimate_psd(series, task.settings, label=label)
        covered, fraction = coverage_flags(result.estimate, lambda lam: ar_psd(model, lam))
        return ReplicationResult(
            model=task.model,
            n=task.n,
            scheme=task.scheme,
            d=task.d,
            replication=task.replication,
            iae=iae(result.estimate, lambda lam: ar_psd(model, lam)),
            uniform_covered=covered,
            pointwise_fraction=fraction,
            runtime_seconds=time.perf_counter() - started,
        )
    except (PsdError, np.linalg.LinAlgError) as err:
        return ReplicationResult(
            model=task.model, n=task.n, scheme=task.scheme, d=task.d,
            replication=task.replication, error=f"{type(err).__name__}: {err}",
        )


def summarize(results: list[ReplicationResult]) -> pd.DataFrame:
    """Median IAE, uniform coverage proportion and median pointwise coverage per cell."""
    failed = [r for r in results if r.failed]
    for r in failed:
        _LOG.warning(
            "Replication %s/n=%d/%s/d=%d/#%d failed: %s", r.model, r.n, r.scheme, r.d, r.replication, r.error
        )

    frame = pd.DataFrame([dataclasses.asdict(r) for r in results if not r.failed])
    if frame.empty:
        return pd.DataFrame(columns=BENCH_COLUMNS)
    keys = ["model", "n", "scheme", "d"]
    grouped = frame.groupby(keys, sort=False)
    table = pd.DataFrame({
        "median_iae": grouped["iae"].median(),
        "uniform_coverage": grouped["uniform_covered"].mean(),
        "median_pointwise_coverage": grouped["pointwise_fraction"].median(),
        "median_runtime_seconds": grouped["runtime_seconds"].median(),
        "replications": grouped["replication"].count(),
    }).reset_index()
    return table[BENCH_COLUMNS]


async def run_benchmark_async(
    cfg: BenchmarkConfig, jobs: int = 1, progress: ProgressCallback | None = None
) -> pd.DataFrame:
    cfg.validate()
    tasks = build_tasks(cfg)
    total = len(tasks)
    _LOG.info("Benchmark: %d replications on %d worker(s)", total, jobs)

    if jobs <= 1:
        results = []
        for i, task in enumerate(tasks, start=1):
            results.append(run_replication(task))
            if progress:
                progress(i, total)
    else:
        loop = asyncio.get_running_loop()
        done = 0

        def _tick(_future: asyncio.Future) -> None:
            nonlocal done
            done += 1
            if progress:
                progress(done, total)

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [loop.run_in_executor(pool, run_replication, task) for task in tasks]
            for future in futures:
                future.add_done_callback(_tick)
            results = await asyncio.gather(*futures)

    # Deterministic merge: configuration key, then replication index.
    order = {(t.model, t.n, t.scheme, t.d): i for i, t in enumerate(tasks)}
    results = sorted(results, key=lambda r: (order[(r.model, r.n, r.scheme, r.d)], r.replication))
    return summarize(results)


def run_benchmark(cfg: BenchmarkConfig, jobs: int = 1, progress: ProgressCallback | None = None) -> pd.DataFrame:
    return asyncio.run(run_benchmark_async(cfg, jobs, progress))
