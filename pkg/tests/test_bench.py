"""Tests for the simulation benchmark."""

from __future__ import annotations

import logging

import numpy as np
import pandas as pd
import pytest

from pspline_psd import bench
from pspline_psd.bench import build_tasks, run_benchmark
from pspline_psd.config import BenchmarkConfig, ChainConfig
from pspline_psd.const import BENCH_COLUMNS
from pspline_psd.errors import NonStationaryError

from tests.conftest import SHORT_CHAIN


def tiny_config(**overrides) -> BenchmarkConfig:
    fields = dict(
        models=["ar1"], lengths=[64], replications=1, schemes=["equidistant"], orders=[1],
        chain=ChainConfig(**SHORT_CHAIN),
    )
    fields.update(overrides)
    return BenchmarkConfig(**fields)


def test_tasks_share_data_across_schemes_and_orders():
    cfg = tiny_config(schemes=["equidistant", "qspaced"], orders=[1, 2], replications=2)
    tasks = build_tasks(cfg)
    assert len(tasks) == 8
    by_rep = {}
    for task in tasks:
        by_rep.setdefault(task.replication, set()).add(task.data_seed)
    assert all(len(seeds) == 1 for seeds in by_rep.values())
    assert by_rep[0] != by_rep[1]
    assert len({task.chain_seed for task in tasks}) == 8
    assert all(task.settings.prior.d == task.d for task in tasks)


def test_one_cell_table():
    table = run_benchmark(tiny_config())
    assert list(table.columns) == BENCH_COLUMNS
    assert len(table) == 1
    row = table.iloc[0]
    assert row["model"] == "ar1" and row["n"] == 64 and row["scheme"] == "equidistant" and row["d"] == 1
    assert row["replications"] == 1
    assert np.isfinite(row["median_iae"]) and row["median_iae"] > 0
    assert 0.0 <= row["median_pointwise_coverage"] <= 1.0


def test_benchmark_is_reproducible():
    cfg = tiny_config(replications=2, schemes=["equidistant", "qspaced"])
    first = run_benchmark(cfg).drop(columns="median_runtime_seconds")
    second = run_benchmark(tiny_config(replications=2, schemes=["equidistant", "qspaced"]))
    pd.testing.assert_frame_equal(first, second.drop(columns="median_runtime_seconds"))
    assert list(first["scheme"]) == ["equidistant", "qspaced"]


def test_progress_reports_every_replication():
    seen = []
    run_benchmark(tiny_config(replications=2), progress=lambda done, total: seen.append((done, total)))
    assert seen == [(1, 2), (2, 2)]


def test_failed_replications_are_excluded(monkeypatch, caplog):
    def broken(*args, **kwargs):
        raise NonStationaryError("boom")

    monkeypatch.setattr(bench, "estimate_psd", broken)
    with caplog.at_level(logging.WARNING):
        table = run_benchmark(tiny_config())
    assert table.empty
    assert list(table.columns) == BENCH_COLUMNS
    assert "boom" in caplog.text


def desk_table(models, lengths, schemes, jobs=4) -> pd.DataFrame:
    cfg = BenchmarkConfig(models=models, lengths=lengths, schemes=schemes, orders=[1])
    return run_benchmark(cfg, jobs=jobs).set_index(["model", "n", "scheme", "d"])


@pytest.mark.slow
def test_ar1_median_iae():
    table = desk_table(["ar1"], [256], ["equidistant"])
    assert 0.50 <= table.loc[("ar1", 256, "equidistant", 1), "median_iae"] <= 0.85


@pytest.mark.slow
def test_ar4_quantile_knots_beat_equidistant():
    table = desk_table(["ar4"], [256, 512], ["equidistant", "qspaced"])
    for n in (256, 512):
        assert table.loc[("ar4", n, "qspaced", 1), "median_iae"] < table.loc[("ar4", n, "equidistant", 1), "median_iae"]
    assert table.loc[("ar4", 256, "qspaced", 1), "median_pointwise_coverage"] >= 0.97


@pytest.mark.slow
def test_ar1_uniform_coverage():
    table = desk_table(["ar1"], [128, 256], ["equidistant"])
    assert (table["uniform_coverage"] >= 0.90).all()
