"""Tests for the command-line interface."""

from __future__ import annotations

import json

import numpy as np
import pandas as pd
import pytest

from pspline_psd.cli import build_parser, run
from pspline_psd.io import read_series_csv

SHORT_FLAGS = [
    "--iterations", "300", "--burnin", "100", "--thin", "2",
    "--pilot-iterations", "100", "--pilot-burnin", "50", "--pilot-thin", "1",
]


@pytest.fixture
def series_csv(tmp_path):
    path = tmp_path / "series.csv"
    assert run(["simulate", "--model", "ar", "--rho", "0.9", "--n", "128", "--seed", "4", "--out", str(path)]) == 0
    return path


def estimate_argv(series_csv, out, *extra):
    return [
        "estimate", "--input", str(series_csv), "--scheme", "equidistant", "--d", "1",
        "--seed", "8", "--out", str(out), *SHORT_FLAGS, *extra,
    ]


def test_simulate_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (first, second):
        assert run(["simulate", "--model", "ar1", "--n", "256", "--seed", "1", "--out", str(path)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert len(first.read_text(encoding="utf-8").splitlines()) == 256


def test_simulate_white_noise(tmp_path):
    path = tmp_path / "noise.csv"
    assert run(["simulate", "--n", "50", "--seed", "2", "--out", str(path)]) == 0
    series = read_series_csv(path)
    assert series.n == 50 and series.n_missing == 0


def test_simulate_rejects_nonstationary(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    assert run(["simulate", "--rho", "1.1", "--n", "50", "--out", str(path)]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("pspline-psd: error:")
    assert not path.exists()


def test_estimate_writes_artifacts(tmp_path, series_csv):
    out = tmp_path / "fit"
    assert run(estimate_argv(series_csv, out, "--trace", "--log-scale")) == 0

    frame = pd.read_csv(out / "estimate.csv")
    assert list(frame.columns) == [
        "frequency", "median", "lower", "upper", "periodogram", "log_median", "log_lower", "log_upper",
    ]
    assert len(frame) == 63
    assert (frame["lower"] <= frame["upper"]).all()

    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["K"] == 32
    assert summary["seed"] == 8
    assert summary["draws"] == 100
    assert len(summary["knots"]["internal"]) == 30
    assert summary["config"]["knot_scheme"] == "equidistant"
    assert summary["config"]["chain"]["iterations"] == 300

    trace = pd.read_csv(out / "trace.csv")
    assert list(trace.columns) == ["phi", "delta", "tau", "log_posterior"]
    assert len(trace) == 100


def test_estimate_is_reproducible(tmp_path, series_csv):
    outs = [tmp_path / "one", tmp_path / "two"]
    for out in outs:
        assert run(estimate_argv(series_csv, out)) == 0
    assert (outs[0] / "estimate.csv").read_bytes() == (outs[1] / "estimate.csv").read_bytes()
    summaries = [json.loads((out / "summary.json").read_text(encoding="utf-8")) for out in outs]
    for summary in summaries:
        summary.pop("runtime_seconds")
        summary["config"].pop("output")
    assert summaries[0] == summaries[1]


def test_missing_input_leaves_no_outputs(tmp_path, capsys):
    out = tmp_path / "fit"
    assert run(estimate_argv(tmp_path / "absent.csv", out)) == 1
    assert "absent.csv" in capsys.readouterr().err
    assert not out.exists()


def test_config_file_then_flags(tmp_path, series_csv):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"input = {series_csv}\nknot_scheme = equidistant\nK = 8\nseed = 8\n"
        "iterations = 300\nburnin = 100\nthin = 2\n"
        "pilot_iterations = 100\npilot_burnin = 50\npilot_thin = 1\n",
        encoding="utf-8",
    )
    out = tmp_path / "fit"
    penalty = tmp_path / "penalty.csv"
    assert run(["estimate", "--config", str(cfg), "--K", "6", "--out", str(out), "--penalty-csv", str(penalty)]) == 0
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["K"] == 6
    assert pd.read_csv(penalty, header=None).shape == (5, 5)


def test_knots_can_be_reused(tmp_path, series_csv):
    first = tmp_path / "first"
    assert run(estimate_argv(series_csv, first, "--K", "7")) == 0
    second = tmp_path / "second"
    assert run(estimate_argv(series_csv, second, "--knots", str(first / "summary.json"))) == 0
    knots = [json.loads((out / "summary.json").read_text(encoding="utf-8"))["knots"] for out in (first, second)]
    assert knots[0] == knots[1]


def test_invalid_configuration_exits_one(tmp_path, series_csv, capsys):
    assert run(estimate_argv(series_csv, tmp_path / "fit", "--K", "2")) == 1
    assert "K=2" in capsys.readouterr().err


def test_usage_errors_keep_argparse_status():
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["estimate", "--d", "3"])
    assert excinfo.value.code == 2


def test_bench_one_cell(tmp_path):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(
        "models = ar1\nlengths = 64\nreplications = 1\nschemes = equidistant\norders = 1\n",
        encoding="utf-8",
    )
    out = tmp_path / "bench.csv"
    assert run(["bench", "--config", str(cfg), "--out", str(out), "--jobs", "1", *SHORT_FLAGS]) == 0
    table = pd.read_csv(out)
    assert len(table) == 1
    assert np.isfinite(table.loc[0, "median_iae"])


def test_failed_write_leaves_no_partial_artifacts(tmp_path, series_csv, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    out = tmp_path / "fit"
    argv = estimate_argv(series_csv, out, "--trace", "--penalty-csv", str(blocker / "penalty.csv"))
    assert run(argv) == 1
    assert capsys.readouterr().err.startswith("pspline-psd: error:")
    assert not out.exists() or list(out.iterdir()) == []


def test_summary_reports_effective_sample_sizes(tmp_path, series_csv):
    out = tmp_path / "fit"
    assert run(estimate_argv(series_csv, out)) == 0
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert set(summary["ess"]) == {"phi", "delta", "tau", "log_posterior"}
    for value in summary["ess"].values():
        assert 0 < value <= 2 * summary["draws"]


def test_bench_output_and_jobs_from_config(tmp_path):
    out = tmp_path / "bench.csv"
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(
        "models = ar1\nlengths = 64\nreplications = 1\nschemes = equidistant\norders = 1\n"
        f"output = {out}\njobs = 1\nseed = 5\n",
        encoding="utf-8",
    )
    assert run(["bench", "--config", str(cfg), *SHORT_FLAGS]) == 0
    assert len(pd.read_csv(out)) == 1


def test_bench_requires_output(tmp_path, capsys):
    assert run(["bench", "--replications", "1"]) == 1
    assert "--out" in capsys.readouterr().err
