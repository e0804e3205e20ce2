"""
CSV and JSON input/output with atomic writes.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Mapping

import numpy as np
import pandas as pd

from pspline_psd.const import DEFAULT_DEGREE, MISSING_TOKENS
from pspline_psd.errors import DegenerateInputError, KnotError
from pspline_psd.penalty import PenaltyMatrix
from pspline_psd.posterior import PosteriorSamples, PsdEstimate
from pspline_psd.series import Periodogram, TimeSeries
from pspline_psd.splines import KnotVector

_LOG = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _temp_sibling(target: Path) -> Path:
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    os.close(fd)
    return Path(tmp_name)


@contextmanager
def atomic_path(path: str | Path) -> Iterator[Path]:
    """Yield a temporary sibling path that replaces `path` only if the block succeeds."""
    target = Path(path)
    tmp = _temp_sibling(target)
    try:
        yield tmp
        os.replace(tmp, target)
    finally:
        if tmp.exists():
            tmp.unlink()


class StagedOutputs:
    """Temporary siblings for a group of output files, published together by `commit`."""

    def __init__(self) -> None:
        self._staged: dict[Path, Path] = {}

    def path(self, target: str | Path) -> Path:
        target = Path(target)
        if target in self._staged:
            return self._staged[target]
        tmp = _temp_sibling(target)
        self._staged[target] = tmp
        return tmp

    def commit(self) -> None:
        for target, tmp in self._staged.items():
            os.replace(tmp, target)
        _LOG.debug("Published %d output file(s)", len(self._staged))
        self._staged.clear()

    def discard(self) -> None:
        for tmp in self._staged.values():
            tmp.unlink(missing_ok=True)
        self._staged.clear()


@contextmanager
def staged_outputs() -> Iterator[StagedOutputs]:
    """Nothing reaches its final path unless every write inside the block succeeds."""
    stage = StagedOutputs()
    try:
        yield stage
        stage.commit()
    finally:
        stage.discard()


def _looks_numeric(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return token.strip() in MISSING_TOKENS
    return True


def read_series_csv(path: str | Path, column: str | int | None = None) -> TimeSeries:
    """
    Read one series from a CSV file.

    A header row is detected when the first line is not numeric. Empty fields and
    `NA` mark missing observations.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Input file not found: {path}")
    with path.open("r", encoding="utf-8") as handle:
        first = handle.readline().strip()
    has_header = bool(first) and not all(_looks_numeric(tok) for tok in first.split(","))

    frame = pd.read_csv(
        path,
        header=0 if has_header else None,
        na_values=list(MISSING_TOKENS),
        keep_default_na=True,
        skip_blank_lines=False,
        float_precision="round_trip",
    )
    if frame.shape[1] == 0:
        raise DegenerateInputError(f"No columns in {path}")

    if column is None:
        selected = frame.iloc[:, 0]
    elif isinstance(column, int) or (isinstance(column, str) and column.isdigit()):
        selected = frame.iloc[:, int(column)]
    elif column in frame.columns:
        selected = frame[column]
    else:
        raise DegenerateInputError(f"Column '{column}' not found in {path}")

    try:
        values = pd.to_numeric(selected, errors="raise").to_numpy(dtype=float)
    except (ValueError, TypeError) as err:
        raise DegenerateInputError(f"Non-numeric value in {path}: {err}") from err
    _LOG.debug("Read %d observations from %s", values.size, path)
    return TimeSeries(values)


def write_series_csv(series: TimeSeries, path: str | Path) -> None:
    with atomic_path(path) as tmp:
        pd.Series(series.values).to_csv(tmp, index=False, header=False, float_format=FLOAT_FORMAT)


def write_table_csv(columns: Mapping[str, Any], path: str | Path) -> None:
    with atomic_path(path) as tmp:
        pd.DataFrame(dict(columns)).to_csv(tmp, index=False, float_format=FLOAT_FORMAT)


def estimate_columns(estimate: PsdEstimate, pgram: Periodogram | None = None) -> dict[str, np.ndarray]:
    columns = {
        "frequency": estimate.frequencies,
        "median": estimate.median,
        "lower": estimate.lower,
        "upper": estimate.upper,
    }
    if pgram is not None:
        columns["periodogram"] = pgram.ordinates
    return columns


def write_estimate_csv(
    estimate: PsdEstimate,
    path: str | Path,
    pgram: Periodogram | None = None,
    extra: Mapping[str, np.ndarray] | None = None,
) -> None:
    columns = estimate_columns(estimate, pgram)
    columns.update(extra or {})
    write_table_csv(columns, path)


def write_periodogram_csv(pgram: Periodogram, path: str | Path) -> None:
    write_table_csv({"frequency": pgram.frequencies, "ordinate": pgram.ordinates}, path)


def write_trace_csv(samples: PosteriorSamples, path: str | Path) -> None:
    write_table_csv(samples.trace_table(), path)


def write_penalty_csv(penalty: PenaltyMatrix, path: str | Path) -> None:
    with atomic_path(path) as tmp:
        pd.DataFrame(penalty.entries).to_csv(tmp, index=False, header=False, float_format=FLOAT_FORMAT)


def write_json(payload: Mapping[str, Any], path: str | Path) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default), encoding="utf-8")


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def knots_to_json(kv: KnotVector) -> dict[str, Any]:
    return {"degree": kv.degree, "internal": kv.to_list()}


def read_knots_json(path: str | Path) -> KnotVector:
    """Accepts either {"degree": r, "internal": [...]} or a bare array of internal knots (default degree)."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise KnotError(f"Cannot read knot vector from {path}: {err}") from err
    if isinstance(payload, dict) and "knots" in payload:
        payload = payload["knots"]
    if isinstance(payload, list):
        return KnotVector.from_internal(np.asarray(payload, dtype=float))
    if isinstance(payload, dict) and "internal" in payload:
        degree = int(payload.get("degree", DEFAULT_DEGREE))
        return KnotVector.from_internal(np.asarray(payload["internal"], dtype=float), degree)
    raise KnotError(f"Unrecognized knot vector format in {path}")
