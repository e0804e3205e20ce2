"""
Posterior summaries: pointwise median, uniform credible bands, rescaling and error metrics.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import arviz as az
import numpy as np
from scipy.integrate import trapezoid

from pspline_psd.const import DEFAULT_BAND_ALPHA, IAE_GRID_SIZE, MIN_BAND_DRAWS, MIN_GEWEKE_SEGMENT
from pspline_psd.errors import DegenerateInputError, InputDomainError

if TYPE_CHECKING:
    import xarray as xr

_LOG = logging.getLogger(__name__)

TRACE_COLUMNS = ("phi", "delta", "tau")


@dataclass(frozen=True)
class PosteriorSamples:
    """Thinned post-burn-in draws of the psd at the Fourier frequencies."""

    psd_samples: np.ndarray
    param_trace: np.ndarray
    frequencies: np.ndarray
    scale_factor: float = 1.0
    log_posterior: np.ndarray | None = None
    acceptance_rate: float = float("nan")
    pilot_acceptance_rate: float = float("nan")
    sigma: float = float("nan")

    @property
    def n_draws(self) -> int:
        return int(self.psd_samples.shape[0])

    def trace_table(self) -> dict[str, np.ndarray]:
        table = {name: self.param_trace[:, i] for i, name in enumerate(TRACE_COLUMNS)}
        if self.log_posterior is not None:
            table["log_posterior"] = self.log_posterior
        return table


@dataclass(frozen=True)
class PsdEstimate:
    frequencies: np.ndarray
    median: np.ndarray
    mad: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    zeta: float
    alpha: float = DEFAULT_BAND_ALPHA


def _as_matrix(samples: PosteriorSamples | np.ndarray) -> np.ndarray:
    matrix = samples.psd_samples if isinstance(samples, PosteriorSamples) else np.asarray(samples, float)
    if matrix.ndim == 1:
        matrix = matrix[None, :]
    if matrix.shape[0] < 1:
        raise DegenerateInputError("No posterior draws to summarize")
    return matrix


def pointwise_median(samples: PosteriorSamples | np.ndarray) -> np.ndarray:
    return np.median(_as_matrix(samples), axis=0)


def uniform_band(
    samples: PosteriorSamples | np.ndarray,
    alpha: float = DEFAULT_BAND_ALPHA,
    frequencies: np.ndarray | None = None,
    min_draws: int = MIN_BAND_DRAWS,
) -> PsdEstimate:
    """
    Uniform credible band median +/- zeta * mad.

    mad is the raw median absolute deviation about the pointwise median and zeta is
    the inverse-ECDF (1 - alpha) quantile of the per-draw maxima of
    |draw - median| / mad over the frequencies.
    """
    matrix = _as_matrix(samples)
    if matrix.shape[0] < min_draws:
        raise DegenerateInputError(f"Uniform band needs at least {min_draws} draws, got {matrix.shape[0]}")
    if not 0 <= alpha < 1:
        raise InputDomainError(f"Band level alpha must lie in [0, 1), got {alpha}")
    if frequencies is None:
        if isinstance(samples, PosteriorSamples):
            frequencies = samples.frequencies
        else:
            frequencies = np.arange(1, matrix.shape[1] + 1, dtype=float)

    median = np.median(matrix, axis=0)
    deviation = np.abs(matrix - median)
    mad = np.median(deviation, axis=0)
    if np.any(mad <= 0):
        positive = mad[mad > 0]
        if positive.size:
            _LOG.warning("Zero mad at %d frequencies, using the smallest positive mad", int((mad <= 0).sum()))
            mad = np.where(mad > 0, mad, positive.min())
        else:
            _LOG.warning("All posterior draws coincide, band collapses to the median")
            mad = np.ones_like(mad)
            deviation = np.zeros_like(deviation)

    max_stat = (deviation / mad).max(axis=1)
    zeta = float(np.quantile(max_stat, 1.0 - alpha, method="inverted_cdf"))
    return PsdEstimate(
        frequencies=np.asarray(frequencies, dtype=float),
        median=median,
        mad=mad,
        lower=median - zeta * mad,
        upper=median + zeta * mad,
        zeta=zeta,
        alpha=alpha,
    )


def rescale_to_original(estimate: PsdEstimate, scale_factor: float) -> PsdEstimate:
    """Multiply the curves by the variance of the original series."""
    if not scale_factor > 0:
        raise InputDomainError(f"Scale factor must be positive, got {scale_factor}")
    return dataclasses.replace(
        estimate,
        median=estimate.median * scale_factor,
        mad=estimate.mad * scale_factor,
        lower=estimate.lower * scale_factor,
        upper=estimate.upper * scale_factor,
    )


def _evaluate(true_psd: Callable[[np.ndarray], np.ndarray], grid: np.ndarray) -> np.ndarray:
    values = np.asarray(true_psd(grid), dtype=float)
    if values.shape != grid.shape:
        values = np.broadcast_to(values, grid.shape)
    return values


def iae(
    estimate: PsdEstimate,
    true_psd: Callable[[np.ndarray], np.ndarray],
    grid_size: int = IAE_GRID_SIZE,
) -> float:
    """Integrated absolute error over [0, pi], trapezoid rule on a uniform grid."""
    grid = np.linspace(0.0, np.pi, grid_size)
    fitted = np.interp(grid, estimate.frequencies, estimate.median)
    return float(trapezoid(np.abs(fitted - _evaluate(true_psd, grid)), grid))


def coverage_flags(
    estimate: PsdEstimate, true_psd: Callable[[np.ndarray], np.ndarray]
) -> tuple[bool, float]:
    truth = _evaluate(true_psd, estimate.frequencies)
    inside = (estimate.lower <= truth) & (truth <= estimate.upper)
    return bool(inside.all()), float(inside.mean())


def _as_dataset(trace: np.ndarray) -> xr.Dataset:
    """Single-chain dataset; a 2-D trace is read as (draw, coordinate)."""
    values = np.asarray(trace, dtype=float)
    return az.convert_to_dataset({"trace": values[np.newaxis, ...]})


def _trace_stat(result: xr.Dataset) -> float | np.ndarray:
    values = np.asarray(result["trace"].values, dtype=float)
    return float(values) if values.ndim == 0 else values


def effective_sample_size(trace: np.ndarray) -> float | np.ndarray:
    """Bulk effective sample size of a single chain."""
    return _trace_stat(az.ess(_as_dataset(trace)))


def mcse_mean(trace: np.ndarray) -> float | np.ndarray:
    """Monte Carlo standard error of the chain mean."""
    return _trace_stat(az.mcse(_as_dataset(trace), method="mean"))


def geweke_z(trace: np.ndarray, first: float = 0.1, last: float = 0.5) -> float:
    """
    Geweke-style drift statistic: difference of the means of the first and last
    segments of a trace over their Monte Carlo standard errors.
    """
    trace = np.asarray(trace, dtype=float)
    n = trace.size
    head = trace[: int(first * n)]
    tail = trace[n - int(last * n):]
    if head.size < MIN_GEWEKE_SEGMENT or tail.size < MIN_GEWEKE_SEGMENT:
        raise DegenerateInputError(f"Trace of length {n} is too short for a drift check")

    diff = head.mean() - tail.mean()
    if diff == 0:
        return 0.0
    se = float(np.hypot(mcse_mean(head), mcse_mean(tail)))
    # Constant segments have no Monte Carlo error; any gap between them is drift.
    if not np.isfinite(se) or se == 0:
        return float(np.copysign(np.inf, diff))
    return float(diff / se)
