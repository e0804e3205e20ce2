"""
Time series ingestion, preprocessing and periodogram.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from pspline_psd.const import MIN_SERIES_LENGTH
from pspline_psd.errors import DegenerateInputError, InputDomainError

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeSeries:
    """Raw observations; missing entries are NaN."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DegenerateInputError(f"Expected a univariate series, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.values).sum())


@dataclass(frozen=True)
class PreprocessedSeries:
    values: np.ndarray
    original_mean: float
    original_sd: float
    sqrt_transformed: bool = False

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def scale_factor(self) -> float:
        """Factor that maps a psd of the standardized series back to original units."""
        return self.original_sd ** 2

    def restore(self) -> np.ndarray:
        return self.original_sd * self.values + self.original_mean


@dataclass(frozen=True)
class Periodogram:
    ordinates: np.ndarray
    frequencies: np.ndarray
    n: int

    def __post_init__(self) -> None:
        if self.ordinates.shape != self.frequencies.shape:
            raise DegenerateInputError("Periodogram ordinates and frequencies differ in length")
        if np.any(self.ordinates < 0):
            raise InputDomainError("Periodogram ordinates must be non-negative")
        if np.any(np.diff(self.frequencies) <= 0):
            raise InputDomainError("Fourier frequencies must be strictly increasing")

    @property
    def nu(self) -> int:
        return int(self.ordinates.size)

    @property
    def omega(self) -> np.ndarray:
        """Frequencies rescaled to the unit interval."""
        return self.frequencies / np.pi

    def scaled(self, factor: float) -> Periodogram:
        return Periodogram(self.ordinates * factor, self.frequencies, self.n)


def fourier_frequencies(n: int) -> np.ndarray:
    nu = (n - 1) // 2
    return 2.0 * np.pi * np.arange(1, nu + 1) / n


def preprocess(
    raw: TimeSeries, apply_sqrt: bool = False, min_length: int = MIN_SERIES_LENGTH
) -> PreprocessedSeries:
    """
    Impute, center and standardize a raw series.

    Missing entries are replaced by the mean of the observed entries, computed after
    the optional square-root transform. The result has zero mean and unit sample
    standard deviation.
    """
    if raw.n < min_length:
        raise DegenerateInputError(f"Series has {raw.n} observations, need at least {min_length}")

    values = raw.values.copy()
    observed = ~np.isnan(values)
    n_observed = int(observed.sum())
    if n_observed == 0:
        raise DegenerateInputError("Series contains no observed values")
    if n_observed < 2:
        raise DegenerateInputError("Series needs at least 2 observed values")

    if apply_sqrt:
        if np.any(values[observed] < 0):
            raise InputDomainError("Square-root transform requires non-negative observations")
        values = np.sqrt(values)

    if n_observed < raw.n:
        fill = values[observed].mean()
        _LOG.info("Imputing %d missing value(s) with the mean %.6g", raw.n - n_observed, fill)
        values = np.where(observed, values, fill)

    mean = float(values.mean())
    centered = values - mean
    sd = float(centered.std(ddof=1))
    if not np.isfinite(sd) or sd <= 1e-12 * max(1.0, abs(mean)):
        raise DegenerateInputError("Series has zero variance after centering")

    return PreprocessedSeries(
        values=centered / sd,
        original_mean=mean,
        original_sd=sd,
        sqrt_transformed=apply_sqrt,
    )


def periodogram(series: PreprocessedSeries | np.ndarray) -> Periodogram:
    """
    Periodogram ordinates at the Fourier frequencies 2*pi*l/n, l = 1..(n-1)//2.

    The zero frequency and, for even n, the Nyquist frequency are excluded.
    """
    values = series.values if isinstance(series, PreprocessedSeries) else np.asarray(series, float)
    n = values.size
    nu = (n - 1) // 2
    if nu < 1:
        raise DegenerateInputError(f"Series of length {n} has no Fourier frequencies")

    dft = np.fft.fft(values)[1:nu + 1]
    ordinates = (dft.real ** 2 + dft.imag ** 2) / (2.0 * np.pi * n)
    return Periodogram(ordinates=ordinates, frequencies=fourier_frequencies(n), n=n)
