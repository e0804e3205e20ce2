"""Shared fixtures for the pspline-psd test suite."""

from __future__ import annotations

import numpy as np
import pytest

from pspline_psd.config import ChainConfig, RunConfig
from pspline_psd.series import Periodogram, TimeSeries, periodogram
from pspline_psd.simulate import ARModel, simulate_ar
from pspline_psd.splines import equidistant_knots


SHORT_CHAIN = dict(
    pilot_iterations=100, pilot_burnin=50, pilot_thin=1,
    iterations=300, burnin=100, thin=2,
)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def short_chain() -> ChainConfig:
    """Smallest chain that still keeps the 100 draws a uniform band needs."""
    return ChainConfig(**SHORT_CHAIN, seed=11)


@pytest.fixture
def short_settings(short_chain: ChainConfig) -> RunConfig:
    return RunConfig(knot_scheme="equidistant", seed=11, chain=short_chain)


@pytest.fixture
def white_noise(rng: np.random.Generator) -> TimeSeries:
    return TimeSeries(rng.normal(0.0, 3.0, size=128))


@pytest.fixture
def ar1_series() -> TimeSeries:
    return simulate_ar(ARModel.named("ar1"), 128, seed=5)


@pytest.fixture
def exp_pgram(rng: np.random.Generator) -> Periodogram:
    """White-noise-like periodogram: i.i.d. exponential ordinates on a length-201 grid."""
    base = periodogram(rng.normal(size=201))
    return Periodogram(rng.exponential(size=base.nu), base.frequencies, base.n)


@pytest.fixture
def cubic_knots():
    return equidistant_knots(10, 3)
