"""Tests for AR simulation, theoretical spectra and the K rule of thumb."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate

from pspline_psd.errors import InputDomainError, NonStationaryError
from pspline_psd.simulate import ARModel, ar_psd, choose_K, simulate_ar


@pytest.mark.parametrize("rho", [(1.0,), (1.2,), (0.5, 0.6)])
def test_nonstationary_models_rejected(rho):
    with pytest.raises(NonStationaryError):
        ARModel(rho=rho)


def test_named_models():
    assert ARModel.named("ar1").rho == (0.9,)
    ar4 = ARModel.named("ar4")
    assert ar4.order == 4
    with pytest.raises(InputDomainError):
        ARModel.named("arma")


def test_white_noise_variance():
    series = simulate_ar(ARModel(), 10_000, seed=1)
    assert series.n == 10_000
    se = np.sqrt(2.0 / series.n)
    assert abs(series.values.var(ddof=1) - 1.0) <= 3 * se


def test_ar1_lag_one_autocorrelation():
    x = simulate_ar(ARModel.named("ar1"), 10_000, seed=2).values
    x = x - x.mean()
    acf1 = np.sum(x[1:] * x[:-1]) / np.sum(x * x)
    assert abs(acf1 - 0.9) <= 3 * np.sqrt((1 - 0.9 ** 2) / x.size)


def test_ar1_variance():
    model = ARModel.named("ar1")
    x = simulate_ar(model, 10_000, seed=3).values
    theory = 1.0 / 0.19
    assert model.variance == pytest.approx(theory)
    se = np.sqrt(2 * theory ** 2 * (1 + 0.81) / (1 - 0.81) / x.size)
    assert abs(x.var(ddof=1) - theory) <= 4 * se


def test_autocovariance_ar1():
    gamma = ARModel(rho=(0.6,), sigma2=2.0).autocovariance(5)
    np.testing.assert_allclose(gamma, 2.0 / (1 - 0.36) * 0.6 ** np.arange(6))


def test_simulation_is_seeded():
    model = ARModel.named("ar4")
    np.testing.assert_array_equal(simulate_ar(model, 64, seed=7).values, simulate_ar(model, 64, seed=7).values)
    assert not np.array_equal(simulate_ar(model, 64, seed=7).values, simulate_ar(model, 64, seed=8).values)


def test_invalid_length():
    with pytest.raises(InputDomainError):
        simulate_ar(ARModel(), 0)


def test_white_noise_psd_is_flat():
    lam = np.linspace(0, np.pi, 17)
    np.testing.assert_allclose(ar_psd(ARModel(), lam), 1 / (2 * np.pi))


def test_ar1_psd_at_zero():
    assert ar_psd(ARModel.named("ar1"), 0.0) == pytest.approx(50 / np.pi, rel=1e-12)


@pytest.mark.parametrize("name", ["ar1", "ar4"])
def test_psd_integrates_to_variance(name):
    model = ARModel.named(name)
    value, _ = integrate.quad(lambda lam: ar_psd(model, lam), 0.0, np.pi, limit=1000, epsabs=1e-12, epsrel=1e-12)
    assert 2 * value == pytest.approx(model.variance, rel=1e-6)


@pytest.mark.parametrize("n, degree, expected", [(128, 3, 32), (512, 3, 40), (12, 3, 4), (8, 3, 4), (100, 3, 25)])
def test_choose_K(n, degree, expected):
    assert choose_K(n, degree) == expected
