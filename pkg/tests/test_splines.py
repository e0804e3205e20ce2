"""Tests for knot placement, the B-spline basis and B-spline densities."""

from __future__ import annotations

import logging

import numpy as np
import pytest
from scipy import integrate, stats
from scipy.interpolate import BSpline

from pspline_psd.errors import InputDomainError, KnotError
from pspline_psd.series import Periodogram, periodogram
from pspline_psd.splines import (
    KnotVector,
    basis_matrix,
    basis_values,
    bspline_basis,
    bspline_density,
    density_scale,
    equidistant_knots,
    qspaced_knots,
)


def test_minimal_equidistant_vector():
    kv = equidistant_knots(4, 3)
    np.testing.assert_array_equal(kv.xi, [0, 0, 0, 0, 1, 1, 1, 1])
    np.testing.assert_array_equal(kv.internal, [0, 1])


def test_equidistant_internal_knots():
    np.testing.assert_allclose(equidistant_knots(5, 3).internal, [0, 0.5, 1])
    kv = equidistant_knots(10, 3)
    assert kv.n_internal == 8
    assert kv.n_densities == 10
    np.testing.assert_allclose(kv.internal, np.arange(8) / 7)


def test_too_few_densities():
    with pytest.raises(KnotError):
        equidistant_knots(3, 3)


@pytest.mark.parametrize(
    "xi",
    [
        [0, 0, 0, 0.1, 1, 1, 1, 1],
        [0, 0, 0, 0, 0.6, 0.4, 1, 1, 1, 1],
        [0, 0, 0, 0, 1, 1, 1],
    ],
)
def test_invalid_knot_vectors(xi):
    with pytest.raises(KnotError):
        KnotVector(np.array(xi, dtype=float), 3)


def test_qspaced_minimal_ignores_data(exp_pgram):
    np.testing.assert_array_equal(qspaced_knots(exp_pgram, 4, 3).internal, [0, 1])


def test_qspaced_concentrates_around_peak():
    base = periodogram(np.random.default_rng(0).normal(size=21))
    ordinates = np.ones(base.nu)
    ordinates[3] = 1e4  # omega = 8/21, about 0.38
    pgram = Periodogram(ordinates, base.frequencies, base.n)

    kv = qspaced_knots(pgram, 7, 3)
    interior = kv.internal[1:-1]
    assert interior.size == 3
    steep = (interior > pgram.omega[2]) & (interior <= pgram.omega[3])
    assert steep.sum() >= 2


def test_qspaced_white_noise_is_monotone(exp_pgram):
    kv = qspaced_knots(exp_pgram, 12, 3)
    internal = kv.internal
    assert internal.size == 10
    assert internal[0] == 0.0 and internal[-1] == 1.0
    assert np.all(np.diff(internal) > 0)
    assert np.all((internal >= 0) & (internal <= 1))


def test_qspaced_scale_invariant(exp_pgram):
    scaled = exp_pgram.scaled(7.3)
    np.testing.assert_allclose(
        qspaced_knots(scaled, 15, 3).internal, qspaced_knots(exp_pgram, 15, 3).internal, rtol=1e-12, atol=1e-14
    )


def test_qspaced_flat_periodogram_falls_back(caplog):
    base = periodogram(np.random.default_rng(1).normal(size=65))
    flat = Periodogram(np.full(base.nu, 2.0), base.frequencies, base.n)
    with caplog.at_level(logging.WARNING):
        kv = qspaced_knots(flat, 9, 3)
    np.testing.assert_allclose(kv.internal, equidistant_knots(9, 3).internal)
    assert "Flat periodogram" in caplog.text


def test_qspaced_needs_two_ordinates():
    pgram = periodogram(np.array([-1.5, -0.5, 0.5, 1.5]))
    with pytest.raises(KnotError):
        qspaced_knots(pgram, 5, 3)


@pytest.mark.parametrize("scheme", ["equidistant", "qspaced"])
def test_partition_of_unity(rng, exp_pgram, scheme):
    kv = equidistant_knots(10, 3) if scheme == "equidistant" else qspaced_knots(exp_pgram, 10, 3)
    omega = np.concatenate([rng.uniform(size=1000), [0.0, 1.0], kv.internal])
    total = basis_values(omega, kv).sum(axis=1)
    assert np.max(np.abs(total - 1.0)) <= 1e-12


def test_bernstein_basis_without_interior_knots():
    kv = equidistant_knots(4, 3)
    omega = np.linspace(0, 1, 41)
    values = basis_values(omega, kv)
    np.testing.assert_allclose(values[:, 0], (1 - omega) ** 3, atol=1e-14)
    np.testing.assert_allclose(values[:, 1], 3 * omega * (1 - omega) ** 2, atol=1e-14)
    np.testing.assert_allclose(values[:, 2], 3 * omega ** 2 * (1 - omega), atol=1e-14)
    np.testing.assert_allclose(values[:, 3], omega ** 3, atol=1e-14)


def test_boundary_values(cubic_knots):
    np.testing.assert_array_equal(bspline_basis(0.0, cubic_knots), np.eye(10)[0])
    np.testing.assert_array_equal(bspline_basis(1.0, cubic_knots), np.eye(10)[-1])


def test_basis_agrees_with_scipy(rng, exp_pgram):
    kv = qspaced_knots(exp_pgram, 12, 3)
    omega = np.sort(rng.uniform(0.0, 0.999, size=200))
    expected = BSpline.design_matrix(omega, kv.xi, kv.degree).toarray()
    np.testing.assert_allclose(basis_values(omega, kv), expected, atol=1e-12)


def test_evaluation_outside_unit_interval():
    with pytest.raises(InputDomainError):
        basis_values(np.array([0.5, 1.2]), equidistant_knots(5, 3))


@pytest.mark.parametrize("scheme", ["equidistant", "qspaced"])
def test_densities_integrate_to_one(exp_pgram, scheme):
    kv = equidistant_knots(9, 3) if scheme == "equidistant" else qspaced_knots(exp_pgram, 9, 3)
    for k in range(kv.n_densities):
        lo, hi = kv.support(k)
        breaks = [x for x in kv.internal if lo < x < hi]
        value, _ = integrate.quad(
            lambda x: bspline_density(x, k, kv), lo, hi, points=breaks or None, epsabs=1e-12, epsrel=1e-12
        )
        assert value == pytest.approx(1.0, abs=1e-8)


def test_first_density_is_beta_one_four():
    kv = equidistant_knots(4, 3)
    for omega in np.linspace(0, 1, 11):
        expected = stats.beta(1, 4).pdf(omega)
        assert bspline_density(omega, 0, kv) == pytest.approx(expected, abs=1e-12)


def test_local_support(cubic_knots):
    k = 4
    lo, hi = cubic_knots.support(k)
    outside = [x for x in np.linspace(0, 1, 101) if x < lo or x > hi]
    assert outside
    for omega in outside:
        assert bspline_density(omega, k, cubic_knots) == 0.0


def test_zero_width_density_rejected():
    kv = KnotVector.from_internal(np.array([0, 0.5, 0.5, 0.5, 0.5, 0.5, 1]), 3)
    with pytest.raises(KnotError):
        density_scale(kv)


def test_basis_matrix_matches_pointwise_densities(exp_pgram, cubic_knots):
    bm = basis_matrix(cubic_knots, exp_pgram)
    assert bm.values.shape == (exp_pgram.nu, 10)
    assert np.all(bm.values.sum(axis=1) > 0)
    for row in (0, 17, exp_pgram.nu - 1):
        omega = exp_pgram.omega[row]
        expected = [bspline_density(omega, k, cubic_knots) for k in range(10)]
        np.testing.assert_allclose(bm.values[row], expected, rtol=1e-12)
    assert np.all(bm.values[0, cubic_knots.degree + 1:] == 0.0)
    w = np.full(10, 0.1)
    np.testing.assert_allclose(bm.mixture(w), bm.values @ w)
