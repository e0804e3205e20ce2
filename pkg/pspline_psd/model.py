"""
P-spline spectral model: weights, mixture density, psd, Whittle likelihood and priors.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from pspline_psd.config import PriorConfig
from pspline_psd.errors import InputDomainError, InvalidModelError
from pspline_psd.penalty import PenaltyMatrix
from pspline_psd.series import Periodogram
from pspline_psd.splines import BasisMatrix, KnotVector, density_values

_LOG = logging.getLogger(__name__)

LatentVector = np.ndarray
Weights = np.ndarray


def v_to_w(v: LatentVector) -> Weights:
    """Map K - 1 log-ratio coordinates to a point on the K-simplex."""
    v = np.asarray(v, dtype=float)
    m = max(0.0, float(v.max())) if v.size else 0.0
    expv = np.exp(v - m)
    last = np.exp(-m)
    total = last + expv.sum()
    return np.append(expv, last) / total


def w_to_v(w: Weights) -> LatentVector:
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise InputDomainError("Weights must be strictly positive")
    return np.log(w[:-1]) - np.log(w[-1])


def mixture_density(omega: float | np.ndarray, w: Weights, kv: KnotVector) -> float | np.ndarray:
    values = density_values(omega, kv) @ np.asarray(w, dtype=float)
    return float(values[0]) if np.ndim(omega) == 0 else values


@dataclass(frozen=True)
class SpectralModel:
    """f(pi * omega) = tau * s(omega), with s the B-spline density mixture."""

    tau: float
    v: LatentVector
    kv: KnotVector
    bm: BasisMatrix | None = None

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise InvalidModelError(f"psd scale tau must be positive, got {self.tau}")

    @cached_property
    def weights(self) -> Weights:
        return v_to_w(self.v)

    def psd(self, lam: float | np.ndarray) -> float | np.ndarray:
        return self.tau * mixture_density(np.asarray(lam) / np.pi, self.weights, self.kv)

    def fourier_psd(self) -> np.ndarray:
        """psd at the Fourier frequencies through the cached basis matrix."""
        if self.bm is None:
            raise InvalidModelError("Model has no basis matrix at the Fourier frequencies")
        return self.tau * self.bm.mixture(self.weights)


def psd_at(lam: float | np.ndarray, model: SpectralModel) -> float | np.ndarray:
    return model.psd(lam)


def whittle_from_psd(ordinates: np.ndarray, psd: np.ndarray) -> float:
    if np.any(~np.isfinite(psd)) or np.any(psd <= 0):
        raise InvalidModelError("psd must be positive and finite at every Fourier frequency")
    return float(-np.sum(np.log(psd) + ordinates / psd))


def whittle_log_likelihood(pgram: Periodogram, model: SpectralModel) -> float:
    """Log Whittle likelihood -sum(log f + I / f), additive constant fixed at 0."""
    if model.bm is not None:
        psd = model.fourier_psd()
    else:
        psd = np.asarray(model.psd(pgram.frequencies))
    return whittle_from_psd(pgram.ordinates, psd)


def tau_profile_mle(pgram: Periodogram, mixture: np.ndarray) -> float:
    """Maximizer of the Whittle likelihood in tau for a fixed mixture shape."""
    return float(np.mean(pgram.ordinates / mixture))


def log_prior_v(v: LatentVector, phi: float, penalty: PenaltyMatrix) -> float:
    """Normal log-density of v with precision phi * P."""
    dim = penalty.dim
    return float(
        -0.5 * dim * np.log(2.0 * np.pi)
        + 0.5 * dim * np.log(phi)
        + 0.5 * penalty.logdet
        - 0.5 * phi * penalty.quadratic(v)
    )


def log_prior(
    v: LatentVector,
    phi: float,
    delta: float,
    tau: float,
    penalty: PenaltyMatrix,
    cfg: PriorConfig,
) -> float:
    """
    Joint log prior of (v, phi, delta, tau).

    v | phi ~ N(0, (phi P)^-1), phi | delta ~ Gamma(a_phi, delta b_phi),
    delta ~ Gamma(a_delta, b_delta), tau ~ InvGamma(a_tau, b_tau); Gamma(a, b) has
    mean a / b.
    """
    if not (phi > 0 and delta > 0 and tau > 0):
        raise InputDomainError(f"phi, delta and tau must be positive, got {phi}, {delta}, {tau}")
    return float(
        log_prior_v(v, phi, penalty)
        + stats.gamma.logpdf(phi, cfg.alpha_phi, scale=1.0 / (delta * cfg.beta_phi))
        + stats.gamma.logpdf(delta, cfg.alpha_delta, scale=1.0 / cfg.beta_delta)
        + stats.invgamma.logpdf(tau, cfg.alpha_tau, scale=cfg.beta_tau)
    )
