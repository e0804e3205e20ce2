"""
Autoregressive processes: simulation and theoretical spectral densities.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import signal

from pspline_psd.const import AR_BURNIN_BASE, AR_BURNIN_PER_LAG, AR_MODELS, DEFAULT_DEGREE, MAX_DENSITIES
from pspline_psd.errors import InputDomainError, NonStationaryError
from pspline_psd.series import TimeSeries

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class ARModel:
    """Y_t = sum_j rho_j Y_{t-j} + e_t with e_t ~ Normal(0, sigma2)."""

    rho: tuple[float, ...] = ()
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", tuple(float(r) for r in np.atleast_1d(self.rho)))
        if not self.sigma2 > 0:
            raise InputDomainError(f"Innovation variance must be positive, got {self.sigma2}")
        if self.rho:
            # Roots of 1 - rho_1 z - ... - rho_p z^p, highest power first.
            roots = np.roots(np.concatenate([-np.asarray(self.rho)[::-1], [1.0]]))
            if np.any(np.abs(roots) <= 1.0):
                raise NonStationaryError(f"AR coefficients {self.rho} are not stationary")

    @classmethod
    def named(cls, name: str, sigma2: float = 1.0) -> ARModel:
        if name not in AR_MODELS:
            raise InputDomainError(f"Unknown AR model '{name}', choose from {sorted(AR_MODELS)}")
        return cls(rho=AR_MODELS[name], sigma2=sigma2)

    @property
    def order(self) -> int:
        return len(self.rho)

    @property
    def ar_polynomial(self) -> np.ndarray:
        return np.concatenate([[1.0], -np.asarray(self.rho)])

    def autocovariance(self, max_lag: int) -> np.ndarray:
        """Exact autocovariances gamma(0..max_lag) from the Yule-Walker equations."""
        p = self.order
        if p == 0:
            gamma = np.zeros(max_lag + 1)
            gamma[0] = self.sigma2
            return gamma

        system = np.eye(p + 1)
        for h in range(p + 1):
            for j, rho in enumerate(self.rho, start=1):
                system[h, abs(h - j)] -= rho
        rhs = np.zeros(p + 1)
        rhs[0] = self.sigma2
        gamma = list(np.linalg.solve(system, rhs))
        for h in range(p + 1, max_lag + 1):
            gamma.append(sum(rho * gamma[h - j] for j, rho in enumerate(self.rho, start=1)))
        return np.asarray(gamma[:max_lag + 1])

    @property
    def variance(self) -> float:
        return float(self.autocovariance(0)[0])


def simulate_ar(model: ARModel, n: int, seed: int | np.random.SeedSequence | None = None) -> TimeSeries:
    """Simulate n observations from zero initial conditions after 10 p + 100 warm-up steps."""
    if n < 1:
        raise InputDomainError(f"Series length must be positive, got {n}")
    rng = np.random.default_rng(seed)
    warmup = AR_BURNIN_PER_LAG * model.order + AR_BURNIN_BASE
    noise = rng.normal(0.0, np.sqrt(model.sigma2), size=n + warmup)
    values = signal.lfilter([1.0], model.ar_polynomial, noise)
    return TimeSeries(values[warmup:])


def ar_psd(model: ARModel, lam: float | np.ndarray) -> float | np.ndarray:
    """f(lambda) = sigma2 / (2 pi) / |1 - sum_j rho_j exp(-i j lambda)|^2."""
    lam = np.asarray(lam, dtype=float)
    _, response = signal.freqz([1.0], model.ar_polynomial, worN=np.atleast_1d(lam))
    psd = model.sigma2 / (2.0 * np.pi) * np.abs(response) ** 2
    return float(psd[0]) if lam.ndim == 0 else psd


def choose_K(n: int, degree: int = DEFAULT_DEGREE) -> int:
    """Rule of thumb K = min(n / 4, 40), never below r + 1."""
    return max(min(n // 4, MAX_DENSITIES), degree + 1)
