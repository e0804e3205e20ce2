"""
Two-stage Metropolis-within-Gibbs sampler for the P-spline spectral model.

A pilot chain in the raw latent coordinates estimates the mean and covariance of v;
the final chain then runs univariate random-walk Metropolis steps on the whitened
coordinates beta, with v = S^(1/2) beta + v_bar, followed by conjugate draws of
phi, delta and tau.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg

from pspline_psd.config import ChainConfig, PriorConfig
from pspline_psd.const import (
    ADAPT_WINDOW,
    INIT_WEIGHT_FLOOR,
    INITIAL_SIGMA,
    PILOT_EIGEN_FLOOR,
    PILOT_RANK_FLOOR,
    SIGMA_GROW,
    SIGMA_SHRINK,
    TARGET_ACCEPT_HIGH,
    TARGET_ACCEPT_LOW,
)
from pspline_psd.errors import InvalidModelError
from pspline_psd.model import log_prior, v_to_w, w_to_v, whittle_from_psd
from pspline_psd.penalty import PenaltyMatrix
from pspline_psd.posterior import PosteriorSamples
from pspline_psd.series import Periodogram, PreprocessedSeries, periodogram
from pspline_psd.splines import BasisMatrix, KnotVector, basis_matrix

_LOG = logging.getLogger(__name__)

LogTarget = Callable[[np.ndarray], float]


@dataclass
class SamplerState:
    v: np.ndarray
    phi: float
    delta: float
    tau: float
    beta: np.ndarray
    sigma: float

    @property
    def weights(self) -> np.ndarray:
        return v_to_w(self.v)

    def copy(self) -> SamplerState:
        return SamplerState(self.v.copy(), self.phi, self.delta, self.tau, self.beta.copy(), self.sigma)


@dataclass(frozen=True)
class PilotSummary:
    v_bar: np.ndarray
    S: np.ndarray
    S_half: np.ndarray
    S_half_inv: np.ndarray

    @classmethod
    def identity(cls, dim: int) -> PilotSummary:
        eye = np.eye(dim)
        return cls(v_bar=np.zeros(dim), S=eye, S_half=eye, S_half_inv=eye)

    @classmethod
    def from_draws(cls, draws: np.ndarray, floor: float = PILOT_EIGEN_FLOOR) -> PilotSummary:
        """Mean, covariance and symmetric square root of pilot draws (one row per draw)."""
        draws = np.atleast_2d(np.asarray(draws, dtype=float))
        count, dim = draws.shape
        if count < 2:
            _LOG.warning("Pilot kept %d draw(s), keeping the identity reparametrization", count)
            return cls.identity(dim)

        v_bar = draws.mean(axis=0)
        cov = np.atleast_2d(np.cov(draws, rowvar=False))
        if count <= dim:
            floor = max(floor, PILOT_RANK_FLOOR * float(np.mean(np.diag(cov))))
            _LOG.warning(
                "Pilot kept %d draws for %d coordinates, flooring covariance eigenvalues at %.3g",
                count, dim, floor,
            )
        eigval, eigvec = linalg.eigh(cov)
        eigval = np.maximum(eigval, floor)
        root = np.sqrt(eigval)
        s_half = (eigvec * root) @ eigvec.T
        s_half_inv = (eigvec / root) @ eigvec.T
        return cls(v_bar=v_bar, S=cov, S_half=s_half, S_half_inv=s_half_inv)

    def to_v(self, beta: np.ndarray) -> np.ndarray:
        return self.S_half @ beta + self.v_bar

    def to_beta(self, v: np.ndarray) -> np.ndarray:
        return self.S_half_inv @ (v - self.v_bar)


def init_state(pgram: Periodogram, kv: KnotVector, bm: BasisMatrix) -> SamplerState:
    """Weights proportional to the mean periodogram over each density's support."""
    omega = pgram.omega
    means = np.empty(kv.n_densities)
    for k in range(kv.n_densities):
        lo, hi = kv.support(k)
        inside = (omega >= lo) & (omega <= hi)
        means[k] = pgram.ordinates[inside].mean() if inside.any() else 0.0
    weights = np.maximum(means, INIT_WEIGHT_FLOOR)
    weights /= weights.sum()
    v = w_to_v(weights)
    tau = max(float(pgram.ordinates.mean()), INIT_WEIGHT_FLOOR)
    return SamplerState(v=v, phi=1.0, delta=1.0, tau=tau, beta=v.copy(), sigma=INITIAL_SIGMA)


def update_phi(
    state: SamplerState, penalty: PenaltyMatrix, cfg: PriorConfig, rng: np.random.Generator
) -> float:
    shape = 0.5 * penalty.dim + cfg.alpha_phi
    rate = 0.5 * penalty.quadratic(state.v) + state.delta * cfg.beta_phi
    return float(rng.gamma(shape, 1.0 / rate))


def update_delta(state: SamplerState, cfg: PriorConfig, rng: np.random.Generator) -> float:
    shape = cfg.alpha_phi + cfg.alpha_delta
    rate = cfg.beta_phi * state.phi + cfg.beta_delta
    return float(rng.gamma(shape, 1.0 / rate))


def update_tau(
    state: SamplerState,
    pgram: Periodogram,
    bm: BasisMatrix,
    cfg: PriorConfig,
    rng: np.random.Generator,
) -> float:
    """Inverse-Gamma draw, generated as the reciprocal of a Gamma variate."""
    mixture = bm.mixture(state.weights)
    if np.any(mixture <= 0):
        raise InvalidModelError("Mixture density vanishes at a Fourier frequency")
    shape = cfg.alpha_tau + pgram.nu
    rate = float(np.sum(pgram.ordinates / mixture)) + cfg.beta_tau
    return float(1.0 / rng.gamma(shape, 1.0 / rate))


def v_log_target(
    state: SamplerState, pgram: Periodogram, bm: BasisMatrix, penalty: PenaltyMatrix
) -> LogTarget:
    """Whittle log-likelihood plus the Gaussian v-prior quadratic, phi and tau held fixed."""
    tau, phi = state.tau, state.phi

    def target(v: np.ndarray) -> float:
        try:
            loglik = whittle_from_psd(pgram.ordinates, tau * bm.mixture(v_to_w(v)))
        except InvalidModelError:
            return -np.inf
        return loglik - 0.5 * phi * penalty.quadratic(v)

    return target


def metropolis_sweep(
    state: SamplerState,
    pilot: PilotSummary,
    log_target: LogTarget,
    rng: np.random.Generator,
) -> tuple[SamplerState, int]:
    """One univariate random-walk step on every beta coordinate, in order."""
    beta = state.beta.copy()
    v = state.v.copy()
    current = log_target(v)
    accepted = 0
    for k in range(beta.size):
        proposal = beta.copy()
        proposal[k] += state.sigma * rng.standard_normal()
        v_prop = pilot.to_v(proposal)
        candidate = log_target(v_prop)
        if np.log(rng.uniform()) < candidate - current:
            beta, v, current = proposal, v_prop, candidate
            accepted += 1
    new_state = state.copy()
    new_state.beta, new_state.v = beta, v
    return new_state, accepted


def update_v(
    state: SamplerState,
    pilot: PilotSummary,
    pgram: Periodogram,
    bm: BasisMatrix,
    penalty: PenaltyMatrix,
    cfg: PriorConfig,
    rng: np.random.Generator,
    log_target: LogTarget | None = None,
) -> tuple[SamplerState, int]:
    if log_target is None:
        log_target = v_log_target(state, pgram, bm, penalty)
    return metropolis_sweep(state, pilot, log_target, rng)


def adapt_sigma(
    sigma: float,
    recent_accept_rate: float,
    low: float = TARGET_ACCEPT_LOW,
    high: float = TARGET_ACCEPT_HIGH,
) -> float:
    if recent_accept_rate < low:
        return sigma * SIGMA_SHRINK
    if recent_accept_rate > high:
        return sigma * SIGMA_GROW
    return sigma


class GibbsSampler:
    """
    Runs the Gibbs cycle (v, phi, delta, tau) over a fixed periodogram, basis and penalty.

    The sampler owns one seeded generator, so a pilot run followed by a final run is
    fully reproducible from the chain seed.
    """

    def __init__(
        self,
        pgram: Periodogram,
        kv: KnotVector,
        bm: BasisMatrix,
        penalty: PenaltyMatrix,
        prior: PriorConfig,
        chain: ChainConfig,
        label: str = "chain",
    ) -> None:
        self._pgram = pgram
        self._kv = kv
        self._bm = bm
        self._penalty = penalty
        self._prior = prior
        self._chain = chain
        self._label = label
        self._rng = np.random.default_rng(chain.seed)
        self._state = init_state(pgram, kv, bm)
        self._pilot = PilotSummary.identity(kv.n_densities - 1)
        self._pilot_accept = float("nan")

    @property
    def state(self) -> SamplerState:
        return self._state

    @property
    def pilot(self) -> PilotSummary:
        return self._pilot

    @property
    def pilot_acceptance_rate(self) -> float:
        return self._pilot_accept

    def sweep(self) -> int:
        state, accepted = update_v(
            self._state, self._pilot, self._pgram, self._bm, self._penalty, self._prior, self._rng
        )
        state.phi = update_phi(state, self._penalty, self._prior, self._rng)
        state.delta = update_delta(state, self._prior, self._rng)
        state.tau = update_tau(state, self._pgram, self._bm, self._prior, self._rng)
        self._state = state
        return accepted

    def log_posterior(self, state: SamplerState | None = None) -> float:
        state = state or self._state
        psd = state.tau * self._bm.mixture(state.weights)
        return whittle_from_psd(self._pgram.ordinates, psd) + log_prior(
            state.v, state.phi, state.delta, state.tau, self._penalty, self._prior
        )

    def _run_phase(
        self, iterations: int, burnin: int, thin: int, adapt_until: int
    ) -> tuple[list[SamplerState], float]:
        """Run sweeps; sigma adapts over windows while the sweep index is below adapt_until."""
        dim = self._kv.n_densities - 1
        kept: list[SamplerState] = []
        window_accepted = 0
        kept_accepted = 0
        kept_sweeps = 0
        for m in range(1, iterations + 1):
            accepted = self.sweep()
            if m <= adapt_until:
                window_accepted += accepted
                if m % ADAPT_WINDOW == 0:
                    rate = window_accepted / (ADAPT_WINDOW * dim)
                    self._state.sigma = adapt_sigma(
                        self._state.sigma, rate, self._chain.target_accept_low, self._chain.target_accept_high
                    )
                    _LOG.debug("[%s] sweep %d acceptance %.3f sigma %.4g", self._label, m, rate, self._state.sigma)
                    window_accepted = 0
            if m > burnin:
                kept_accepted += accepted
                kept_sweeps += 1
                if (m - burnin) % thin == 0:
                    kept.append(self._state.copy())
        rate = kept_accepted / (kept_sweeps * dim) if kept_sweeps else float("nan")
        return kept, rate

    def pilot_run(self) -> PilotSummary:
        chain = self._chain
        kept, rate = self._run_phase(
            chain.pilot_iterations, chain.pilot_burnin, chain.pilot_thin, adapt_until=chain.pilot_iterations
        )
        self._pilot_accept = rate
        if kept:
            self._pilot = PilotSummary.from_draws(np.array([s.v for s in kept]))
        # Final chain starts from the last pilot state, expressed in the new coordinates.
        self._state.beta = self._pilot.to_beta(self._state.v)
        self._state.v = self._pilot.to_v(self._state.beta)
        self._state.sigma = INITIAL_SIGMA
        _LOG.info("[%s] Pilot done: %d draws kept, acceptance %.3f", self._label, len(kept), rate)
        return self._pilot

    def run(self) -> PosteriorSamples:
        chain = self._chain
        kept, rate = self._run_phase(chain.iterations, chain.burnin, chain.thin, adapt_until=chain.burnin)
        _LOG.info(
            "[%s] Final chain done: %d draws kept, acceptance %.3f, sigma %.4g",
            self._label, len(kept), rate, self._state.sigma,
        )
        psd = np.array([s.tau * self._bm.mixture(s.weights) for s in kept]).reshape(len(kept), self._pgram.nu)
        trace = np.array([[s.phi, s.delta, s.tau] for s in kept]).reshape(len(kept), 3)
        logpost = np.array([self.log_posterior(s) for s in kept])
        return PosteriorSamples(
            psd_samples=psd,
            param_trace=trace,
            frequencies=self._pgram.frequencies,
            log_posterior=logpost,
            acceptance_rate=rate,
            pilot_acceptance_rate=self._pilot_accept,
            sigma=self._state.sigma,
        )


def pilot_run(
    data: PreprocessedSeries,
    kv: KnotVector,
    bm: BasisMatrix,
    penalty: PenaltyMatrix,
    cfg: ChainConfig,
    prior: PriorConfig | None = None,
) -> PilotSummary:
    sampler = GibbsSampler(periodogram(data), kv, bm, penalty, prior or PriorConfig(), cfg)
    return sampler.pilot_run()


def run_chain(
    data: PreprocessedSeries,
    kv: KnotVector,
    penalty: PenaltyMatrix,
    cfg: ChainConfig,
    prior: PriorConfig | None = None,
    label: str = "chain",
) -> PosteriorSamples:
    """Pilot run followed by the final chain; the result carries the series' variance as scale factor."""
    cfg.validate()
    prior = prior or PriorConfig()
    pgram = periodogram(data)
    bm = basis_matrix(kv, pgram)
    sampler = GibbsSampler(pgram, kv, bm, penalty, prior, cfg, label=label)
    sampler.pilot_run()
    samples = sampler.run()
    return dataclasses.replace(samples, scale_factor=data.scale_factor)
