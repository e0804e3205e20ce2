"""
Penalty matrices for the Gaussian prior on the latent weight coordinates.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg
from scipy.interpolate import BSpline

from pspline_psd.const import DEFAULT_EPSILON
from pspline_psd.errors import KnotError, PenaltyError
from pspline_psd.splines import KnotVector, density_scale

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class DifferenceMatrix:
    entries: np.ndarray
    order: int


@dataclass(frozen=True)
class PenaltyMatrix:
    entries: np.ndarray
    epsilon: float
    kind: str

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @cached_property
    def cholesky(self) -> np.ndarray:
        return linalg.cholesky(self.entries, lower=True)

    @cached_property
    def logdet(self) -> float:
        return float(2.0 * np.log(np.diag(self.cholesky)).sum())

    def quadratic(self, v: np.ndarray) -> float:
        return float(v @ self.entries @ v)


def difference_matrix(n_densities: int, order: int) -> DifferenceMatrix:
    """Order-d difference operator acting on the K - 1 latent coordinates."""
    if not 1 <= order <= n_densities - 2:
        raise PenaltyError(f"Difference order must lie in [1, {n_densities - 2}], got {order}")
    entries = np.diff(np.eye(n_densities - 1, dtype=int), n=order, axis=0)
    return DifferenceMatrix(entries=entries, order=order)


def difference_penalty(
    n_densities: int, order: int, epsilon: float = DEFAULT_EPSILON
) -> PenaltyMatrix:
    if not epsilon > 0:
        raise PenaltyError(f"Ridge epsilon must be positive, got {epsilon}")
    d = difference_matrix(n_densities, order).entries.astype(float)
    entries = d.T @ d + epsilon * np.eye(n_densities - 1)
    return PenaltyMatrix(entries=entries, epsilon=epsilon, kind="difference")


def derivative_gram(kv: KnotVector, order: int, normalize: bool = True) -> np.ndarray:
    """
    K x K Gram matrix of order-d derivatives of the B-spline densities.

    Integrated exactly with Gauss-Legendre nodes on every knot span; the integrand is
    a polynomial of degree 2 (r - d) there. Optionally divided by the maximum
    absolute column sum.
    """
    r = kv.degree
    if order not in (1, 2):
        raise PenaltyError(f"Derivative penalty order must be 1 or 2, got {order}")
    if order > r:
        raise PenaltyError(f"Derivative order {order} exceeds the spline degree {r}")
    internal = kv.internal
    if np.any(np.diff(internal) <= 0):
        raise KnotError("Derivative penalty needs strictly increasing internal knots")

    k = kv.n_densities
    derivative = BSpline(kv.xi, np.eye(k), r).derivative(order)
    scale = density_scale(kv)

    nodes, weights = np.polynomial.legendre.leggauss(r - order + 1)
    gram = np.zeros((k, k))
    for a, b in zip(internal[:-1], internal[1:]):
        x = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        values = derivative(x) * scale
        gram += 0.5 * (b - a) * (values.T * weights) @ values

    gram = 0.5 * (gram + gram.T)
    if normalize:
        gram /= np.abs(gram).sum(axis=0).max()
    return gram


def derivative_penalty(
    kv: KnotVector, order: int, epsilon: float = DEFAULT_EPSILON
) -> PenaltyMatrix:
    """Normalized derivative Gram matrix restricted to the first K - 1 densities, plus a ridge."""
    if not epsilon > 0:
        raise PenaltyError(f"Ridge epsilon must be positive, got {epsilon}")
    gram = derivative_gram(kv, order)
    entries = gram[:-1, :-1] + epsilon * np.eye(kv.n_densities - 1)
    _LOG.debug("Derivative penalty of order %d on %d knots", order, kv.n_internal)
    return PenaltyMatrix(entries=entries, epsilon=epsilon, kind="derivative")
