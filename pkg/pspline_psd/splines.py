"""
Clamped knot vectors, B-spline bases and B-spline densities on [0, 1].

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from pspline_psd.const import DEFAULT_DEGREE, KNOT_MIN_GAP
from pspline_psd.errors import InputDomainError, KnotError
from pspline_psd.series import Periodogram

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class KnotVector:
    """
    Clamped knot sequence with K + r + 1 entries.

    The first and last r + 1 entries are 0 and 1; the internal knots
    xi[r], ..., xi[K] run from 0 to 1.
    """

    xi: np.ndarray
    degree: int = DEFAULT_DEGREE

    def __post_init__(self) -> None:
        xi = np.asarray(self.xi, dtype=float)
        r = self.degree
        object.__setattr__(self, "xi", xi)
        if r < 0:
            raise KnotError(f"Degree must be non-negative, got {r}")
        if xi.ndim != 1 or xi.size < 2 * r + 2:
            raise KnotError(f"Knot vector needs at least {2 * r + 2} entries for degree {r}")
        if np.any(np.diff(xi) < 0):
            raise KnotError("Knot vector must be non-decreasing")
        if np.any(xi[:r + 1] != 0.0) or np.any(xi[-(r + 1):] != 1.0):
            raise KnotError("Knot vector must be clamped at 0 and 1")

    @classmethod
    def from_internal(cls, internal: np.ndarray, degree: int = DEFAULT_DEGREE) -> KnotVector:
        internal = np.asarray(internal, dtype=float)
        xi = np.concatenate([np.zeros(degree), internal, np.ones(degree)])
        return cls(xi=xi, degree=degree)

    @property
    def n_densities(self) -> int:
        return int(self.xi.size - self.degree - 1)

    @property
    def internal(self) -> np.ndarray:
        return self.xi[self.degree:self.n_densities + 1]

    @property
    def n_internal(self) -> int:
        return self.n_densities - self.degree + 1

    def support(self, k: int) -> tuple[float, float]:
        return float(self.xi[k]), float(self.xi[k + self.degree + 1])

    def to_list(self) -> list[float]:
        return [float(x) for x in self.internal]


@dataclass(frozen=True)
class BasisMatrix:
    """B-spline densities b_k(omega_l) at the Fourier grid, one row per frequency."""

    values: np.ndarray
    grid: np.ndarray

    @property
    def n_densities(self) -> int:
        return int(self.values.shape[1])

    def mixture(self, weights: np.ndarray) -> np.ndarray:
        return self.values @ weights


def _check_order(n_densities: int, degree: int) -> None:
    if n_densities < degree + 1:
        raise KnotError(f"Need K >= r + 1 densities, got K={n_densities}, r={degree}")


def equidistant_knots(n_densities: int, degree: int = DEFAULT_DEGREE) -> KnotVector:
    _check_order(n_densities, degree)
    internal = np.linspace(0.0, 1.0, n_densities - degree + 1)
    return KnotVector.from_internal(internal, degree)


def _inverse_cdf(grid: np.ndarray, cdf: np.ndarray, q: float) -> float:
    # Linear inversion of a non-decreasing interpolant; flat stretches map to their midpoint.
    lo = int(np.searchsorted(cdf, q, side="left"))
    hi = int(np.searchsorted(cdf, q, side="right"))
    if hi > lo:
        return 0.5 * (grid[lo] + grid[hi - 1])
    t = (q - cdf[lo - 1]) / (cdf[lo] - cdf[lo - 1])
    return float(grid[lo - 1] + t * (grid[lo] - grid[lo - 1]))


def _enforce_gap(knots: np.ndarray, gap: float = KNOT_MIN_GAP) -> np.ndarray:
    knots = knots.copy()
    for j in range(1, knots.size):
        knots[j] = max(knots[j], knots[j - 1] + gap)
    knots[-1] = 1.0
    for j in range(knots.size - 2, 0, -1):
        knots[j] = min(knots[j], knots[j + 1] - gap)
    return knots


def qspaced_knots(pgram: Periodogram, n_densities: int, degree: int = DEFAULT_DEGREE) -> KnotVector:
    """
    Place internal knots at equally spaced quantiles of a periodogram-driven cdf.

    The square-root periodogram is standardized, folded by the absolute value and
    normalized to a probability mass function over the Fourier grid; its cumulative
    sums are linearly interpolated between (0, 0) and (1, 1).
    """
    _check_order(n_densities, degree)
    if pgram.nu < 2:
        raise KnotError(f"Quantile knots need at least 2 periodogram ordinates, got {pgram.nu}")
    if np.any(pgram.ordinates < 0):
        raise InputDomainError("Periodogram ordinates must be non-negative")

    n_internal = n_densities - degree + 1
    x = np.sqrt(pgram.ordinates)
    sx = x.std(ddof=1)
    if not sx > 1e-14 * max(1.0, abs(x.mean())):
        _LOG.warning("Flat periodogram, falling back to %d equidistant knots", n_internal)
        return equidistant_knots(n_densities, degree)

    y = np.abs((x - x.mean()) / sx)
    z = y / y.sum()
    grid = np.concatenate([[0.0], pgram.omega, [1.0]])
    cdf = np.concatenate([[0.0], np.cumsum(z), [1.0]])
    cdf = np.minimum(np.maximum.accumulate(cdf), 1.0)

    q = np.linspace(0.0, 1.0, n_internal)
    knots = np.empty(n_internal)
    knots[0], knots[-1] = 0.0, 1.0
    for j in range(1, n_internal - 1):
        knots[j] = _inverse_cdf(grid, cdf, q[j])

    spaced = _enforce_gap(knots)
    if not np.array_equal(spaced, knots):
        _LOG.debug("Separated coincident quantile knots by %.1e", KNOT_MIN_GAP)
    return KnotVector.from_internal(spaced, degree)


def _as_grid(omega: float | np.ndarray) -> np.ndarray:
    x = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(x < 0.0) or np.any(x > 1.0) or np.any(np.isnan(x)):
        raise InputDomainError("Evaluation points must lie in [0, 1]")
    return x


def basis_values(omega: float | np.ndarray, kv: KnotVector) -> np.ndarray:
    """Cox-de Boor recursion for all K basis functions; returns shape (len(omega), K)."""
    x = _as_grid(omega)
    xi = kv.xi
    r = kv.degree
    n_spans = xi.size - 1

    basis = ((xi[:-1] <= x[:, None]) & (x[:, None] < xi[1:])).astype(float)
    # Closed right end: omega = 1 belongs to the last non-empty span.
    last = int(np.nonzero(xi[:-1] < xi[1:])[0][-1])
    basis[x == 1.0, :] = 0.0
    basis[x == 1.0, last] = 1.0

    for p in range(1, r + 1):
        count = n_spans - p
        left_den = xi[p:p + count] - xi[:count]
        right_den = xi[p + 1:p + 1 + count] - xi[1:1 + count]
        with np.errstate(divide="ignore", invalid="ignore"):
            left = np.where(left_den > 0, (x[:, None] - xi[:count]) / left_den, 0.0)
            right = np.where(
                right_den > 0, (xi[p + 1:p + 1 + count] - x[:, None]) / right_den, 0.0
            )
        basis = left * basis[:, :count] + right * basis[:, 1:count + 1]
    return basis


def bspline_basis(omega: float, kv: KnotVector) -> np.ndarray:
    return basis_values(omega, kv)[0]


def density_scale(kv: KnotVector) -> np.ndarray:
    """(r + 1) / (xi[k + r + 1] - xi[k]) for every density k."""
    r = kv.degree
    widths = kv.xi[r + 1:] - kv.xi[:kv.n_densities]
    if np.any(widths <= 0):
        raise KnotError("B-spline density with zero-width support")
    return (r + 1) / widths


def density_values(omega: float | np.ndarray, kv: KnotVector) -> np.ndarray:
    return basis_values(omega, kv) * density_scale(kv)


def bspline_density(omega: float, k: int, kv: KnotVector) -> float:
    """Density b_k(omega) = (r + 1) B_k(omega) / (xi[k + r + 1] - xi[k]), with 0-based k."""
    lo, hi = kv.support(k)
    if hi <= lo:
        raise KnotError(f"Density {k} has zero-width support at {lo}")
    value = basis_values(omega, kv)[0, k]
    return float((kv.degree + 1) * value / (hi - lo))


def basis_matrix(kv: KnotVector, pgram: Periodogram) -> BasisMatrix:
    grid = pgram.omega
    return BasisMatrix(values=density_values(grid, kv), grid=grid)
