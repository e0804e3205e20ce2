"""
Constants for P-spline spectral density estimation.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

MIN_SERIES_LENGTH = 8
MISSING_TOKENS = ("", "NA", "NaN", "nan")

DEFAULT_DEGREE = 3
MAX_DENSITIES = 40
KNOT_MIN_GAP = 1e-6

DEFAULT_PENALTY_ORDER = 1
DEFAULT_EPSILON = 1e-6

DEFAULT_ALPHA_PHI = 1.0
DEFAULT_BETA_PHI = 1.0
DEFAULT_ALPHA_DELTA = 1e-4
DEFAULT_BETA_DELTA = 1e-4
DEFAULT_ALPHA_TAU = 0.001
DEFAULT_BETA_TAU = 0.001

# Floor on periodogram support means when seeding the initial weights.
INIT_WEIGHT_FLOOR = 1e-10

TARGET_ACCEPT_LOW = 0.3
TARGET_ACCEPT_HIGH = 0.5
SIGMA_SHRINK = 0.9
SIGMA_GROW = 1.1
ADAPT_WINDOW = 50
INITIAL_SIGMA = 1.0

PILOT_EIGEN_FLOOR = 1e-10
# Relative floor used when the pilot covariance is rank deficient.
PILOT_RANK_FLOOR = 1e-6

DEFAULT_BAND_ALPHA = 0.1
MIN_BAND_DRAWS = 100
MIN_GEWEKE_SEGMENT = 4
IAE_GRID_SIZE = 512

DEFAULT_SEED = 2024

CHAIN_PRESETS = {
    "simulation": {
        "pilot_iterations": 20000, "pilot_burnin": 5000, "pilot_thin": 10,
        "iterations": 80000, "burnin": 5000, "thin": 10,
    },
    "sunspot": {
        "pilot_iterations": 25000, "pilot_burnin": 10000, "pilot_thin": 10,
        "iterations": 75000, "burnin": 25000, "thin": 10,
    },
    "carinae": {
        "pilot_iterations": 5000, "pilot_burnin": 1000, "pilot_thin": 10,
        "iterations": 10000, "burnin": 2000, "thin": 10,
    },
    "desk": {
        "pilot_iterations": 5000, "pilot_burnin": 1000, "pilot_thin": 5,
        "iterations": 20000, "burnin": 5000, "thin": 10,
    },
}

AR_MODELS = {
    "ar1": (0.9,),
    "ar4": (0.9, -0.9, 0.9, -0.9),
}
AR_BURNIN_PER_LAG = 10
AR_BURNIN_BASE = 100

BENCH_REPLICATIONS = 50
BENCH_COLUMNS = [
    "model", "n", "scheme", "d", "median_iae", "uniform_coverage",
    "median_pointwise_coverage", "median_runtime_seconds", "replications",
]

KNOT_SCHEMES = ("equidistant", "qspaced")
PENALTY_KINDS = ("auto", "difference", "derivative")

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)-25s | %(message)s"
LOG_LEVEL_ENV = "PSPLINE_PSD_LOG_LEVEL"
