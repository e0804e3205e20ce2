"""
Configuration records and the flat key = value config file format.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from pspline_psd.const import (
    AR_MODELS,
    BENCH_REPLICATIONS,
    CHAIN_PRESETS,
    DEFAULT_ALPHA_DELTA,
    DEFAULT_ALPHA_PHI,
    DEFAULT_ALPHA_TAU,
    DEFAULT_BAND_ALPHA,
    DEFAULT_BETA_DELTA,
    DEFAULT_BETA_PHI,
    DEFAULT_BETA_TAU,
    DEFAULT_DEGREE,
    DEFAULT_EPSILON,
    DEFAULT_PENALTY_ORDER,
    DEFAULT_SEED,
    KNOT_SCHEMES,
    PENALTY_KINDS,
    TARGET_ACCEPT_HIGH,
    TARGET_ACCEPT_LOW,
)
from pspline_psd.errors import ConfigError

_LOG = logging.getLogger(__name__)


@dataclass
class PriorConfig:
    alpha_phi: float = DEFAULT_ALPHA_PHI
    beta_phi: float = DEFAULT_BETA_PHI
    alpha_delta: float = DEFAULT_ALPHA_DELTA
    beta_delta: float = DEFAULT_BETA_DELTA
    alpha_tau: float = DEFAULT_ALPHA_TAU
    beta_tau: float = DEFAULT_BETA_TAU
    d: int = DEFAULT_PENALTY_ORDER
    epsilon: float = DEFAULT_EPSILON

    def validate(self) -> None:
        for name in ("alpha_phi", "beta_phi", "alpha_delta", "beta_delta", "alpha_tau", "beta_tau", "epsilon"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.d < 1:
            raise ConfigError(f"Penalty order d must be at least 1, got {self.d}")


@dataclass
class ChainConfig:
    iterations: int = 20000
    burnin: int = 5000
    thin: int = 10
    pilot_iterations: int = 5000
    pilot_burnin: int = 1000
    pilot_thin: int = 5
    seed: int = DEFAULT_SEED
    target_accept_low: float = TARGET_ACCEPT_LOW
    target_accept_high: float = TARGET_ACCEPT_HIGH

    @classmethod
    def preset(cls, name: str, **overrides: Any) -> ChainConfig:
        if name not in CHAIN_PRESETS:
            raise ConfigError(f"Unknown chain preset '{name}', choose from {sorted(CHAIN_PRESETS)}")
        return cls(**{**CHAIN_PRESETS[name], **overrides})

    @property
    def retained(self) -> int:
        return (self.iterations - self.burnin) // self.thin

    @property
    def pilot_retained(self) -> int:
        return (self.pilot_iterations - self.pilot_burnin) // self.pilot_thin

    def validate(self) -> None:
        for name in ("iterations", "thin", "pilot_iterations", "pilot_thin"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer, got {getattr(self, name)}")
        if not 0 <= self.burnin < self.iterations:
            raise ConfigError(f"burnin ({self.burnin}) must be below iterations ({self.iterations})")
        if not 0 <= self.pilot_burnin < self.pilot_iterations:
            raise ConfigError(
                f"pilot_burnin ({self.pilot_burnin}) must be below pilot_iterations ({self.pilot_iterations})"
            )
        if not 0 < self.target_accept_low < self.target_accept_high < 1:
            raise ConfigError("Acceptance targets must satisfy 0 < low < high < 1")


@dataclass
class RunConfig:
    subcommand: str = "estimate"
    input: str | None = None
    output: str | None = None
    column: str | None = None
    knot_scheme: str = "qspaced"
    penalty: str = "auto"
    K: int | None = None
    d: int = DEFAULT_PENALTY_ORDER
    r: int = DEFAULT_DEGREE
    apply_sqrt: bool = False
    alpha: float = DEFAULT_BAND_ALPHA
    seed: int = DEFAULT_SEED
    knots: str | None = None
    trace: bool = False
    log_scale: bool = False
    penalty_csv: str | None = None
    chain: ChainConfig = field(default_factory=ChainConfig)
    prior: PriorConfig = field(default_factory=PriorConfig)

    def validate(self) -> None:
        if self.knot_scheme not in KNOT_SCHEMES:
            raise ConfigError(f"Unknown knot scheme '{self.knot_scheme}', choose from {KNOT_SCHEMES}")
        if self.penalty not in PENALTY_KINDS:
            raise ConfigError(f"Unknown penalty '{self.penalty}', choose from {PENALTY_KINDS}")
        if self.r < 1:
            raise ConfigError(f"Degree r must be at least 1, got {self.r}")
        if self.d > self.r:
            raise ConfigError(f"Penalty order d={self.d} exceeds degree r={self.r}")
        if self.K is not None and self.K < self.r + 1:
            raise ConfigError(f"K={self.K} must be at least r + 1 = {self.r + 1}")
        if not 0 <= self.alpha < 1:
            raise ConfigError(f"Band level alpha must lie in [0, 1), got {self.alpha}")
        self.prior.d = self.d
        self.chain.seed = self.seed
        self.prior.validate()
        self.chain.validate()


@dataclass
class BenchmarkConfig:
    models: list[str] = field(default_factory=lambda: ["ar1", "ar4"])
    lengths: list[int] = field(default_factory=lambda: [128, 256, 512])
    replications: int = BENCH_REPLICATIONS
    schemes: list[str] = field(default_factory=lambda: list(KNOT_SCHEMES))
    orders: list[int] = field(default_factory=lambda: [1, 2])
    alpha: float = DEFAULT_BAND_ALPHA
    base_seed: int = DEFAULT_SEED
    output: str | None = None
    jobs: int = 1
    chain: ChainConfig = field(default_factory=lambda: ChainConfig.preset("desk"))
    prior: PriorConfig = field(default_factory=PriorConfig)

    def validate(self) -> None:
        if self.replications < 1:
            raise ConfigError(f"replications must be at least 1, got {self.replications}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {self.jobs}")
        for name in self.models:
            if name not in AR_MODELS:
                raise ConfigError(f"Unknown model '{name}', choose from {sorted(AR_MODELS)}")
        for scheme in self.schemes:
            if scheme not in KNOT_SCHEMES:
                raise ConfigError(f"Unknown knot scheme '{scheme}'")
        for order in self.orders:
            if order not in (1, 2):
                raise ConfigError(f"Penalty order must be 1 or 2, got {order}")
        for n in self.lengths:
            if n < 8:
                raise ConfigError(f"Series length must be at least 8, got {n}")
        self.prior.validate()
        self.chain.validate()


_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat `key = value` file; `#` starts a comment."""
    entries: dict[str, str] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as err:
        raise ConfigError(f"Cannot read config file {path}: {err}") from err

    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        entries[key.replace("-", "_")] = value
    return entries


def _coerce(raw: str, template: Any, key: str) -> Any:
    try:
        if isinstance(template, bool):
            lowered = raw.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(raw)
        if isinstance(template, int):
            return int(raw)
        if isinstance(template, float):
            return float(raw)
        if isinstance(template, list):
            items = [item.strip() for item in raw.split(",") if item.strip()]
            if template and isinstance(template[0], int):
                return [int(item) for item in items]
            return items
    except ValueError as err:
        raise ConfigError(f"Invalid value for {key}: '{raw}'") from err
    return raw


def _int_or_none(raw: str, key: str) -> int | None:
    if raw.lower() in ("", "none", "auto"):
        return None
    try:
        return int(raw)
    except ValueError as err:
        raise ConfigError(f"Invalid value for {key}: '{raw}'") from err


def apply_entries(target: RunConfig | BenchmarkConfig, entries: dict[str, str]) -> None:
    """Apply parsed key/value pairs onto a config record and its nested chain / prior records."""
    entries = dict(entries)
    preset = entries.pop("preset", None)
    if preset is not None:
        target.chain = ChainConfig.preset(preset, seed=target.chain.seed)

    top = {f.name for f in dataclasses.fields(target)} - {"chain", "prior"}
    chain_fields = {f.name for f in dataclasses.fields(ChainConfig)}
    prior_fields = {f.name for f in dataclasses.fields(PriorConfig)}

    for key, raw in entries.items():
        # Chain seeds are derived per replication; the only user seed a benchmark has is base_seed.
        if key == "seed" and isinstance(target, BenchmarkConfig):
            key = "base_seed"
        if key in top:
            current = getattr(target, key)
            if key == "K":
                value = _int_or_none(raw, key)
            elif current is None:
                value = raw
            else:
                value = _coerce(raw, current, key)
            setattr(target, key, value)
        elif key in chain_fields:
            setattr(target.chain, key, _coerce(raw, getattr(target.chain, key), key))
        elif key in prior_fields:
            setattr(target.prior, key, _coerce(raw, getattr(target.prior, key), key))
        else:
            raise ConfigError(f"Unknown configuration key '{key}'")
    _LOG.debug("Applied %d configuration entries", len(entries))


def load_benchmark_config(path: str | Path) -> BenchmarkConfig:
    cfg = BenchmarkConfig()
    apply_entries(cfg, read_config_file(path))
    cfg.validate()
    return cfg
