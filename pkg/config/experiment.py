"""
Experiment configuration for sweeps and validation batches.

Loaded from a TOML or JSON file (chosen by suffix) and overridden by
command-line flags. An optional [optimizer] table feeds OptimizerConfig.
"""

import json
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # Python 3.10: same API from the upstream backport
    import tomli as tomllib
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from config import settings
from config.profiles import profile_parameters
from models.allocation import OptimizerConfig
from models.errors import ConfigError, DomainError

_DEFAULT_PARAMETERS = profile_parameters(settings.DEFAULT_PROFILE)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs, with defaults from settings."""

    topology_file: Optional[str] = None
    node_count: int = settings.DEFAULT_NODE_COUNT
    disk_radius: float = settings.DISK_RADIUS
    connectivity_radius: float = settings.CONNECTIVITY_RADIUS
    networks: int = settings.SWEEP_NETWORKS
    budget_mode: str = 'grid'
    mu_grid: Tuple[float, ...] = (_DEFAULT_PARAMETERS.mu,)
    cap_grid: Tuple[float, ...] = (_DEFAULT_PARAMETERS.cap,)
    budget_samples: int = 1
    schemes: Tuple[str, ...] = settings.SCHEMES
    profile: str = settings.DEFAULT_PROFILE
    channel_loss: Optional[float] = None
    load: Optional[float] = None
    seed: int = settings.DEFAULT_SEED
    output_dir: str = 'results'
    simulate: bool = False
    sim_events: int = settings.SIM_MIN_EVENTS
    workers: int = settings.SWEEP_WORKERS
    node_range: Tuple[int, int] = settings.VALIDATION_NODE_RANGE
    jitter: float = settings.JITTER_SPREAD
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        for name in ('mu_grid', 'cap_grid', 'schemes', 'node_range'):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        self.check()

    def check(self):
        if self.budget_mode not in ('grid', 'random'):
            raise ConfigError(f"budget_mode must be 'grid' or 'random', got {self.budget_mode!r}")
        if self.budget_mode == 'grid' and (not self.mu_grid or not self.cap_grid):
            raise ConfigError("mu_grid and cap_grid must not be empty")
        low, high = settings.MU_RANGE
        for mu in self.mu_grid:
            if not low <= mu <= high:
                raise ConfigError(f"mu {mu} outside [{low}, {high}]")
        low, high = settings.CAP_RANGE
        for cap in self.cap_grid:
            if not low <= cap <= high:
                raise ConfigError(f"N {cap} outside [{low}, {high}]")
        unknown = set(self.schemes) - set(settings.SCHEMES)
        if unknown or not self.schemes:
            raise ConfigError(f"schemes must be a non-empty subset of {settings.SCHEMES}")
        if self.node_count < 2:
            raise ConfigError("node_count must be at least 2")
        if self.networks < 1 or self.budget_samples < 1 or self.workers < 1 or self.sim_events < 1:
            raise ConfigError("networks, budget_samples, workers and sim_events must be positive")
        if self.channel_loss is not None and not 0 <= self.channel_loss < 1:
            raise ConfigError("channel_loss must be in [0, 1)")
        if self.load is not None and self.load < 0:
            raise ConfigError("load must be non-negative")
        low, high = self.node_range
        if not 2 <= low <= high:
            raise ConfigError(f"node_range must satisfy 2 <= low <= high, got {self.node_range}")
        if not 0 <= self.jitter < 1:
            raise ConfigError("jitter must be in [0, 1)")

    def budgets(self, rng):
        """
        Budget points for one network.

        Grid mode gives the cartesian product of the grids; random mode draws
        budget_samples points log-uniformly over the admissible ranges.

        Returns:
            list: (mu_avg, cap_avg) pairs
        """
        if self.budget_mode == 'grid':
            return [(mu, cap) for mu in self.mu_grid for cap in self.cap_grid]
        log_mu = rng.uniform(*np.log10(settings.MU_RANGE), size=self.budget_samples)
        log_cap = rng.uniform(*np.log10(settings.CAP_RANGE), size=self.budget_samples)
        return list(zip((10.0 ** log_mu).tolist(), (10.0 ** log_cap).tolist()))

    def with_overrides(self, **changes):
        """Copy with every non-None keyword applied."""
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes) if changes else self


def from_mapping(mapping):
    """
    Build an ExperimentConfig from a parsed TOML/JSON document.

    Raises:
        ConfigError: unknown keys or invalid values
    """
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(mapping) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    values = dict(mapping)
    optimizer = values.pop('optimizer', None)
    try:
        if optimizer is not None:
            if not isinstance(optimizer, dict):
                raise ConfigError("[optimizer] must be a table")
            optimizer = dict(optimizer)
            optimizer.setdefault('seed', values.get('seed', settings.DEFAULT_SEED))
            values['optimizer'] = OptimizerConfig(**optimizer)
        return ExperimentConfig(**values)
    except (TypeError, ValueError, DomainError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_experiment(path):
    """
    Read an experiment configuration file (.toml or .json).

    Raises:
        ConfigError: unreadable file, unsupported suffix or invalid content
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        if path.suffix == '.toml':
            mapping = tomllib.loads(text)
        elif path.suffix == '.json':
            mapping = json.loads(text)
        else:
            raise ConfigError(f"unsupported config format '{path.suffix}' (use .toml or .json)")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path}: expected a table at the top level")
    return from_mapping(mapping)
