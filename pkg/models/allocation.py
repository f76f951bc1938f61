"""
Harvesting resource data model: budgets, per-sensor allocations, optimizer knobs.
"""

from dataclasses import dataclass

import numpy as np

from config import settings
from models.errors import DomainError, InvalidCapacity


@dataclass(frozen=True)
class ResourceBudget:
    """
    Per-sensor averages of harvest rate and storage capacity.

    The totals available to the network are mu_avg * (V-1) and cap_avg * (V-1).
    """

    mu_avg: float
    cap_avg: float

    def __post_init__(self):
        if not np.isfinite(self.mu_avg) or self.mu_avg <= 0:
            raise DomainError(f"mu_avg must be positive, got {self.mu_avg}")
        if not np.isfinite(self.cap_avg) or self.cap_avg < 1:
            raise DomainError(f"cap_avg must be at least 1, got {self.cap_avg}")


@dataclass(frozen=True, eq=False)
class HarvestingAllocation:
    """
    Harvest rate and storage capacity of every sensor (the sink has none).

    Capacities are real-valued; the simulator rounds them.
    `scheme` records which allocation scheme produced the values.
    """

    mu: np.ndarray
    cap: np.ndarray
    scheme: str = 'custom'

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float, ndmin=1)
        cap = np.array(self.cap, dtype=float, ndmin=1)
        if mu.shape != cap.shape or mu.ndim != 1:
            raise DomainError(f"mu and cap must be vectors of equal length, got {mu.shape} and {cap.shape}")
        if not np.all(np.isfinite(mu)) or np.any(mu < 0):
            raise DomainError("harvest rates must be finite and non-negative")
        if not np.all(np.isfinite(cap)) or np.any(cap < 1):
            raise InvalidCapacity("capacities must be finite and at least one packet")
        mu.setflags(write=False)
        cap.setflags(write=False)
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'cap', cap)

    @property
    def sensor_count(self):
        return len(self.mu)

    @property
    def mean_mu(self):
        return float(self.mu.mean())

    @property
    def mean_cap(self):
        return float(self.cap.mean())

    def rounded_capacities(self):
        """Capacities rounded to whole energy packets."""
        return np.rint(self.cap).astype(np.int64)

    def satisfies(self, budget, rel_tol=1e-8):
        """Check the two budget constraints (average mu and average N)."""
        return (abs(self.mean_mu - budget.mu_avg) <= rel_tol * budget.mu_avg
                and abs(self.mean_cap - budget.cap_avg) <= rel_tol * budget.cap_avg)

    def __eq__(self, other):
        if not isinstance(other, HarvestingAllocation):
            return NotImplemented
        return (self.scheme == other.scheme
                and np.array_equal(self.mu, other.mu)
                and np.array_equal(self.cap, other.cap))

    __hash__ = None


@dataclass(frozen=True)
class OptimizerConfig:
    """Simulated annealing settings for the optimal allocation."""

    seed: int = 0
    iterations: int = settings.ANNEAL_ITERATIONS
    cooling: float = settings.ANNEAL_COOLING
    initial_temperature: float = settings.ANNEAL_INITIAL_TEMPERATURE
    greedy_fraction: float = settings.ANNEAL_GREEDY_FRACTION
    mu_step: float = settings.ANNEAL_MU_STEP
    cap_step: float = settings.ANNEAL_CAP_STEP
    mu_floor: float = settings.ANNEAL_MU_FLOOR
    restarts: int = settings.ANNEAL_RESTARTS

    def __post_init__(self):
        if self.iterations < 0:
            raise DomainError(f"iterations must be non-negative, got {self.iterations}")
        if not 0 < self.cooling <= 1:
            raise DomainError(f"cooling must be in (0, 1], got {self.cooling}")
        if self.initial_temperature < 0:
            raise DomainError("initial_temperature must be non-negative")
        if not 0 <= self.greedy_fraction <= 1:
            raise DomainError("greedy_fraction must be in [0, 1]")
        if self.mu_step <= 0 or self.cap_step < 0:
            raise DomainError("step scales must be positive")
        if not 0 < self.mu_floor < 1:
            raise DomainError("mu_floor must be in (0, 1)")
        if self.restarts < 1:
            raise DomainError("restarts must be at least 1")
