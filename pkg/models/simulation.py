"""
Simulation settings and outcome records.
"""

from dataclasses import dataclass, asdict
from typing import Optional, Tuple

from config import settings
from models.errors import DomainError


@dataclass(frozen=True)
class SimConfig:
    """
    Horizon and seed of one simulation run.

    warmup_events defaults to SIM_WARMUP_FRACTION of min_generated_events.
    """

    min_generated_events: int = settings.SIM_MIN_EVENTS
    warmup_events: Optional[int] = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.min_generated_events < 1:
            raise DomainError(f"min_generated_events must be at least 1, got {self.min_generated_events}")
        if self.warmup_events is None:
            warmup = int(settings.SIM_WARMUP_FRACTION * self.min_generated_events)
            object.__setattr__(self, 'warmup_events', warmup)
        elif self.warmup_events < 0:
            raise DomainError(f"warmup_events must be non-negative, got {self.warmup_events}")


@dataclass(frozen=True)
class SimOutcome:
    """Counted reports of one run and the empirical loss probability."""

    generated: int
    delivered: int
    lost_energy: Tuple[int, ...]
    lost_channel: int
    empirical_loss: float
    ci_halfwidth: float

    @property
    def total_lost(self):
        return sum(self.lost_energy) + self.lost_channel

    def agrees_with(self, analytic_loss,
                    ci_factor=settings.AGREEMENT_CI_FACTOR,
                    relative_slack=settings.AGREEMENT_RELATIVE_SLACK):
        """True when the analytic loss lies inside the acceptance band."""
        tolerance = max(ci_factor * self.ci_halfwidth, relative_slack * analytic_loss)
        return abs(self.empirical_loss - analytic_loss) <= tolerance

    def to_dict(self):
        record = asdict(self)
        record['lost_energy'] = list(self.lost_energy)
        return record
