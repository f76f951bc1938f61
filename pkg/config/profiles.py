"""
Parameter profiles: typical harvest rate, storage capacity and traffic load.

A profile can be derived from hardware figures: the energy one event report
costs defines the energy packet, the storage and harvester sizes are then
expressed in packets and packets per second.
"""

import math
from dataclasses import dataclass

from config.settings import PROFILES
from models.allocation import ResourceBudget
from models.errors import ConfigError


@dataclass(frozen=True)
class TypicalParameters:
    """Per-sensor typical values of one profile."""

    mu: float                  # energy packets per second
    cap: float                 # energy packets
    load: float                # network-wide report rate, split evenly over V nodes
    channel_loss: float = 0.0

    @property
    def budget(self):
        return ResourceBudget(self.mu, self.cap)


def report_energy(active_time_s, active_power_w):
    """Energy in joules to process and send one event report."""
    return active_time_s * active_power_w


def derive_parameters(report_energy_j, storage_wh, harvest_power_w, load_factor=2.0, channel_loss=0.0):
    """
    Typical parameters from hardware figures.

    Args:
        report_energy_j: energy of one report, which is one energy packet
        storage_wh: storage size in watt-hours
        harvest_power_w: average harvested power in watts
        load_factor: network-wide report rate as a multiple of mu
        channel_loss: per-transmission loss probability

    Returns:
        TypicalParameters
    """
    if report_energy_j <= 0:
        raise ConfigError("report energy must be positive")
    cap = float(math.floor(storage_wh * 3600.0 / report_energy_j))
    mu = harvest_power_w / report_energy_j
    return TypicalParameters(mu=mu, cap=max(cap, 1.0), load=load_factor * mu, channel_loss=channel_loss)


def profile_parameters(name):
    """
    Look up a named profile from settings.PROFILES.

    A profile either lists mu, cap and load directly or gives hardware
    figures, with the report energy stated or measured as active time and power.

    Raises:
        ConfigError: unknown profile name
    """
    try:
        values = dict(PROFILES[name])
    except KeyError:
        known = ", ".join(sorted(PROFILES))
        raise ConfigError(f"unknown profile '{name}' (known: {known})") from None
    if 'active_time_s' in values:
        values['report_energy_j'] = report_energy(values.pop('active_time_s'), values.pop('active_power_w'))
    if 'report_energy_j' in values:
        return derive_parameters(**values)
    return TypicalParameters(**values)
