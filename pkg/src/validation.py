"""
Analytic-vs-simulated loss on random networks with jittered parameters.

Every network draws its size uniformly from the configured node range, and
every sensor draws its report rate, harvest rate and capacity as the profile's
typical value times an independent U[1 - jitter, 1 + jitter] factor.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from functools import partial
from typing import Optional

import numpy as np

from config.profiles import profile_parameters
from models.allocation import HarvestingAllocation
from models.errors import HarvestNetError
from models.simulation import SimConfig
from models.topology import GenerationConfig
from src.flow_analysis import solve_flow
from src.netgen import generate_network
from src.simulator import simulate
from utils.seeding import derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ValidationRow:
    network_id: int
    node_count: int
    analytic_PL: Optional[float] = None
    sim_PL: Optional[float] = None
    sim_ci: Optional[float] = None
    agrees: Optional[bool] = None
    status: str = 'ok'

    def to_dict(self):
        return asdict(self)


def jitter_parameters(node_count, params, rng, spread):
    """
    Per-sensor parameters scattered around the typical values.

    Returns:
        tuple: (generation rates of length V, HarvestingAllocation)
    """
    sensors = node_count - 1

    def factors():
        return rng.uniform(1.0 - spread, 1.0 + spread, size=sensors)

    rates = np.zeros(node_count)
    rates[:sensors] = params.load / node_count * factors()
    mu = params.mu * factors()
    cap = np.maximum(1.0, np.rint(params.cap * factors()))
    return rates, HarvestingAllocation(mu, cap, 'jittered')


def validate_network(config, index):
    """Build, analyse and simulate network `index` of the batch."""
    rng = np.random.default_rng(derive_seed(config.seed, index))
    low, high = config.node_range
    node_count = int(rng.integers(low, high + 1))
    params = profile_parameters(config.profile)
    channel_loss = params.channel_loss if config.channel_loss is None else config.channel_loss
    try:
        rates, allocation = jitter_parameters(node_count, params, rng, config.jitter)
        generation = GenerationConfig(node_count, config.disk_radius, config.connectivity_radius,
                                      rng_seed=derive_seed(config.seed, index, 1))
        topology = generate_network(generation, rates, channel_loss)
        analytic = solve_flow(topology, allocation).network_loss
        outcome = simulate(topology, allocation,
                           SimConfig(config.sim_events, rng_seed=derive_seed(config.seed, index, 2)))
    except HarvestNetError as exc:
        logger.warning("validation network %d failed: %s", index, exc)
        return ValidationRow(index, node_count, status=f"failed: {type(exc).__name__}")
    return ValidationRow(index, node_count, analytic, outcome.empirical_loss,
                         outcome.ci_halfwidth, outcome.agrees_with(analytic))


def run_validation(config, writer=None, progress=None):
    """
    Validate config.networks random networks.

    Returns:
        list: ValidationRow records in network order
    """
    task = partial(validate_network, config)
    indices = range(config.networks)
    if config.workers == 1:
        return _collect(map(task, indices), writer, progress)
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return _collect(pool.map(task, indices), writer, progress)


def _collect(results, writer, progress):
    rows = []
    for row in results:
        if writer is not None:
            writer.write([row.to_dict()])
        if progress is not None:
            progress(row)
        rows.append(row)
    return rows
