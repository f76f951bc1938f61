"""
Scheme comparison sweeps over random networks and budget points.

One task per network: every budget point and scheme of that network is
evaluated in the same worker. Tasks fan out over a process pool and their
rows come back in network order to a single writer.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict, replace
from functools import partial
from typing import Optional

import numpy as np

from config.profiles import profile_parameters
from models.allocation import ResourceBudget
from models.errors import HarvestNetError
from models.simulation import SimConfig
from models.topology import GenerationConfig
from src.allocation import almost_fair_allocation, optimal_allocation, uniform_allocation
from src.flow_analysis import solve_flow
from src.netgen import generate_network, uniform_rates
from src.simulator import simulate
from utils.seeding import derive_seed
from utils.serialization import load_topology, read_bytes

logger = logging.getLogger(__name__)

# P_L window used when comparing schemes on a log scale
GAP_WINDOW = (1e-12, 0.5)
# absolute slack when ordering two analytic losses
ORDER_SLACK = 1e-12


@dataclass(frozen=True)
class SweepRow:
    network_id: int
    scheme: str
    mu_avg: float
    cap_avg: float
    analytic_PL: Optional[float] = None
    sim_PL: Optional[float] = None
    sim_ci: Optional[float] = None
    status: str = 'ok'

    def to_dict(self):
        return asdict(self)


def allocate(scheme, topology, budget, optimizer):
    """Run one allocation scheme by name ('uniform', 'fair' or 'optimal')."""
    if scheme == 'uniform':
        return uniform_allocation(topology.node_count, budget)
    if scheme == 'fair':
        return almost_fair_allocation(topology, budget)
    if scheme == 'optimal':
        return optimal_allocation(topology, budget, optimizer)
    raise ValueError(f"unknown scheme {scheme!r}")


def build_network(config, index):
    """
    The topology of network `index`: the configured file, or a fresh deployment
    seeded from (seed, index).
    """
    params = profile_parameters(config.profile)
    if config.topology_file:
        topology = load_topology(read_bytes(config.topology_file))
        if config.channel_loss is not None:
            topology = topology.with_channel_loss(config.channel_loss)
        return topology
    channel_loss = params.channel_loss if config.channel_loss is None else config.channel_loss
    load = params.load if config.load is None else config.load
    generation = GenerationConfig(config.node_count, config.disk_radius, config.connectivity_radius,
                                  rng_seed=derive_seed(config.seed, index))
    return generate_network(generation, uniform_rates(config.node_count, load), channel_loss)


def evaluate_network(config, index):
    """
    All rows of one network. Failures are recorded in the row status and the
    remaining points still run.

    Returns:
        list: SweepRow records
    """
    budgets = config.budgets(np.random.default_rng([config.seed, index, 1]))
    try:
        topology = build_network(config, index)
    except HarvestNetError as exc:
        logger.warning("network %d could not be built: %s", index, exc)
        return [SweepRow(index, scheme, mu, cap, status=f"failed: {type(exc).__name__}")
                for mu, cap in budgets for scheme in config.schemes]

    optimizer = replace(config.optimizer, seed=derive_seed(config.seed, index, 2))
    rows = []
    for point, (mu, cap) in enumerate(budgets):
        budget = ResourceBudget(mu, cap)
        for scheme in config.schemes:
            try:
                allocation = allocate(scheme, topology, budget, optimizer)
                flow = solve_flow(topology, allocation)
                row = SweepRow(index, scheme, mu, cap, flow.network_loss)
                if config.simulate:
                    sim_config = SimConfig(config.sim_events,
                                           rng_seed=derive_seed(config.seed, index, 3, point))
                    outcome = simulate(topology, allocation, sim_config)
                    row = replace(row, sim_PL=outcome.empirical_loss, sim_ci=outcome.ci_halfwidth)
            except HarvestNetError as exc:
                logger.warning("network %d, %s at mu=%g N=%g failed: %s", index, scheme, mu, cap, exc)
                row = SweepRow(index, scheme, mu, cap, status=f"failed: {type(exc).__name__}")
            rows.append(row)
    return rows


def run_sweep(config, writer=None, progress=None):
    """
    Evaluate every network of the experiment.

    Args:
        config: ExperimentConfig
        writer: optional sink with a write(list of dicts) method
        progress: optional callback(network_index, rows)

    Returns:
        list: all SweepRow records, in network order
    """
    networks = 1 if config.topology_file else config.networks
    task = partial(evaluate_network, config)
    if config.workers == 1:
        return _collect(map(task, range(networks)), writer, progress)
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return _collect(pool.map(task, range(networks)), writer, progress)


def _collect(results, writer, progress):
    collected = []
    for index, rows in enumerate(results):
        if writer is not None:
            writer.write([row.to_dict() for row in rows])
        if progress is not None:
            progress(index, rows)
        collected.extend(rows)
    return collected


@dataclass(frozen=True)
class GapSummary:
    instances: int
    uniform_gap: Optional[float]      # median log10 P_L(uniform) - log10 P_L(optimal)
    fair_gap: Optional[float]         # median log10 P_L(fair) - log10 P_L(optimal)
    fair_not_worse: Optional[float]   # share of instances with P_L(fair) <= P_L(uniform)


def summarize_gaps(rows):
    """
    Compare schemes per (network, budget) instance.

    Gaps use instances where uniform, fair and optimal all succeeded with
    P_L inside GAP_WINDOW; the fair-vs-uniform ordering rate uses every
    instance where both succeeded.
    """
    instances = {}
    for row in rows:
        if row.status == 'ok':
            instances.setdefault((row.network_id, row.mu_avg, row.cap_avg), {})[row.scheme] = row.analytic_PL

    low, high = GAP_WINDOW
    uniform_gaps, fair_gaps, ordered = [], [], []
    for losses in instances.values():
        if 'fair' in losses and 'uniform' in losses:
            ordered.append(losses['fair'] <= losses['uniform'] + ORDER_SLACK)
        if not {'uniform', 'fair', 'optimal'} <= set(losses):
            continue
        if all(low < losses[s] < high for s in ('uniform', 'fair', 'optimal')):
            optimum = math.log10(losses['optimal'])
            uniform_gaps.append(math.log10(losses['uniform']) - optimum)
            fair_gaps.append(math.log10(losses['fair']) - optimum)

    return GapSummary(
        instances=len(uniform_gaps),
        uniform_gap=float(np.median(uniform_gaps)) if uniform_gaps else None,
        fair_gap=float(np.median(fair_gaps)) if fair_gaps else None,
        fair_not_worse=float(np.mean(ordered)) if ordered else None,
    )
