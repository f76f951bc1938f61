"""End-to-end checks on batches of random networks. Run with `pytest -m slow`."""

import numpy as np
import pytest

from config.experiment import ExperimentConfig
from models.allocation import HarvestingAllocation, ResourceBudget
from models.simulation import SimConfig
from models.topology import GenerationConfig, NetworkTopology
from src.allocation import almost_fair_allocation, solve_fair_ratio
from src.flow_analysis import solve_flow
from src.netgen import generate_network, uniform_rates, validate_topology
from src.simulator import simulate
from src.sweep import run_sweep, summarize_gaps
from src.validation import run_validation

pytestmark = pytest.mark.slow


def test_analysis_agrees_with_simulation():
    config = ExperimentConfig(networks=50, node_range=(10, 100), jitter=0.5, channel_loss=1e-5,
                              sim_events=1_000_000, seed=2024, workers=4)
    rows = run_validation(config)
    checked = [row for row in rows if row.status == 'ok' and row.analytic_PL >= 1e-3]
    assert all(row.agrees for row in checked)


def test_single_sensor_over_a_million_reports():
    topology = NetworkTopology(2, [[0.0, 0.0], [1.0, 0.0]], [1.0, 0.0])
    allocation = HarvestingAllocation([1.0], [1.0])
    assert solve_flow(topology, allocation).network_loss == 0.5
    outcome = simulate(topology, allocation, SimConfig(1_000_000, rng_seed=8))
    assert abs(outcome.empirical_loss - 0.5) <= 3 * outcome.ci_halfwidth


def test_scheme_ordering_and_gaps():
    # lossless links: any channel loss puts a common floor under all three schemes
    config = ExperimentConfig(networks=100, node_count=20, budget_mode='random', budget_samples=3,
                              channel_loss=0.0, seed=5, workers=4)
    rows = run_sweep(config)
    assert all(row.status == 'ok' for row in rows)

    by_instance = {}
    for row in rows:
        by_instance.setdefault((row.network_id, row.mu_avg, row.cap_avg), {})[row.scheme] = row.analytic_PL
    for losses in by_instance.values():
        assert losses['optimal'] <= losses['fair'] + 1e-12

    summary = summarize_gaps(rows)
    assert summary.fair_not_worse >= 0.95
    assert summary.instances > 0
    assert summary.uniform_gap >= 1.0
    assert summary.fair_gap <= 0.5


@pytest.mark.parametrize('seed', range(10))
def test_fair_allocation_on_random_networks(seed):
    topology = generate_network(GenerationConfig(20, rng_seed=seed), uniform_rates(20, 0.4652), 1e-5)
    assert validate_topology(topology) == []
    rng = np.random.default_rng(seed)
    budget = ResourceBudget(10 ** rng.uniform(-2, 1), 10 ** rng.uniform(0, 4))

    alpha, residual, equation = solve_fair_ratio(topology, budget)
    assert abs(residual) <= 1e-10 * equation.target
    allocation = almost_fair_allocation(topology, budget)
    assert allocation.mean_mu == pytest.approx(budget.mu_avg, rel=1e-8)
    losses = solve_flow(topology, allocation).node_loss[:topology.sink]
    assert losses.max() - losses.min() <= 1e-6
