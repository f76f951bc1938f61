import numpy as np
import pytest

from models.allocation import HarvestingAllocation
from models.errors import NoTraffic
from models.simulation import SimConfig
from models.topology import NetworkTopology
from src.flow_analysis import solve_flow
from src.simulator import NetworkSimulation, SensorNode, simulate


def single_sensor(rate=1.0, channel_loss=0.0):
    return NetworkTopology(2, [[0.0, 0.0], [1.0, 0.0]], [rate, 0.0], channel_loss)


def chain(rates, channel_loss=0.0):
    routing = np.zeros((3, 3))
    routing[1, 0] = 1.0
    routing[2, 1] = 1.0
    return NetworkTopology(3, routing, rates, channel_loss)


def test_counts_are_conserved():
    topology = chain((0.5, 0.5, 0.0), channel_loss=0.05)
    allocation = HarvestingAllocation([0.6, 1.0], [3.0, 3.0])
    outcome = simulate(topology, allocation, SimConfig(20_000, rng_seed=4))
    assert outcome.generated == 20_000
    assert outcome.generated == outcome.delivered + sum(outcome.lost_energy) + outcome.lost_channel
    assert outcome.total_lost == outcome.generated - outcome.delivered
    assert outcome.lost_channel > 0
    assert all(lost > 0 for lost in outcome.lost_energy)


def test_same_seed_same_outcome():
    topology = chain((0.5, 0.5, 0.0), channel_loss=0.01)
    allocation = HarvestingAllocation([0.6, 1.0], [3.0, 3.0])
    first = simulate(topology, allocation, SimConfig(10_000, rng_seed=9))
    second = simulate(topology, allocation, SimConfig(10_000, rng_seed=9))
    assert first == second
    other = simulate(topology, allocation, SimConfig(10_000, rng_seed=10))
    assert other != first


def test_plentiful_energy_loses_nothing():
    outcome = simulate(chain((0.5, 0.5, 0.0)), HarvestingAllocation([1e6, 1e6], [10.0, 10.0]),
                       SimConfig(10_000, rng_seed=1))
    assert outcome.empirical_loss == 0.0
    assert outcome.ci_halfwidth == 0.0
    assert outcome.delivered == 10_000


def test_single_sensor_at_unit_ratio():
    outcome = simulate(single_sensor(), HarvestingAllocation([1.0], [1.0]), SimConfig(200_000, rng_seed=2))
    assert abs(outcome.empirical_loss - 0.5) <= 3 * outcome.ci_halfwidth
    assert outcome.agrees_with(0.5)


# unit report rate, so mu is the queue ratio
@pytest.mark.parametrize('mu, cap', [(0.5, 1.0), (1.0, 1.0), (2.0, 1.0), (0.5, 5.0)])
def test_isolated_queue_matches_analysis(mu, cap):
    topology = single_sensor()
    allocation = HarvestingAllocation([mu], [cap])
    analytic = solve_flow(topology, allocation).network_loss
    outcome = simulate(topology, allocation, SimConfig(100_000, rng_seed=5))
    assert outcome.agrees_with(analytic)


# (1, 20) mixes too slowly and (2, 20) loses too rarely for a binomial interval
@pytest.mark.slow
@pytest.mark.parametrize('mu, cap', [(0.5, 5.0), (1.0, 5.0), (2.0, 5.0), (0.5, 20.0)])
def test_isolated_queue_over_a_million_reports(mu, cap):
    topology = single_sensor()
    allocation = HarvestingAllocation([mu], [cap])
    analytic = solve_flow(topology, allocation).network_loss
    outcome = simulate(topology, allocation, SimConfig(1_000_000, rng_seed=5))
    assert outcome.agrees_with(analytic)


def test_warmup_reports_are_not_counted():
    simulation = NetworkSimulation(single_sensor(), HarvestingAllocation([1.0], [2.0]),
                                   SimConfig(1_000, warmup_events=500, rng_seed=0))
    outcome = simulation.run()
    assert outcome.generated == 1_000
    assert simulation.issued == 1_500


def test_default_warmup_is_a_tenth():
    assert SimConfig(1_000).warmup_events == 100
    assert SimConfig(1_000, warmup_events=0).warmup_events == 0


def test_no_traffic_is_rejected():
    with pytest.raises(NoTraffic):
        simulate(chain((0.0, 0.0, 0.0)), HarvestingAllocation([1.0, 1.0], [2.0, 2.0]), SimConfig(10))


def test_sensor_store_is_capped_and_spent():
    rng = np.random.default_rng(0)
    node = SensorNode(0, harvest_rate=100.0, capacity=3, next_hops=[(1, 1.0)])
    assert node.level == 3
    assert node.consume(0.0, rng)
    assert node.consume(0.0, rng)
    assert node.consume(0.0, rng)
    assert not node.consume(0.0, rng)
    node.harvest(10.0, rng)
    assert node.level == 3
    assert node.next_hop(rng) == 1


def test_fractional_next_hop_follows_fractions():
    rng = np.random.default_rng(0)
    node = SensorNode(0, 1.0, 1, next_hops=[(1, 0.25), (2, 0.75)])
    draws = [node.next_hop(rng) for _ in range(20_000)]
    assert draws.count(1) / len(draws) == pytest.approx(0.25, abs=0.02)


@pytest.mark.slow
def test_chain_matches_analysis():
    topology = chain((0.1, 1.0, 0.0), channel_loss=1e-3)
    allocation = HarvestingAllocation([0.5, 1.2], [5.0, 5.0])
    analytic = solve_flow(topology, allocation).network_loss
    outcome = simulate(topology, allocation, SimConfig(1_000_000, rng_seed=6))
    assert outcome.agrees_with(analytic)
