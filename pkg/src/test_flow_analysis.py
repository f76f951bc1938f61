import numpy as np
import pytest

from models.allocation import HarvestingAllocation
from models.errors import CyclicRouting, DomainError
from models.topology import NetworkTopology
from src.flow_analysis import (FlowSolver, matrix_form_theta, network_loss, solve_flow, source_loss,
                               theta_equal_loss, topological_order)


def chain(rates=(1.0, 1.0, 0.0), channel_loss=0.0):
    routing = np.zeros((3, 3))
    routing[1, 0] = 1.0
    routing[2, 1] = 1.0
    return NetworkTopology(3, routing, rates, channel_loss)


def single_sensor(rate=1.0, channel_loss=0.0):
    return NetworkTopology(2, [[0.0, 0.0], [1.0, 0.0]], [rate, 0.0], channel_loss)


def random_dag(seed, size=None):
    """Fractional routing where every sensor sends only to higher indices."""
    rng = np.random.default_rng(seed)
    size = size or int(rng.integers(3, 12))
    routing = np.zeros((size, size))
    for i in range(size - 1):
        choices = np.arange(i + 1, size)
        receivers = rng.choice(choices, size=min(len(choices), int(rng.integers(1, 3))), replace=False)
        routing[receivers, i] = rng.dirichlet(np.ones(len(receivers)))
    rates = np.append(rng.uniform(0.01, 1.0, size - 1), 0.0)
    return NetworkTopology(size, routing, rates, float(rng.uniform(0.0, 0.1)))


def random_allocation(topology, seed):
    rng = np.random.default_rng(seed)
    sensors = topology.sensor_count
    return HarvestingAllocation(rng.uniform(0.1, 3.0, sensors), rng.integers(1, 20, sensors))


def test_single_sensor_closed_form():
    flow = solve_flow(single_sensor(), HarvestingAllocation([1.0], [1.0]))
    assert flow.theta.tolist() == pytest.approx([1.0, 0.5])
    assert flow.node_loss[0] == pytest.approx(0.5)
    assert flow.network_loss == pytest.approx(0.5)


def test_plentiful_energy_leaves_channel_loss():
    flow = solve_flow(single_sensor(0.3, channel_loss=0.01), HarvestingAllocation([1e9], [50.0]))
    assert flow.node_loss[0] == pytest.approx(0.0, abs=1e-300)
    assert flow.network_loss == pytest.approx(0.01, rel=1e-12)


def test_chain_with_typical_parameters():
    q = 1e-5
    topology = chain((0.0233, 0.0233, 0.0), channel_loss=q)
    flow = solve_flow(topology, HarvestingAllocation([0.2326, 0.2326], [2283.0, 2283.0]))
    assert flow.node_loss[0] < 1e-300
    assert flow.node_loss[1] < 1e-300
    expected = 1 - ((1 - q) ** 2 + (1 - q)) / 2
    assert flow.network_loss == pytest.approx(expected, rel=1e-9)
    assert flow.network_loss == pytest.approx(1.5e-5, rel=1e-4)


def test_network_loss_bounds():
    topology = chain()
    solver = FlowSolver(topology)
    theta, _loss = solver.sweep([1e12, 1e12], [10.0, 10.0])
    assert theta[-1] == pytest.approx(2.0)
    assert solver.loss_of([1e12, 1e12], [10.0, 10.0]) == pytest.approx(0.0, abs=1e-12)
    assert solver.loss_of([0.0, 0.0], [10.0, 10.0]) == 1.0


def test_network_loss_needs_traffic():
    topology = chain((0.0, 0.0, 0.0))
    flow = solve_flow(chain(), HarvestingAllocation([1.0, 1.0], [2.0, 2.0]))
    with pytest.raises(DomainError):
        network_loss(topology, flow)


def test_equal_loss_series_on_chain():
    topology = chain()
    assert theta_equal_loss(topology, 0.0).tolist() == pytest.approx([1.0, 2.0, 2.0])
    assert theta_equal_loss(topology, 0.5).tolist() == pytest.approx([1.0, 1.5, 0.75])
    assert theta_equal_loss(topology, 1.0).tolist() == pytest.approx(topology.generation_rates.tolist())


@pytest.mark.parametrize('p', [0.0, 0.3, 0.9])
@pytest.mark.parametrize('seed', range(20))
def test_equal_loss_series_matches_inverse(seed, p):
    topology = random_dag(seed)
    size = topology.node_count
    losses = np.full(size, p)
    losses[-1] = 0.0
    system = np.eye(size) - (1 - topology.channel_loss) * topology.routing @ np.diag(1 - losses)
    expected = np.linalg.inv(system) @ topology.generation_rates
    assert theta_equal_loss(topology, p) == pytest.approx(expected, rel=1e-12, abs=1e-15)
    assert matrix_form_theta(topology, p) == pytest.approx(expected, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize('seed', range(20))
def test_solution_is_a_fixed_point(seed):
    topology = random_dag(seed)
    allocation = random_allocation(topology, seed)
    flow = solve_flow(topology, allocation)
    assert flow.node_loss[-1] == 0.0
    assert np.all((flow.node_loss >= 0) & (flow.node_loss <= 1))
    assert matrix_form_theta(topology, flow.node_loss) == pytest.approx(flow.theta, rel=1e-10, abs=1e-14)
    expected = 1 - flow.theta[-1] / topology.total_rate
    assert flow.network_loss == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize('seed', range(10))
def test_more_harvesting_never_hurts(seed):
    topology = random_dag(seed)
    allocation = random_allocation(topology, seed)
    before = solve_flow(topology, allocation).network_loss
    mu = allocation.mu.copy()
    mu[seed % topology.sensor_count] *= 2.0
    after = solve_flow(topology, HarvestingAllocation(mu, allocation.cap)).network_loss
    assert after <= before + 1e-15


@pytest.mark.parametrize('seed', range(10))
def test_source_losses_average_to_network_loss(seed):
    topology = random_dag(seed)
    flow = solve_flow(topology, random_allocation(topology, seed))
    per_source = source_loss(topology, flow.node_loss)
    rates = topology.generation_rates[:-1]
    assert float(rates @ per_source / rates.sum()) == pytest.approx(flow.network_loss, rel=1e-9, abs=1e-14)


def test_order_puts_senders_first():
    order = topological_order(random_dag(4, size=8))
    assert order[-1] == 7
    position = {v: k for k, v in enumerate(order)}
    for sender, receiver, _fraction in random_dag(4, size=8).links():
        assert position[sender] < position[receiver]


def test_cyclic_routing_is_rejected():
    routing = np.zeros((3, 3))
    routing[1, 0] = 1.0
    routing[0, 1] = 1.0
    topology = NetworkTopology(3, routing, [1.0, 1.0, 0.0])
    with pytest.raises(CyclicRouting):
        solve_flow(topology, HarvestingAllocation([1.0, 1.0], [1.0, 1.0]))
    with pytest.raises(CyclicRouting):
        theta_equal_loss(topology, 0.1)


def test_allocation_must_cover_every_sensor():
    with pytest.raises(DomainError):
        solve_flow(chain(), HarvestingAllocation([1.0], [1.0]))
