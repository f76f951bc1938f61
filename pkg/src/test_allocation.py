import numpy as np
import pytest
from hypothesis import given, strategies as st

from models.allocation import HarvestingAllocation, OptimizerConfig, ResourceBudget
from models.errors import DomainError, InvalidCapacity, NoTraffic
from models.topology import GenerationConfig, NetworkTopology
from src.allocation import (FairnessEquation, almost_fair_allocation, bisect_increasing, f_alpha,
                            optimal_allocation, project_capacities, project_rates, solve_fair_ratio,
                            uniform_allocation)
from src.flow_analysis import solve_flow
from src.netgen import generate_network, uniform_rates
from src.queueing import blocking_probability


def single_sensor(rate=0.1, channel_loss=0.0):
    return NetworkTopology(2, [[0.0, 0.0], [1.0, 0.0]], [rate, 0.0], channel_loss)


def chain(rates=(0.1, 0.1, 0.0)):
    routing = np.zeros((3, 3))
    routing[1, 0] = 1.0
    routing[2, 1] = 1.0
    return NetworkTopology(3, routing, rates)


def star(sensors=4, rate=0.1):
    routing = np.zeros((sensors + 1, sensors + 1))
    routing[sensors, :sensors] = 1.0
    return NetworkTopology(sensors + 1, routing, [rate] * sensors + [0.0])


@pytest.fixture(scope='module')
def deployed():
    config = GenerationConfig(12, rng_seed=11)
    return generate_network(config, uniform_rates(12, 0.4652), 1e-3)


def test_uniform_gives_everyone_the_average():
    allocation = uniform_allocation(3, ResourceBudget(0.2, 10.0))
    assert allocation.mu.tolist() == [0.2, 0.2]
    assert allocation.cap.tolist() == [10.0, 10.0]
    assert allocation.scheme == 'uniform'
    assert uniform_allocation(2, ResourceBudget(0.2, 10.0)).mu.tolist() == [0.2]
    with pytest.raises(DomainError):
        uniform_allocation(1, ResourceBudget(0.2, 10.0))


def test_fairness_equation_values():
    budget = ResourceBudget(0.2, 5.0)
    topology = single_sensor()
    assert f_alpha(0.0, topology, budget) == pytest.approx(-0.2)
    assert f_alpha(3.0, topology, budget) == pytest.approx(0.3 - 0.2)
    assert f_alpha(0.0, chain(), budget) == pytest.approx(-0.4)
    with pytest.raises(DomainError):
        f_alpha(-1.0, topology, budget)


def test_fairness_equation_increases(deployed):
    equation = FairnessEquation(deployed, ResourceBudget(0.1, 20.0))
    values = [equation(alpha) for alpha in np.linspace(0.0, equation.upper_bracket(), 51)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert equation(equation.upper_bracket()) > 0


def test_single_sensor_fair_allocation():
    budget = ResourceBudget(0.2, 5.0)
    alpha, residual, _equation = solve_fair_ratio(single_sensor(), budget)
    assert alpha == pytest.approx(2.0, rel=1e-9)
    allocation = almost_fair_allocation(single_sensor(), budget)
    assert allocation.mu.tolist() == pytest.approx([0.2])
    assert allocation.scheme == 'fair'
    flow = solve_flow(single_sensor(), allocation)
    assert flow.node_loss[0] == pytest.approx(1 / 63, rel=1e-9)
    assert blocking_probability(alpha, 5.0) == pytest.approx(1 / 63, rel=1e-9)


def test_symmetric_star_fair_equals_uniform():
    budget = ResourceBudget(0.2, 10.0)
    fair = almost_fair_allocation(star(), budget)
    uniform = uniform_allocation(5, budget)
    assert fair.mu == pytest.approx(uniform.mu, rel=1e-9)
    assert fair.cap.tolist() == uniform.cap.tolist()


def test_chain_gives_more_to_the_relay():
    allocation = almost_fair_allocation(chain(), ResourceBudget(0.2, 10.0))
    assert allocation.mu[1] > allocation.mu[0]
    assert allocation.mean_mu == pytest.approx(0.2, rel=1e-9)


@pytest.mark.parametrize('mu, cap', [(0.02, 5.0), (0.1, 20.0), (0.5, 3.0), (2.0, 100.0)])
def test_fair_allocation_equalizes_node_loss(deployed, mu, cap):
    budget = ResourceBudget(mu, cap)
    allocation = almost_fair_allocation(deployed, budget)
    assert allocation.satisfies(budget, rel_tol=1e-8)
    losses = solve_flow(deployed, allocation).node_loss[:deployed.sink]
    assert losses == pytest.approx(np.full(len(losses), losses[0]), rel=1e-6, abs=1e-15)


def test_fair_needs_traffic():
    with pytest.raises(NoTraffic):
        almost_fair_allocation(chain((0.0, 0.0, 0.0)), ResourceBudget(0.2, 10.0))


def test_bisection_finds_cube_root():
    root, residual, iterations = bisect_increasing(lambda x: x ** 3 - 2.0, 0.0, 2.0, 1e-12)
    assert root == pytest.approx(2.0 ** (1 / 3), rel=1e-10)
    assert abs(residual) <= 1e-12
    assert iterations <= 200


def test_bisection_stops_on_width():
    _root, _residual, iterations = bisect_increasing(lambda x: x - 0.3, 0.0, 1.0, 0.0, min_width=0.25)
    assert iterations == 3


@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=30), st.floats(1e-2, 10.0))
def test_rate_projection_keeps_mean_and_floor(mu, mean):
    floor = 1e-6 * mean
    projected = project_rates(mu, mean, floor)
    assert projected.mean() == pytest.approx(mean, rel=1e-9)
    assert projected.min() >= floor * (1 - 1e-12)


@given(st.lists(st.floats(1.0, 1e4), min_size=1, max_size=30), st.floats(2.0, 1e4))
def test_capacity_projection_keeps_mean_and_floor(cap, mean):
    projected = project_capacities(cap, mean)
    assert projected.mean() == pytest.approx(mean, rel=1e-9)
    assert projected.min() >= 1.0 - 1e-9


@pytest.mark.parametrize('mu, cap', [(0.05, 5.0), (0.2, 20.0)])
def test_optimal_no_worse_than_fair(deployed, mu, cap):
    budget = ResourceBudget(mu, cap)
    config = OptimizerConfig(seed=3, iterations=400)
    optimal = optimal_allocation(deployed, budget, config)
    fair = almost_fair_allocation(deployed, budget)
    assert optimal.scheme == 'optimal'
    assert optimal.satisfies(budget, rel_tol=1e-8)
    assert np.all(optimal.cap >= 1.0)
    assert np.all(optimal.mu >= 0.0)
    optimal_loss = solve_flow(deployed, optimal).network_loss
    assert optimal_loss <= solve_flow(deployed, fair).network_loss


def test_optimal_is_deterministic(deployed):
    budget = ResourceBudget(0.05, 5.0)
    config = OptimizerConfig(seed=1, iterations=300, restarts=2)
    assert optimal_allocation(deployed, budget, config) == optimal_allocation(deployed, budget, config)


def test_single_sensor_optimal_is_uniform_and_fair():
    budget = ResourceBudget(0.2, 5.0)
    optimal = optimal_allocation(single_sensor(), budget, OptimizerConfig(seed=2, iterations=200))
    for other in (uniform_allocation(2, budget), almost_fair_allocation(single_sensor(), budget)):
        assert optimal.mu.tolist() == pytest.approx(other.mu.tolist(), rel=1e-12)
        assert optimal.cap.tolist() == pytest.approx(other.cap.tolist(), rel=1e-12)


def test_symmetric_star_optimal_matches_uniform():
    budget = ResourceBudget(0.2, 10.0)
    optimal = optimal_allocation(star(), budget, OptimizerConfig(seed=4, iterations=400))
    delivered = solve_flow(star(), optimal).theta[-1]
    uniform = solve_flow(star(), uniform_allocation(5, budget)).theta[-1]
    assert delivered == pytest.approx(uniform, rel=1e-6)


def test_optimal_keeps_idle_sensors_above_the_floor():
    # sensor 1 generates nothing and relays nothing, so almost-fair gives it no energy
    idle = chain((0.0, 0.1, 0.0))
    budget = ResourceBudget(0.2, 10.0)
    assert almost_fair_allocation(idle, budget).mu[0] == 0.0
    config = OptimizerConfig(seed=5, iterations=200)
    optimal = optimal_allocation(idle, budget, config)
    assert optimal.mu.min() >= config.mu_floor * budget.mu_avg * (1 - 1e-12)
    assert optimal.satisfies(budget, rel_tol=1e-8)


def test_capacity_below_one_packet_is_rejected():
    with pytest.raises(InvalidCapacity):
        HarvestingAllocation([0.1, 0.1], [4.0, 0.4])


def test_optimizer_config_checks_ranges():
    with pytest.raises(DomainError):
        OptimizerConfig(cooling=0.0)
    with pytest.raises(DomainError):
        OptimizerConfig(restarts=0)
    with pytest.raises(DomainError):
        ResourceBudget(0.0, 10.0)
    with pytest.raises(DomainError):
        ResourceBudget(0.1, 0.5)
