"""
Flow balance on the routing DAG and the network loss probability.

Every node v receives

    theta_v = lambda_v + (1 - q) * sum_i r_vi * theta_i * (1 - p_i)

and drops a report with probability p_v, which itself depends on theta_v
through the energy queue. On an acyclic routing graph both are fixed by a
single sweep in topological order.
"""

import logging

import networkx as nx
import numpy as np

from models.errors import CyclicRouting, DomainError
from models.flow import FlowSolution
from src.queueing import node_loss

logger = logging.getLogger(__name__)


def routing_graph(topology):
    """Directed graph with an edge i -> j for every r_ji > 0."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(topology.node_count))
    for sender, receiver, fraction in topology.links():
        graph.add_edge(sender, receiver, fraction=fraction)
    return graph


def topological_order(topology):
    """
    Senders before receivers, ties broken by the smallest node index.

    Raises:
        CyclicRouting: the routing graph has a cycle (self-loops included)
    """
    graph = routing_graph(topology)
    try:
        return list(nx.lexicographical_topological_sort(graph))
    except nx.NetworkXUnfeasible as exc:
        cycle = nx.find_cycle(graph)
        nodes = sorted({edge[0] + 1 for edge in cycle})
        raise CyclicRouting(f"routing graph has a cycle through nodes {nodes}") from exc


def _check_shapes(topology):
    size = topology.node_count
    if topology.routing.shape != (size, size):
        raise DomainError(f"routing must be {size}x{size}, got {topology.routing.shape}")
    if topology.generation_rates.shape != (size,):
        raise DomainError(f"generation_rates must have length {size}")


class FlowSolver:
    """
    Solves the coupled flow-balance / energy-queue system for one topology.

    The topological order and the upstream lists are computed once, so the
    solver can be reused for many allocations (the annealer does this).
    """

    def __init__(self, topology):
        _check_shapes(topology)
        self.topology = topology
        self.order = topological_order(topology)
        self.upstream = [[] for _ in range(topology.node_count)]
        for sender, receiver, fraction in topology.links():
            self.upstream[receiver].append((sender, fraction))
        self.survival = 1.0 - topology.channel_loss
        self.rates = topology.generation_rates.tolist()

    def sweep(self, mu, cap):
        """
        Arrival rates and node losses for harvest rates `mu` and capacities `cap`.

        Args:
            mu: sequence of V-1 harvest rates
            cap: sequence of V-1 capacities

        Returns:
            tuple: (theta, p) as lists of length V
        """
        size = self.topology.node_count
        sink = self.topology.sink
        theta = [0.0] * size
        loss = [0.0] * size
        for v in self.order:
            inflow = 0.0
            for i, fraction in self.upstream[v]:
                inflow += fraction * theta[i] * (1.0 - loss[i])
            theta[v] = self.rates[v] + self.survival * inflow
            if v != sink:
                loss[v] = node_loss(mu[v], theta[v], cap[v])
        return theta, loss

    def solve(self, allocation):
        """Full FlowSolution for a HarvestingAllocation."""
        if allocation.sensor_count != self.topology.sensor_count:
            raise DomainError(
                f"allocation covers {allocation.sensor_count} sensors, "
                f"topology has {self.topology.sensor_count}")
        theta, loss = self.sweep(allocation.mu.tolist(), allocation.cap.tolist())
        return FlowSolution(theta, loss, _loss_from_sink_rate(self.topology, theta[-1]))

    def loss_of(self, mu, cap):
        """Network loss probability only; the annealer's hot path."""
        theta, _loss = self.sweep(mu, cap)
        return _loss_from_sink_rate(self.topology, theta[-1])


def _loss_from_sink_rate(topology, sink_rate):
    total = topology.total_rate
    if total <= 0:
        raise DomainError("total generation rate is zero; network loss is undefined")
    return min(1.0, max(0.0, 1.0 - sink_rate / total))


def solve_flow(topology, allocation):
    """
    Solve flow balance and node losses for one allocation.

    Args:
        topology: NetworkTopology with acyclic routing
        allocation: HarvestingAllocation for the V-1 sensors

    Returns:
        FlowSolution: theta, node losses and the network loss probability
    """
    solution = FlowSolver(topology).solve(allocation)
    logger.debug("solved flow for V=%d, P_L=%.6g", topology.node_count, solution.network_loss)
    return solution


def network_loss(topology, flow):
    """
    Share of generated reports that never reach the sink, 1 - theta_V / sum(lambda).

    Raises:
        DomainError: the total generation rate is zero
    """
    return _loss_from_sink_rate(topology, float(flow.theta[topology.sink]))


def matrix_form_theta(topology, loss):
    """
    theta = [I - (1-q) R (I - P)]^-1 lambda by a dense solve.

    Args:
        topology: NetworkTopology
        loss: node loss probabilities, a scalar (applied to every sensor) or a
            vector of length V; the sink entry is forced to 0
    """
    size = topology.node_count
    p = np.broadcast_to(np.asarray(loss, dtype=float), (size,)).copy()
    p[topology.sink] = 0.0
    system = np.eye(size) - (1.0 - topology.channel_loss) * topology.routing @ np.diag(1.0 - p)
    return np.linalg.solve(system, topology.generation_rates)


def series_terms(topology):
    """
    The vectors R^n lambda for n = 0 .. V-1, stacked as rows.

    Raises:
        CyclicRouting: the routing graph has a cycle
    """
    topological_order(topology)
    size = topology.node_count
    terms = np.zeros((size, size))
    term = topology.generation_rates.astype(float)
    for n in range(size):
        terms[n] = term
        term = topology.routing @ term
        if not term.any():
            break
    return terms


def theta_equal_loss(topology, p):
    """
    Arrival rates when every sensor drops reports with the same probability p.

    Evaluates the finite series sum_n ((1-q)(1-p))^n R^n lambda, exact because
    the routing matrix is nilpotent.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"loss probability must be in [0, 1], got {p}")
    terms = series_terms(topology)
    factor = (1.0 - topology.channel_loss) * (1.0 - p)
    weights = factor ** np.arange(topology.node_count)
    return weights @ terms


def source_loss(topology, loss):
    """
    Probability that a report generated at each sensor is lost on its way.

    Args:
        topology: NetworkTopology
        loss: node loss probabilities of length V (a FlowSolution's node_loss)

    Returns:
        numpy.ndarray: V-1 end-to-end loss probabilities, one per source sensor
    """
    order = topological_order(topology)
    survival = 1.0 - topology.channel_loss
    delivery = np.zeros(topology.node_count)
    delivery[topology.sink] = 1.0
    for s in reversed(order):
        if s == topology.sink:
            continue
        onward = sum(fraction * delivery[j] for j, fraction in topology.next_hops(s))
        delivery[s] = (1.0 - loss[s]) * survival * onward
    return 1.0 - delivery[:topology.sink]
