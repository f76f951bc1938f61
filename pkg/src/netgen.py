"""
Random disk deployments with shortest-path routing, and topology validation.
"""

import logging

import networkx as nx
import numpy as np

from models.errors import DisconnectedNetwork, DomainError, TopologyValidationError
from models.topology import NetworkTopology, Violation, ViolationKind

logger = logging.getLogger(__name__)

# relative slack when matching a neighbour's path cost to the shortest distance
_COST_MATCH_TOLERANCE = 1e-12
_STOCHASTIC_TOLERANCE = 1e-9


def deploy_on_disk(count, radius, rng):
    """
    Place `count` points i.i.d. uniformly on a disk centred at the origin.

    Returns:
        numpy.ndarray: (count, 2) array of coordinates in meters
    """
    r = radius * np.sqrt(rng.random(count))
    phi = 2.0 * np.pi * rng.random(count)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


def proximity_graph(positions, connectivity_radius):
    """
    Undirected graph linking every pair of nodes closer than the radius.

    Each edge carries `cost`, the squared distance between its ends.
    """
    deltas = positions[:, None, :] - positions[None, :, :]
    squared = np.einsum('ijk,ijk->ij', deltas, deltas)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(positions)))
    limit = connectivity_radius ** 2
    rows, cols = np.nonzero(np.triu(squared < limit, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        graph.add_edge(i, j, cost=float(squared[i, j]))
    return graph


def shortest_path_routing(graph, sink):
    """
    Deterministic routing matrix from Dijkstra distances to the sink.

    Every sensor forwards to the neighbour that lies on a cheapest path,
    choosing the smallest index among equally cheap next hops.

    Returns:
        numpy.ndarray: V x V matrix with routing[next_hop, sensor] = 1
    """
    size = graph.number_of_nodes()
    distance = nx.single_source_dijkstra_path_length(graph, sink, weight='cost')
    routing = np.zeros((size, size))
    for sensor in range(size):
        if sensor == sink:
            continue
        closer = [(distance[j] + graph.edges[sensor, j]['cost'], j)
                  for j in graph.neighbors(sensor) if distance[j] < distance[sensor]]
        best = min(cost for cost, _ in closer)
        next_hop = min(j for cost, j in closer if cost <= best * (1.0 + _COST_MATCH_TOLERANCE))
        routing[next_hop, sensor] = 1.0
    return routing


def generate_network(config, rates, channel_loss=0.0):
    """
    Deploy sensors on a disk, link them by proximity and route to the sink.

    Args:
        config: GenerationConfig (node count, radii, seed, retry budget)
        rates: generation rates of length V, with 0 for the sink
        channel_loss: per-transmission loss probability q

    Returns:
        NetworkTopology: sink last and at the disk center

    Raises:
        DisconnectedNetwork: no connected deployment within max_retries
    """
    size = config.node_count
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (size,):
        raise DomainError(f"expected {size} generation rates, got {rates.shape}")
    if rates[-1] != 0.0 or np.any(rates < 0):
        raise DomainError("generation rates must be non-negative with 0 for the sink")

    rng = np.random.default_rng(config.rng_seed)
    sink = size - 1
    for attempt in range(1, config.max_retries + 1):
        sensors = deploy_on_disk(size - 1, config.disk_radius, rng)
        positions = np.vstack((sensors, np.zeros((1, 2))))
        graph = proximity_graph(positions, config.connectivity_radius)
        if nx.is_connected(graph):
            logger.debug("connected deployment of %d nodes after %d attempt(s)", size, attempt)
            break
        logger.debug("deployment %d disconnected, retrying", attempt)
    else:
        raise DisconnectedNetwork(
            f"no connected deployment of {size} nodes with radius {config.connectivity_radius} m "
            f"in {config.max_retries} attempt(s)")

    routing = shortest_path_routing(graph, sink)
    return NetworkTopology(size, routing, rates, channel_loss, positions)


def uniform_rates(node_count, load):
    """Every sensor generates load / V reports per second; the sink none."""
    rates = np.full(node_count, load / node_count)
    rates[-1] = 0.0
    return rates


def validate_topology(topology):
    """
    Check every structural invariant of a topology.

    Args:
        topology: NetworkTopology

    Returns:
        list: Violation records, empty when the topology is valid
    """
    violations = []
    size = topology.node_count
    if size < 2:
        return [Violation(ViolationKind.NODE_COUNT, (size,))]
    routing = topology.routing
    rates = topology.generation_rates
    if routing.shape != (size, size) or rates.shape != (size,):
        return [Violation(ViolationKind.SHAPE)]
    if topology.positions is not None and topology.positions.shape != (size, 2):
        violations.append(Violation(ViolationKind.SHAPE))

    if not 0.0 <= topology.channel_loss < 1.0:
        violations.append(Violation(ViolationKind.CHANNEL_LOSS_RANGE))

    bad = np.argwhere(~np.isfinite(routing) | (routing < 0) | (routing > 1))
    for j, i in bad.tolist():
        violations.append(Violation(ViolationKind.FRACTION_RANGE, (j + 1, i + 1)))

    for i in range(size):
        if routing[i, i] != 0:
            violations.append(Violation(ViolationKind.SELF_LOOP, (i + 1,)))

    sink = size - 1
    column_sums = routing.sum(axis=0)
    for i in range(sink):
        if abs(column_sums[i] - 1.0) > _STOCHASTIC_TOLERANCE:
            violations.append(Violation(ViolationKind.NOT_STOCHASTIC, (i + 1,)))
    for j in np.nonzero(routing[:, sink])[0].tolist():
        if j != sink:
            violations.append(Violation(ViolationKind.SINK_HAS_OUTGOING_LINK, (j + 1,)))

    # link pattern only, self-loops are reported above
    adjacency = topology.adjacency
    np.fill_diagonal(adjacency, 0)
    link_graph = nx.DiGraph()
    link_graph.add_nodes_from(range(size))
    link_graph.add_edges_from((i, j) for j, i in np.argwhere(adjacency).tolist())
    if not nx.is_directed_acyclic_graph(link_graph):
        violations.append(Violation(ViolationKind.NOT_NILPOTENT))

    for v in np.nonzero(~np.isfinite(rates) | (rates < 0))[0].tolist():
        violations.append(Violation(ViolationKind.NEGATIVE_RATE, (v + 1,)))
    if rates[sink] != 0:
        violations.append(Violation(ViolationKind.SINK_GENERATES, (size,)))
    return violations


def require_valid(topology):
    """Raise TopologyValidationError unless the topology is valid."""
    violations = validate_topology(topology)
    if violations:
        raise TopologyValidationError(violations)
    return topology
