"""
Network topology data model: nodes, routing matrix, generation rates.

Node indices are 0-based inside the code; the last index is the sink.
The JSON format and the violation messages use 1-based indices.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import networkx as nx
import numpy as np

from config.settings import DISK_RADIUS, CONNECTIVITY_RADIUS, MAX_RETRIES
from models.errors import DomainError


def _frozen_array(values, ndim):
    array = np.array(values, dtype=float, ndmin=ndim)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class NetworkTopology:
    """
    A sensor network with its routing.

    routing[j, i] is the fraction of node i's outgoing traffic sent to node j
    (columns are senders). Arrays are copied and made read-only on construction.
    """

    node_count: int
    routing: np.ndarray
    generation_rates: np.ndarray
    channel_loss: float = 0.0
    positions: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, 'node_count', int(self.node_count))
        object.__setattr__(self, 'routing', _frozen_array(self.routing, 2))
        object.__setattr__(self, 'generation_rates', _frozen_array(self.generation_rates, 1))
        object.__setattr__(self, 'channel_loss', float(self.channel_loss))
        if self.positions is not None:
            object.__setattr__(self, 'positions', _frozen_array(self.positions, 2))

    @property
    def sink(self):
        """Index of the sink (always the last node)."""
        return self.node_count - 1

    @property
    def sensor_count(self):
        return self.node_count - 1

    @property
    def adjacency(self):
        """0/1 matrix with a[j, i] = 1 iff node i sends some traffic to node j."""
        return (self.routing > 0).astype(int)

    @property
    def total_rate(self):
        return float(self.generation_rates.sum())

    def links(self):
        """
        List the routing entries.

        Returns:
            list: (sender, receiver, fraction) tuples, 0-based, sorted by sender
        """
        receivers, senders = np.nonzero(self.routing)
        order = np.lexsort((receivers, senders))
        return [(int(senders[k]), int(receivers[k]), float(self.routing[receivers[k], senders[k]]))
                for k in order]

    def next_hops(self, node):
        """Receivers of `node` with their fractions."""
        receivers = np.nonzero(self.routing[:, node])[0]
        return [(int(j), float(self.routing[j, node])) for j in receivers]

    def hop_depths(self):
        """
        Number of hops from each sensor to the sink along its routes.

        Under fractional routing the longest route counts. The sink has depth 0.
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_edges_from((sender, receiver) for sender, receiver, _fraction in self.links())
        depth = np.zeros(self.node_count, dtype=int)
        for node in reversed(list(nx.topological_sort(graph))):
            depth[node] = max((depth[nxt] + 1 for nxt in graph.successors(node)), default=0)
        return depth

    def with_channel_loss(self, channel_loss):
        return NetworkTopology(self.node_count, self.routing, self.generation_rates,
                               channel_loss, self.positions)

    def __eq__(self, other):
        if not isinstance(other, NetworkTopology):
            return NotImplemented
        if (self.positions is None) != (other.positions is None):
            return False
        return (self.node_count == other.node_count
                and self.channel_loss == other.channel_loss
                and np.array_equal(self.routing, other.routing)
                and np.array_equal(self.generation_rates, other.generation_rates)
                and (self.positions is None or np.array_equal(self.positions, other.positions)))

    __hash__ = None


@dataclass(frozen=True)
class GenerationConfig:
    """Parameters of a random disk deployment."""

    node_count: int
    disk_radius: float = DISK_RADIUS
    connectivity_radius: float = CONNECTIVITY_RADIUS
    rng_seed: int = 0
    max_retries: int = MAX_RETRIES

    def __post_init__(self):
        if self.node_count < 2:
            raise DomainError(f"node_count must be at least 2, got {self.node_count}")
        if self.disk_radius <= 0:
            raise DomainError(f"disk_radius must be positive, got {self.disk_radius}")
        if self.connectivity_radius <= 0:
            raise DomainError(f"connectivity_radius must be positive, got {self.connectivity_radius}")
        if self.max_retries < 1:
            raise DomainError(f"max_retries must be at least 1, got {self.max_retries}")


class ViolationKind(Enum):
    NODE_COUNT = 'NodeCount'
    SHAPE = 'BadShape'
    FRACTION_RANGE = 'FractionOutOfRange'
    NOT_STOCHASTIC = 'ColumnNotStochastic'
    SINK_HAS_OUTGOING_LINK = 'SinkHasOutgoingLink'
    SELF_LOOP = 'SelfLoop'
    NOT_NILPOTENT = 'NotNilpotent'
    NEGATIVE_RATE = 'NegativeRate'
    SINK_GENERATES = 'SinkGeneratesTraffic'
    CHANNEL_LOSS_RANGE = 'ChannelLossOutOfRange'


@dataclass(frozen=True)
class Violation:
    """A failed topology invariant with the 1-based indices involved."""

    kind: ViolationKind
    indices: Tuple[int, ...] = field(default_factory=tuple)

    def __str__(self):
        if not self.indices:
            return self.kind.value
        return f"{self.kind.value}({', '.join(str(i) for i in self.indices)})"
