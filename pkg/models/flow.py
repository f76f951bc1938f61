"""
Result of the flow-balance analysis.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class FlowSolution:
    """
    Arrival rates and loss probabilities of every node.

    theta[v] is the total report arrival rate at node v (the sink included),
    node_loss[v] the probability that v drops a report for lack of energy
    (0 for the sink) and network_loss the share of generated reports that
    never reach the sink.
    """

    theta: np.ndarray
    node_loss: np.ndarray
    network_loss: float

    def __post_init__(self):
        for name in ('theta', 'node_loss'):
            array = np.array(getattr(self, name), dtype=float, ndmin=1)
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        object.__setattr__(self, 'network_loss', float(self.network_loss))

    @property
    def sink_rate(self):
        return float(self.theta[-1])

    def to_dict(self):
        return {
            'theta': self.theta.tolist(),
            'node_loss': self.node_loss.tolist(),
            'network_loss': self.network_loss,
        }
