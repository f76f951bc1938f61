"""
Discrete-event Monte Carlo simulation of an energy-harvesting sensor network.

Each sensor generates reports as a Poisson process and stores harvested
energy packets (Poisson arrivals) up to its capacity. Forwarding is
instantaneous, so a report's whole journey is resolved the moment it is
generated. Energy harvested between two reports at a node is added lazily
when the next report arrives: nothing drains the store in between, so
level = min(N, level + Poisson(mu * dt)) is exact.
"""

import logging
import math

import numpy as np
import simpy
from scipy.stats import norm

from config.settings import CONFIDENCE_LEVEL
from models.errors import DomainError, NoTraffic
from models.simulation import SimOutcome

logger = logging.getLogger(__name__)


class SensorNode:
    """Energy store and forwarding table of one sensor."""

    def __init__(self, index, harvest_rate, capacity, next_hops):
        self.index = index
        self.harvest_rate = harvest_rate
        self.capacity = capacity
        self.level = capacity           # stores start full
        self.last_update = 0.0
        self.receivers = [j for j, _ in next_hops]
        self.cumulative = np.cumsum([f for _, f in next_hops]).tolist()

    def harvest(self, now, rng):
        if self.level < self.capacity and self.harvest_rate > 0:
            arrived = rng.poisson(self.harvest_rate * (now - self.last_update))
            self.level = min(self.capacity, self.level + int(arrived))
        self.last_update = now

    def consume(self, now, rng):
        """Spend one packet on a report; False when the store is empty."""
        self.harvest(now, rng)
        if self.level == 0:
            return False
        self.level -= 1
        return True

    def next_hop(self, rng):
        if len(self.receivers) == 1:
            return self.receivers[0]
        draw = rng.random() * self.cumulative[-1]
        for receiver, bound in zip(self.receivers, self.cumulative):
            if draw < bound:
                return receiver
        return self.receivers[-1]


class NetworkSimulation:
    """
    One simulation run over a topology and an allocation.

    Reports generated during warmup travel through the network (they drain
    and shape the energy stores) but are not counted.
    """

    def __init__(self, topology, allocation, config):
        if allocation.sensor_count != topology.sensor_count:
            raise DomainError("allocation and topology disagree on the number of sensors")
        if topology.total_rate <= 0:
            raise NoTraffic("all generation rates are zero; nothing to simulate")
        capacities = allocation.rounded_capacities()

        self.topology = topology
        self.config = config
        self.rng = np.random.default_rng(config.rng_seed)
        self.env = simpy.Environment()
        self.finished = self.env.event()
        self.sink = topology.sink
        self.channel_loss = topology.channel_loss
        self.nodes = [SensorNode(v, float(allocation.mu[v]), int(capacities[v]), topology.next_hops(v))
                      for v in range(topology.sensor_count)]

        self.issued = 0
        self.generated = 0
        self.delivered = 0
        self.lost_channel = 0
        self.lost_energy = [0] * topology.sensor_count

    def report_source(self, origin, rate):
        """simpy process: Poisson report generation at one sensor."""
        while True:
            yield self.env.timeout(self.rng.exponential(1.0 / rate))
            self.dispatch(origin)

    def dispatch(self, origin):
        """Follow one report from its origin until it is delivered or lost."""
        self.issued += 1
        counted = self.issued > self.config.warmup_events
        now = self.env.now
        node = origin
        drained_at = None
        channel_drop = False
        while node != self.sink:
            sensor = self.nodes[node]
            if not sensor.consume(now, self.rng):
                drained_at = node
                break
            if self.channel_loss > 0 and self.rng.random() < self.channel_loss:
                channel_drop = True
                break
            node = sensor.next_hop(self.rng)

        if not counted:
            return
        self.generated += 1
        if drained_at is not None:
            self.lost_energy[drained_at] += 1
        elif channel_drop:
            self.lost_channel += 1
        else:
            self.delivered += 1
        if self.generated >= self.config.min_generated_events and not self.finished.triggered:
            self.finished.succeed()

    def run(self):
        """
        Run until enough reports have been counted.

        Returns:
            SimOutcome
        """
        # sources start in node-index order, which also orders same-time events
        for v, rate in enumerate(self.topology.generation_rates[:self.sink].tolist()):
            if rate > 0:
                self.env.process(self.report_source(v, rate))
        self.env.run(until=self.finished)
        logger.debug("simulated %.6g s, %d reports issued (%d counted)",
                     self.env.now, self.issued, self.generated)
        return self.outcome()

    def outcome(self):
        generated = self.generated
        loss = 1.0 - self.delivered / generated if generated else 0.0
        z = norm.ppf(0.5 + CONFIDENCE_LEVEL / 2.0)
        halfwidth = z * math.sqrt(loss * (1.0 - loss) / generated) if generated else 0.0
        return SimOutcome(generated, self.delivered, tuple(self.lost_energy),
                          self.lost_channel, loss, halfwidth)


def simulate(topology, allocation, config):
    """
    Simulate report delivery and measure the network loss probability.

    Args:
        topology: NetworkTopology
        allocation: HarvestingAllocation; capacities (at least one packet) are rounded
        config: SimConfig (horizon, warmup, seed)

    Returns:
        SimOutcome

    Raises:
        NoTraffic: no sensor generates reports
        DomainError: allocation and topology disagree on the sensor count
    """
    return NetworkSimulation(topology, allocation, config).run()
