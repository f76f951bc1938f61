"""
Allocation of harvest rates and storage capacities under a total budget.

Three schemes share the budget constraints mean(mu_v) = mu and mean(N_v) = N:

- uniform: every sensor gets the averages;
- almost-fair: equal node loss everywhere, found by bisection on a scalar ratio;
- optimal: simulated annealing on the analytic loss, seeded at almost-fair.
"""

import logging
import math

import numpy as np

from config import settings
from models.allocation import HarvestingAllocation, OptimizerConfig
from models.errors import BracketFailure, DomainError, NoTraffic
from src.flow_analysis import FlowSolver, matrix_form_theta, series_terms
from src.queueing import effective_throughput_factor

logger = logging.getLogger(__name__)

# log10 of losses below this are treated as equal
_LOSS_FLOOR = 1e-300


def uniform_allocation(v_count, budget):
    """
    Give every sensor the budget averages.

    Args:
        v_count: number of nodes V (sink included), >= 2
        budget: ResourceBudget
    """
    if v_count < 2:
        raise DomainError(f"need at least 2 nodes, got {v_count}")
    sensors = v_count - 1
    return HarvestingAllocation(np.full(sensors, budget.mu_avg),
                                np.full(sensors, budget.cap_avg), 'uniform')


class FairnessEquation:
    """
    f(alpha) = alpha * sum_n (1-q)^n g(alpha)^n s_n - mu (V-1)

    where g(alpha) is the share of reports a node forwards at queue ratio alpha
    and s_n = sum over sensors of (R^n lambda)_v. Its root is the common ratio
    mu_v / theta_v of the almost-fair allocation.
    """

    def __init__(self, topology, budget):
        self.topology = topology
        self.budget = budget
        self.terms = series_terms(topology)
        self.sensor_totals = self.terms[:, :topology.sink].sum(axis=1)
        self.target = budget.mu_avg * topology.sensor_count
        self.powers = np.arange(topology.node_count)

    def weights(self, alpha):
        factor = (1.0 - self.topology.channel_loss) * effective_throughput_factor(alpha, self.budget.cap_avg)
        return factor ** self.powers

    def __call__(self, alpha):
        if alpha < 0:
            raise DomainError(f"alpha must be non-negative, got {alpha}")
        if alpha == 0:
            return -self.target
        return alpha * float(self.weights(alpha) @ self.sensor_totals) - self.target

    def rates(self, alpha):
        """Harvest rates alpha * theta_v of all sensors at ratio alpha."""
        theta = self.weights(alpha) @ self.terms
        return alpha * theta[:self.topology.sink]

    def upper_bracket(self):
        """
        alpha+ = max(1, mu (V-1) / sum_sensors [I - (1-q) N/(N+1) R]^-1 lambda).

        For alpha >= 1 every node forwards at least N/(N+1) of its reports,
        which bounds f from below and makes f(alpha+) > 0.
        """
        cap = self.budget.cap_avg
        theta = matrix_form_theta(self.topology, 1.0 / (cap + 1.0))
        carried = float(theta[:self.topology.sink].sum())
        return max(1.0, self.target / carried)


def f_alpha(alpha, topology, budget):
    """Evaluate the almost-fair balance equation at one ratio."""
    return FairnessEquation(topology, budget)(alpha)


def bisect_increasing(func, lower, upper, tolerance,
                      max_iter=settings.BISECTION_MAX_ITER,
                      min_width=0.0):
    """
    Root of an increasing function with func(lower) < 0 < func(upper).

    Stops when |func| <= tolerance, when the bracket is narrower than
    min_width, or after max_iter halvings.

    Returns:
        tuple: (root, residual, iterations)
    """
    mid = 0.5 * (lower + upper)
    value = func(mid)
    iterations = 1
    while abs(value) > tolerance and iterations < max_iter and upper - lower > min_width:
        if value < 0:
            lower = mid
        else:
            upper = mid
        mid = 0.5 * (lower + upper)
        value = func(mid)
        iterations += 1
    return mid, value, iterations


def solve_fair_ratio(topology, budget):
    """
    Common queue ratio alpha of the almost-fair allocation.

    Returns:
        tuple: (alpha, f(alpha), equation)

    Raises:
        NoTraffic: all generation rates are zero
        BracketFailure: f(alpha+) is not positive
    """
    if topology.total_rate <= 0:
        raise NoTraffic("all generation rates are zero")
    equation = FairnessEquation(topology, budget)
    tolerance = settings.BISECTION_REL_RESIDUAL * equation.target
    upper = equation.upper_bracket()
    at_upper = equation(upper)
    if abs(at_upper) <= tolerance:
        return upper, at_upper, equation
    if at_upper <= 0:
        raise BracketFailure(f"f(alpha+) = {at_upper:.6g} <= 0 at alpha+ = {upper:.6g}")
    alpha, residual, iterations = bisect_increasing(
        equation, 0.0, upper, tolerance,
        min_width=settings.BISECTION_REL_WIDTH * upper)
    logger.debug("fair ratio alpha=%.12g after %d halvings (|f|=%.3g, alpha+=%.6g)",
                 alpha, iterations, abs(residual), upper)
    if abs(residual) > tolerance:
        logger.warning("bisection stopped at |f|=%.3g above tolerance %.3g", abs(residual), tolerance)
    return alpha, residual, equation


def almost_fair_allocation(topology, budget):
    """
    Allocate so that every traffic-carrying sensor has the same node loss.

    All sensors keep the average capacity N; harvest rates are proportional
    to the traffic each sensor carries. Sensors that carry no traffic get 0.
    """
    alpha, _residual, equation = solve_fair_ratio(topology, budget)
    mu = np.maximum(equation.rates(alpha), 0.0)
    cap = np.full(topology.sensor_count, budget.cap_avg)
    return HarvestingAllocation(mu, cap, 'fair')


def project_rates(mu, mean, floor):
    """
    Rescale harvest rates to the given mean, keeping every rate >= floor.

    Rates that would fall below the floor are pinned to it and the rest are
    scaled to absorb the remaining budget.
    """
    mu = np.asarray(mu, dtype=float)
    total = mean * len(mu)
    pinned = np.zeros(len(mu), dtype=bool)
    while True:
        free = ~pinned
        scale = (total - floor * pinned.sum()) / mu[free].sum()
        projected = np.where(pinned, floor, mu * scale)
        newly = free & (projected < floor)
        if not newly.any():
            return projected
        pinned |= newly


def project_capacities(cap, mean, floor=1.0):
    """Shift capacities to the given mean, keeping every capacity >= floor."""
    cap = np.asarray(cap, dtype=float)
    total = mean * len(cap)
    pinned = np.zeros(len(cap), dtype=bool)
    while True:
        free = ~pinned
        shift = (total - floor * pinned.sum() - cap[free].sum()) / free.sum()
        projected = np.where(pinned, floor, cap + shift)
        newly = free & (projected < floor)
        if not newly.any():
            return projected
        pinned |= newly


class AllocationAnnealer:
    """
    Simulated annealing over (mu, N) on the exact analytic network loss.

    Candidates are scored by log10 of the loss probability, so temperatures
    are measured in orders of magnitude. A move perturbs one sensor's log(mu)
    and N with Gaussian steps, then projects back onto the budget.
    """

    def __init__(self, topology, budget, config):
        self.solver = FlowSolver(topology)
        self.budget = budget
        self.config = config
        self.sensors = topology.sensor_count
        self.mu_min = config.mu_floor * budget.mu_avg

    def loss(self, mu, cap):
        return self.solver.loss_of(mu.tolist(), cap.tolist())

    def score(self, mu, cap):
        return math.log10(max(self.loss(mu, cap), _LOSS_FLOOR))

    def propose(self, mu, cap, rng):
        k = rng.integers(self.sensors)
        mu = mu.copy()
        cap = cap.copy()
        mu[k] *= math.exp(rng.normal(0.0, self.config.mu_step))
        cap[k] += rng.normal(0.0, self.config.cap_step * self.budget.cap_avg)
        return (project_rates(mu, self.budget.mu_avg, self.mu_min),
                project_capacities(cap, self.budget.cap_avg))

    def run(self, mu, cap, rng):
        """
        Anneal from a feasible start.

        Returns:
            tuple: (best mu, best cap, best loss)
        """
        config = self.config
        current = self.score(mu, cap)
        best_mu, best_cap, best = mu, cap, current
        temperature = config.initial_temperature * (abs(current) or 1.0)
        greedy_from = int(config.iterations * (1.0 - config.greedy_fraction))
        for step in range(config.iterations):
            candidate_mu, candidate_cap = self.propose(mu, cap, rng)
            score = self.score(candidate_mu, candidate_cap)
            delta = score - current
            hot = step < greedy_from and temperature > 0
            if delta <= 0 or (hot and rng.random() < math.exp(-delta / temperature)):
                mu, cap, current = candidate_mu, candidate_cap, score
                if score < best:
                    best_mu, best_cap, best = mu, cap, score
            temperature *= config.cooling
            if step % 5000 == 0:
                logger.debug("anneal step %d: current=%.4f best=%.4f T=%.3g", step, current, best, temperature)
        return best_mu, best_cap, self.loss(best_mu, best_cap)


def optimal_allocation(topology, budget, opt=None):
    """
    Minimize the analytic network loss by simulated annealing.

    The search starts from the almost-fair allocation, with rates raised to
    the floor mu_floor * mu, and keeps the best point seen. When nothing beats
    almost-fair, that floored start is returned. Restarts use
    independent streams derived from (seed, restart index); the lowest loss
    wins and ties go to the lowest restart index.

    Args:
        topology: NetworkTopology
        budget: ResourceBudget
        opt: OptimizerConfig (defaults from settings)
    """
    opt = opt or OptimizerConfig()
    fair = almost_fair_allocation(topology, budget)
    annealer = AllocationAnnealer(topology, budget, opt)
    fair_loss = annealer.loss(fair.mu, fair.cap)

    start_mu = project_rates(fair.mu, budget.mu_avg, annealer.mu_min)
    start_cap = project_capacities(fair.cap, budget.cap_avg)
    best = None
    for restart in range(opt.restarts):
        rng = np.random.default_rng([opt.seed, restart])
        mu, cap, loss = annealer.run(start_mu, start_cap, rng)
        logger.debug("restart %d finished with loss %.6g (fair %.6g)", restart, loss, fair_loss)
        if best is None or loss < best[2]:
            best = (mu, cap, loss)

    mu, cap, loss = best
    if not loss < fair_loss:
        # almost-fair itself may hold rates below the floor
        return HarvestingAllocation(start_mu, start_cap, 'optimal')
    return HarvestingAllocation(mu, cap, 'optimal')
