"""
Closed-form M|M|1|N energy queue.

Energy packets arrive at rate mu and are consumed by reports at rate theta.
With alpha = mu / theta the stationary probability of an empty store is

    p = (1 - alpha) / (1 - alpha^(N+1))

which is the probability that an arriving report is dropped.
"""

import math

from config.settings import UNIT_RATIO_TOLERANCE
from models.errors import DomainError


def _check(alpha, n):
    if not math.isfinite(alpha) or alpha < 0:
        raise DomainError(f"queue ratio must be finite and non-negative, got {alpha}")
    if not math.isfinite(n) or n < 1:
        raise DomainError(f"capacity must be finite and at least 1, got {n}")


def blocking_probability(alpha, n):
    """
    Probability that the energy queue is empty.

    Args:
        alpha: ratio of energy arrival rate to consumption rate, >= 0
        n: storage capacity in energy packets (real-valued), >= 1

    Returns:
        float: p in [0, 1]; 1 for alpha = 0 and 1/(n+1) at alpha = 1
    """
    alpha = float(alpha)
    n = float(n)
    _check(alpha, n)
    if alpha == 0.0:
        return 1.0
    eps = alpha - 1.0
    if abs(eps) < UNIT_RATIO_TOLERANCE:
        # first-order expansion around the removable singularity
        return 1.0 / ((n + 1.0) * (1.0 + 0.5 * n * eps))
    exponent = (n + 1.0) * math.log(alpha)
    if alpha < 1.0:
        p = (1.0 - alpha) / -math.expm1(exponent)
    else:
        # (alpha - 1) / (alpha^(n+1) - 1) in the log domain so huge n underflows to 0
        log_p = math.log(eps) - exponent - math.log(-math.expm1(-exponent))
        p = math.exp(log_p)
    return min(1.0, max(0.0, p))


def effective_throughput_factor(alpha, n):
    """
    Share of arriving reports that find energy, (alpha - alpha^(n+1)) / (1 - alpha^(n+1)).

    Equals 1 - blocking_probability(alpha, n); n/(n+1) at alpha = 1.
    """
    alpha = float(alpha)
    n = float(n)
    _check(alpha, n)
    if alpha == 0.0:
        return 0.0
    eps = alpha - 1.0
    if abs(eps) < UNIT_RATIO_TOLERANCE:
        return 1.0 - blocking_probability(alpha, n)
    if alpha < 1.0:
        log_alpha = math.log(alpha)
        return alpha * math.expm1(n * log_alpha) / math.expm1((n + 1.0) * log_alpha)
    return 1.0 - blocking_probability(alpha, n)


def queue_ratio(mu, theta):
    """
    alpha = mu / theta for one node.

    A node without traffic never drops anything, which is the alpha -> inf limit;
    math.inf is returned so callers can map it to p = 0.
    """
    if theta <= 0:
        return math.inf
    return mu / theta


def node_loss(mu, theta, n):
    """Blocking probability of a node with harvest rate mu, traffic theta and capacity n."""
    alpha = queue_ratio(mu, theta)
    if math.isinf(alpha):
        return 0.0
    return blocking_probability(alpha, n)
