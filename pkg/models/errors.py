"""
Exception hierarchy for the harvesting network toolkit.

Errors deriving from InvalidInputError describe bad user input and map to
exit code 2 on the command line; everything else maps to exit code 1.
"""


class HarvestNetError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(HarvestNetError):
    """Raised when an input file, argument or value is unusable."""


class ParseError(InvalidInputError):
    """Malformed serialized input. `location` points at the offending spot."""

    def __init__(self, message, location='$'):
        super().__init__(f"{location}: {message}")
        self.location = location


class TopologyValidationError(InvalidInputError):
    """A topology breaks one or more structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        listed = ", ".join(str(v) for v in self.violations)
        super().__init__(f"invalid topology: {listed}")


class ConfigError(InvalidInputError):
    """An experiment configuration is incomplete or out of range."""


class DomainError(InvalidInputError):
    """A numeric argument is outside the domain of a formula."""


class DisconnectedNetwork(InvalidInputError):
    """No connected deployment was found within the retry budget."""


class CyclicRouting(InvalidInputError):
    """The routing graph has a cycle, so no topological order exists."""


class NoTraffic(InvalidInputError):
    """Every generation rate is zero; there is nothing to allocate for."""


class InvalidCapacity(InvalidInputError):
    """A storage capacity rounds to fewer than one energy packet."""


class BracketFailure(HarvestNetError):
    """The almost-fair bracket end does not give f(alpha+) > 0."""
