"""Exception hierarchy shared by all hoplab modules.

The CLI maps these onto its exit-code contract: configuration problems exit
with code 2, numerical or capacity failures with code 3.
"""


class HoplabError(Exception):
    """Base class for all hoplab errors."""


class DomainError(HoplabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(HoplabError, RuntimeError):
    """A request exceeds a configured enumeration/memory budget."""


class NumericalError(HoplabError, RuntimeError):
    """An iterative numerical procedure failed to converge or certify."""


class ConfigError(HoplabError, ValueError):
    """An experiment configuration is malformed or incomplete."""
