"""Exception hierarchy shared across the package.

ConfigurationError covers invalid user input (bad parameters, malformed
specs); NumericalError covers runtime failures of well-formed configurations
(zero mass, empty horizons, fit degeneracies). The CLI maps them to distinct
exit codes.
"""


class WalklabError(Exception):
    """Base class for all package errors."""


class ConfigurationError(WalklabError):
    """Invalid configuration or parameters."""


class NumericalError(WalklabError):
    """A well-formed computation failed numerically."""


class NoAbsorptionError(NumericalError):
    """No probability was absorbed within the requested horizon."""


class EmptyStateError(NumericalError):
    """All probability mass has been absorbed; the state is empty."""
