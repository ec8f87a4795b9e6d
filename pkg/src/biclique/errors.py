"""Exception types shared across the package.

Every error carries the process exit code the command-line tool reports for it.
"""


class BicliqueError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(BicliqueError, ValueError):
    """Invalid parameters or configuration."""

    exit_code = 1


class OrderParityError(ConfigError):
    """An even tensor order was required but an odd one was given."""


class SizeGuardError(ConfigError):
    """A dense tensor would exceed the configured entry budget."""


class DataError(BicliqueError, ValueError):
    """Malformed or unusable input data."""

    exit_code = 2


class ContractConventionError(DataError):
    """A tensor lacks the symmetry required by a contraction."""


class NegativeWeightError(DataError):
    """Hyperedge weights must be positive."""


class DegeneratePartitionError(DataError):
    """A partition has an empty or zero-volume part."""


class NumericalError(BicliqueError, ArithmeticError):
    """A numerical step failed (nonpositive degree, non-finite values)."""

    exit_code = 3


class DegreeError(NumericalError):
    """A vertex has nonpositive degree, so degree normalization is undefined."""


class OracleViolation(BicliqueError, AssertionError):
    """An invariant cross-check failed."""

    exit_code = 4
