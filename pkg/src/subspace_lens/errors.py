"""Exception hierarchy shared by all pipeline stages.

ValidationError maps to CLI exit code 1, NumericalError to exit code 2.
"""


class SubspaceLensError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SubspaceLensError):
    """Malformed or out-of-contract input (bad CSV, dimension floor, bad k...)."""


class NumericalError(SubspaceLensError):
    """A numerical procedure failed (non-convergence, singular system...)."""


class ConvergenceError(NumericalError):
    """An optimization did not reach its required tolerance."""


class SchemaError(ValidationError):
    """A scene document could not be parsed or has an incompatible schema."""
