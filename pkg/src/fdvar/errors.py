"""Error types shared across the package.

Plain ``ValueError`` is used for domain errors (bad arguments, malformed
inputs); the classes below mark failures of the numerical machinery itself.
"""


class CapacityError(RuntimeError):
    """A requested grid would exceed the configured memory budget."""


class SolverError(RuntimeError):
    """A linear solve failed or did not meet its accuracy contract."""


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested accuracy."""
