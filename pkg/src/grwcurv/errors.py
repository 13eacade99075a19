"""Exception types raised across the package."""


class RangeError(ValueError):
    """An index or order argument falls outside its admissible range."""


class NumericError(ArithmeticError):
    """A linear-algebra routine failed (eigen-solver, Cholesky, ...)."""


class GeometryError(ValueError):
    """The sampled hypersurface violates a geometric requirement (e.g. not spacelike)."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ConfigurationError(ValueError):
    """Grid, scenario or run configuration is unusable."""


class PreconditionError(ValueError):
    """An operation was called with inputs outside its hypotheses."""
