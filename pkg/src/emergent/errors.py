"""Exception types shared across the library and mapped to CLI exit codes."""


class ValidationError(ValueError):
    """Rejected input: bad shapes, broken preconditions, malformed configs.

    The CLI maps this to exit code 2.
    """


class DimensionalError(ValidationError):
    """A requested quantity is not dimensionless in the requested unit system
    and no explicit override was given."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed to reach its tolerance.

    Carries whatever partial result was available so callers can report it.
    The CLI maps this to exit code 3.
    """

    def __init__(self, message, partial=None, diagnostics=None):
        super().__init__(message)
        self.partial = partial
        self.diagnostics = dict(diagnostics or {})
