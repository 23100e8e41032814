"""Exception hierarchy shared by all modules."""


class BigJumpError(Exception):
    pass


class ParameterError(BigJumpError, ValueError):
    """A family parameter lies outside its admissible range."""


class DomainError(BigJumpError, ValueError):
    """A function was evaluated outside its domain."""


class NotNormalizedError(BigJumpError):
    pass


class DivergenceError(BigJumpError):
    """Partial sums failed to converge within the configured budget."""


class BudgetError(BigJumpError):
    """A requested array or term count exceeds the configured cap."""


class OrderError(BigJumpError, ValueError):
    """Not enough cumulants (or series terms) for the requested order."""


class NoRootError(BigJumpError):
    """The equation has no root in the admissible range."""


class BracketError(BigJumpError):
    """A sign change could not be located; carries the scanned interval."""

    def __init__(self, message, lo=None, hi=None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi


class NonInvertibleError(BigJumpError, ValueError):
    pass


class SlitError(BigJumpError, ValueError):
    """The point lies on the branch cut [1, inf)."""


class QuadratureError(BigJumpError):
    pass


class BelowCLTWindowError(BigJumpError, ValueError):
    """N is too close to the central-limit window for any regime formula."""


class ConfigError(BigJumpError, ValueError):
    pass
