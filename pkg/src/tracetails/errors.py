"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An argument violates an operation's documented precondition."""


class PoleError(ValueError):
    """Density evaluated at a pole (x = 0 with shape < 1)."""


class DegenerateDistributionError(ValueError):
    """All weights are zero; the law is a point mass at 0."""


class NumericalError(RuntimeError):
    """A numeric routine failed to reach its accuracy target."""


class RegionRefusal(ValueError):
    """A result would rely on a tail region that is not proved."""
