"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Input violates a documented precondition (shape, weight, range)."""


class DegenerateInput(ValueError):
    """Input matrix is numerically rank deficient."""


class InvalidOperation(ValueError):
    """Operation is not defined for this state/gate combination."""


class ResourceLimit(RuntimeError):
    """Requested size exceeds a configured dense-size cap."""
