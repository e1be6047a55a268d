class UsageError(ValueError):
    """Caller violated a precondition (bad index sets, malformed input, ...)."""


class UnsupportedFieldError(UsageError):
    """Operation requires characteristic 0 but got a prime field, or vice versa."""


class DegreeOverflowError(UsageError):
    """An axiom exceeds the degree bound of the saturation engine."""
