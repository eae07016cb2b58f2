"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input: bad partition, bad matrix entry, out-of-range parameter."""


class DimensionError(ValidationError):
    """Shape mismatch or odd order where an even one is required."""


class DomainError(ValidationError):
    """Parameter outside the region where a formula is defined."""


class SizeGuardError(ValidationError):
    """Request exceeds the size an exhaustive routine is meant to handle."""


class CutoffError(ValidationError):
    """A truncation parameter is too small for the requested quantity."""


class NumericalFailure(ArithmeticError):
    """A computed value violates a structural guarantee beyond tolerance."""


class ResourceError(RuntimeError):
    """A search for an adequate cutoff or precision hit its ceiling."""
