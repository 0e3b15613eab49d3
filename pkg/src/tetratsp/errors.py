"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """Input parameters violate an assumption the construction relies on."""


class SizeGuardError(ValueError):
    """An exact method was asked to handle more vertices than it supports."""
