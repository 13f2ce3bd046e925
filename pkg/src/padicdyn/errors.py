"""Exception taxonomy shared by all modules."""


class PadicDynError(Exception):
    """Base class for all library errors."""


class DomainError(PadicDynError):
    """Input lies outside the mathematical domain of an operation."""


class IntegrityError(PadicDynError):
    """Two independent computations of the same quantity disagreed.

    This is never expected; it indicates an implementation bug, not bad input.
    """


class ResourceError(PadicDynError):
    """An exhaustive sweep would exceed its configured size cap."""
