"""Exception types shared across the package."""


class HolantError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HolantError, ValueError):
    """Invalid argument for the requested operation."""


class ArityError(DomainError):
    """Arity out of range or inconsistent with the data supplied."""


class BackendMismatch(HolantError, TypeError):
    """A value incompatible with the active scalar backend."""


class AnomalyError(HolantError):
    """An internal invariant believed impossible was violated.

    Raised loudly rather than papered over: seeing one of these means a
    structural assumption about the reduction machinery failed on the
    concrete input that is reported in the message.
    """


class GridError(HolantError, ValueError):
    """Malformed signature grid (unbound slot, double-bound slot, ...)."""
