"""Exception types shared across the package."""


class EqlabError(Exception):
    """Base class for all package errors."""


class CollisionError(EqlabError, ValueError):
    """Two bodies coincide (or nearly so)."""


class PreconditionError(EqlabError, ValueError):
    """An input violates an operation's precondition."""


class NumericalError(EqlabError, RuntimeError):
    """A numerical procedure failed; ``diagnostics`` carries the details."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
