"""Shared exception types."""


class InstanceTooLargeError(RuntimeError):
    """Raised when an exact computation would exceed the configured state cap."""


class InternalInvariantError(RuntimeError):
    """Raised when a structural invariant fails at runtime (e.g. a cycle
    tripwire fires); always indicates a bug, never bad user input."""


class DegeneracyError(RuntimeError):
    """Raised when a simplex turns out degenerate: singular spanning system,
    nonpositive axis intersection, or an ambiguous pivot facet."""


class GeneralPositionError(RuntimeError):
    """Raised when a point that is not a member of the current simplex lies
    exactly on its spanning hyperplane."""
