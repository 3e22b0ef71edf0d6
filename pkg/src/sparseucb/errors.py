"""Shared exception types."""


class CorruptionError(RuntimeError):
    """Internal numerical state is inconsistent (e.g. Gram matrix lost
    positive definiteness). Not recoverable by the caller."""


class ProtocolError(RuntimeError):
    """A round-protocol method was called out of order (e.g. reward supplied
    before an action was chosen, or observe before predict)."""


class LadderTooShortError(ValueError):
    """The requested radius exceeds the top level of the ladder; the caller
    must construct a ladder with more levels."""
