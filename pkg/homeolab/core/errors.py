"""
Exception hierarchy for homeolab.

Library code raises these; the CLI maps them onto exit codes.
"""

from typing import Optional


class HomeolabError(Exception):
    """Root of all homeolab errors."""


class MapFormatError(HomeolabError, ValueError):
    """Payload text is not well-formed (bad JSON, bad rational, wrong shape)."""


class InvariantViolation(HomeolabError, ValueError):
    """A structurally valid payload breaks a mathematical invariant.

    Args:
        violation (str): Short name of the broken invariant, e.g. ``monotonicity``
        message (str): Human-readable detail
    """

    def __init__(self, violation: str, message: str):
        super().__init__(f"{violation}: {message}")
        self.violation = violation
        self.detail = message


class PreconditionError(HomeolabError, ValueError):
    """An operation was called outside its precondition."""


class NoPeriodicPoints(PreconditionError):
    """The requested period has no periodic points."""


class DimensionMismatch(PreconditionError):
    """Two operators act on spaces of different dimension."""


class PieceCeilingExceeded(HomeolabError):
    """A piecewise-linear result would exceed the configured piece-count ceiling."""

    def __init__(self, pieces: int, ceiling: int, reached_q: Optional[int] = None):
        where = f" at q={reached_q}" if reached_q is not None else ""
        super().__init__(f"piece count {pieces} exceeds ceiling {ceiling}{where}")
        self.pieces = pieces
        self.ceiling = ceiling
        self.reached_q = reached_q

    def at_q(self, q: int) -> "PieceCeilingExceeded":
        """Return a copy annotated with the period reached when the ceiling fired."""
        return PieceCeilingExceeded(self.pieces, self.ceiling, reached_q=q)


class PayloadReadError(HomeolabError, OSError):
    """A payload file could not be read (missing, unreadable, not UTF-8)."""
