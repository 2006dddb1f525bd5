"""Exception types raised by the engine.

Every malformed input maps to a distinct, testable error class; readers never
crash with bare parse exceptions.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""


class ValidationError(EngineError, ValueError):
    """An argument or domain object violates its invariants."""


class ShapeMismatch(EngineError, ValueError):
    """Two volumes that must share dims do not."""

    def __init__(self, left: tuple, right: tuple):
        self.left = tuple(left)
        self.right = tuple(right)
        super().__init__(f"volume dims differ: {self.left} vs {self.right}")


class EmptyForeground(EngineError, ValueError):
    """A foreground-restricted metric was asked about an all-background mask."""


class InsufficientData(EngineError, ValueError):
    """Fewer observations than the operation needs."""


class UnknownSample(EngineError, LookupError):
    """A sample id that is not present in the store."""


class IncompleteWindow(EngineError, ValueError):
    """A trailing window references epochs that were never recorded."""

    def __init__(self, sample_id: str, missing_epochs: list[int]):
        self.sample_id = sample_id
        self.missing_epochs = list(missing_epochs)
        shown = ", ".join(str(e) for e in self.missing_epochs[:10])
        super().__init__(
            f"window for sample {sample_id!r} is missing epochs: {shown}"
        )


class SampleSetMismatch(EngineError, ValueError):
    """Two snapshots that must cover the same samples do not."""

    def __init__(self, only_left: set[str], only_right: set[str]):
        self.only_left = set(only_left)
        self.only_right = set(only_right)
        super().__init__(
            "snapshots cover different samples; "
            f"only in first: {sorted(self.only_left)[:10]}, "
            f"only in second: {sorted(self.only_right)[:10]}"
        )


class RankingError(EngineError, ValueError):
    """Scores that cannot be ranked (NaN, empty input)."""


class FormatError(EngineError, ValueError):
    """A binary volume file violates its layout.

    ``kind`` names the corruption class, ``offset`` the byte where it was
    detected.
    """

    def __init__(self, kind: str, offset: int, detail: str):
        self.kind = kind
        self.offset = offset
        super().__init__(f"{kind} at byte {offset}: {detail}")


class StreamError(EngineError, ValueError):
    """A score-stream line violates its schema.

    ``line_no`` is 1-based; duplicate records also carry ``other_line_no``.
    """

    def __init__(self, line_no: int, detail: str, other_line_no: int | None = None):
        self.line_no = line_no
        self.other_line_no = other_line_no
        super().__init__(f"line {line_no}: {detail}")


class CalibrationError(EngineError, ValueError):
    """A corruption target that the volume cannot realize."""
