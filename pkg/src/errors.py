"""Exception hierarchy shared by all modules.

The CLI maps these to exit statuses; library code only raises.
"""
from __future__ import annotations

from pathlib import Path


class ScoreRecoveryError(Exception):
    """Base class for all errors raised by this package."""

    pass


class DataFormatError(ScoreRecoveryError):
    """Input file does not conform to its grammar.

    Carries the exact location so messages read ``file:line:column: reason``.
    """

    def __init__(
        self,
        message: str,
        path: str | Path | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        self.path = str(path) if path is not None else None
        self.line = line
        self.column = column
        self.reason = message
        super().__init__(self._format())

    def _format(self) -> str:
        location = []
        if self.path:
            location.append(self.path)
        if self.line is not None:
            location.append(str(self.line))
        if self.column is not None:
            location.append(str(self.column))
        if location:
            return f"{':'.join(location)}: {self.reason}"
        return self.reason


class InfeasibleError(ScoreRecoveryError):
    """A structural constraint (rectangles, degrees, connectivity) cannot be met."""

    pass


class RectangleError(ScoreRecoveryError):
    """A rectangle references an unobserved or out-of-range cell."""

    pass


class ConvergenceError(ScoreRecoveryError):
    """An iterative fit diverged."""

    pass


class UndefinedMetricError(ScoreRecoveryError, ValueError):
    """A metric is undefined for the given inputs (constant vector, missing class)."""

    pass


class LeakageError(ScoreRecoveryError):
    """Holdout pairs reached a training mask or a bootstrap resample."""

    pass
