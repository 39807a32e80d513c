"""Exception types shared by every module."""

from __future__ import annotations


class RejectedInputError(ValueError):
    """An operation was called with arguments outside its precondition."""


class AcceptanceError(RuntimeError):
    """An acceptance check embedded in an experiment failed."""

    def __init__(self, failed: list[str], detail: str = "") -> None:
        self.failed = list(failed)
        message = "acceptance check(s) failed: " + ", ".join(self.failed)
        if detail:
            message += f" ({detail})"
        super().__init__(message)
