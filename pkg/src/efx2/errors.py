"""Exception hierarchy shared by the solver and the command line.

Every class carries the exit code the CLI reports for it, so scripts can rely
on a stable contract.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional


class EfxError(Exception):
    """Base class for every error raised by efx2."""

    exit_code = 1


class FormatError(EfxError, ValueError):
    """Malformed JSON document, rational token or structure."""

    exit_code = 2


class ValidationError(EfxError, ValueError):
    """Well-formed input that violates an instance or allocation invariant."""

    exit_code = 3

    def __init__(self, problems: List[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems) or "invalid input")


class StepLimitExceeded(EfxError):
    """The improvement loop hit its step cap before the pool emptied."""

    exit_code = 4

    def __init__(self, limit: int, trace: Optional[List[Dict[str, Any]]] = None):
        self.limit = limit
        self.trace = trace or []
        super().__init__(f"step limit of {limit} reached before allocation completed")


class InvariantViolation(EfxError):
    """A theorem-guaranteed property failed; this is always a solver bug."""

    exit_code = 5

    def __init__(self, message: str, trace: Optional[List[Dict[str, Any]]] = None):
        self.trace = trace or []
        super().__init__(message)


class PreconditionError(EfxError, ValueError):
    """An operation was called outside its documented precondition."""

    exit_code = 5


class OracleTooLarge(EfxError):
    """Brute-force enumeration would exceed the configured cap."""

    exit_code = 6

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"instance too large for oracle: {size} assignments > cap {cap}")
