"""Exception types shared across the package.

Every error raised on purpose derives from LanesafeError so callers can
catch the package's failures without also swallowing genuine bugs.
"""

from __future__ import annotations


class LanesafeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(LanesafeError, ValueError):
    """An argument is outside its documented domain."""


class DivisionDomainError(InvalidArgumentError):
    """A denominator that must be positive is zero or negative."""


class NotFoundError(LanesafeError, KeyError):
    """A lookup key (design speed, vehicle label, ...) is not in the table.

    The message lists the valid keys so the caller can correct the request
    without re-reading the data file.
    """

    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class InfeasibleGeometryError(LanesafeError):
    """The requested geometry admits no solution (e.g. vehicle wider than lane)."""


class InfeasibleBudgetError(LanesafeError):
    """An accuracy budget came out non-positive; the scenario cannot be met."""


class InvalidTreeError(LanesafeError):
    """A risk-allocation tree violates a structural invariant."""


class ConfigError(LanesafeError):
    """A config or data file failed to parse or validate.

    Carries the offending file and, when known, the line or section so the
    message points at the exact spot to fix.
    """

    def __init__(self, message: str, *, source: str | None = None,
                 line: int | None = None) -> None:
        loc = ""
        if source is not None:
            loc = f"{source}: " if line is None else f"{source}:{line}: "
        super().__init__(f"{loc}{message}")
        self.source = source
        self.line = line
