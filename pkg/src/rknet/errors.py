"""Exception types shared by the library and the CLI.

Every error carries the process exit code the CLI returns for it:

    0 ok, 2 config, 3 validation, 4 numeric failure, 5 equivalence failure
"""

from __future__ import annotations

from typing import Sequence


class RknetError(Exception):
    exit_code = 1


class ConfigError(RknetError):
    exit_code = 2


class ShapeError(ConfigError):
    pass


class DepthMismatchError(ShapeError):
    pass


class UnknownTableauError(ConfigError, LookupError):
    def __init__(self, name: str, available: Sequence[str]):
        self.name = name
        self.available = list(available)
        super().__init__(f"unknown tableau {name!r}; available: {', '.join(self.available)}")


class ValidationError(RknetError):
    exit_code = 3

    def __init__(self, message: str, violations: Sequence[str] = ()):
        self.violations = list(violations)
        if self.violations:
            message = message + ":\n  " + "\n  ".join(self.violations)
        super().__init__(message)


class ParseError(ValidationError):
    pass


class IntegrationError(RknetError):
    exit_code = 4

    def __init__(self, reason: str, *, stage: int | None = None, step: int | None = None):
        self.reason = reason
        self.stage = stage
        self.step = step
        where = []
        if step is not None:
            where.append(f"step {step}")
        if stage is not None:
            where.append(f"stage {stage}")
        message = f"{reason} ({', '.join(where)})" if where else reason
        super().__init__(message)

    def at_step(self, step: int) -> "IntegrationError":
        return IntegrationError(self.reason, stage=self.stage, step=step)


class EquivalenceError(RknetError):
    exit_code = 5
