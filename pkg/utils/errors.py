"""
Exception hierarchy shared by the frontend, the solver, the engines and the CLI.

The CLI maps these onto exit codes:
- FrontendError (and missing files, bad flags) -> 2
- AuditFailure / ReplayFailure                 -> 4
Engines never let ResourceLimit escape: it becomes an Inconclusive verdict.
"""

from typing import Optional


class FarcheckError(Exception):
    """Base class for every error raised by farcheck."""


class FrontendError(FarcheckError):
    """A diagnostic about the input file, with an optional source position."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"{self.line}:{self.column}: {self.message}"


class FcubSyntaxError(FrontendError):
    pass


class UndeclaredNameError(FrontendError):
    def __init__(self, name: str, line: Optional[int] = None, column: Optional[int] = None):
        self.name = name
        super().__init__(f"undeclared identifier '{name}'", line, column)


class SortError(FrontendError):
    pass


class DuplicateDeclError(FrontendError):
    def __init__(self, name: str, line: Optional[int] = None, column: Optional[int] = None,
                 what: str = 'declared'):
        self.name = name
        super().__init__(f"'{name}' is {what} more than once", line, column)


class UnsupportedError(FrontendError):
    """Input that parses but lies outside the supported fragment."""


class ResourceLimit(FarcheckError):
    """`reason` is the short token shown in INCONCLUSIVE(reason)."""

    def __init__(self, reason: str, detail: Optional[str] = None):
        self.reason = reason
        super().__init__(detail or reason)


class StateLimit(ResourceLimit):
    pass


class AuditFailure(FarcheckError):
    """A post-verdict re-check failed: the engine produced a wrong certificate."""


class ReplayFailure(FarcheckError):
    """An Unsafe trace did not replay on the explicit-state semantics."""


class IllFormedTrace(FarcheckError):
    def __init__(self, step: int, transition: str):
        self.step = step
        self.transition = transition
        super().__init__(f"transition {transition} is disabled at step {step}")
