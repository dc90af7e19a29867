"""Verdicts shared by the FAR engine and the oracles, and their exit codes."""

from dataclasses import dataclass, field
from typing import Dict, Tuple, Union

from logic.worlds import World

EXIT_SAFE = 0
EXIT_UNSAFE = 10
EXIT_INCONCLUSIVE = 20
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3
EXIT_ENGINE_BUG = 4


@dataclass(frozen=True)
class TraceStep:
    transition: str
    procs: Tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.transition}({','.join(str(p) for p in self.procs)})"


@dataclass(frozen=True)
class Safe:
    invariant: Tuple[World, ...] = ()
    stats: Dict[str, int] = field(default_factory=dict, compare=False)

    @property
    def token(self) -> str:
        return 'SAFE'


@dataclass(frozen=True)
class Unsafe:
    trace: Tuple[TraceStep, ...]
    procs: int
    stats: Dict[str, int] = field(default_factory=dict, compare=False)

    @property
    def token(self) -> str:
        return 'UNSAFE'


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    stats: Dict[str, int] = field(default_factory=dict, compare=False)

    @property
    def token(self) -> str:
        return f"INCONCLUSIVE({self.reason})"


Verdict = Union[Safe, Unsafe, Inconclusive]


def exit_code(verdict: Verdict) -> int:
    if isinstance(verdict, Safe):
        return EXIT_SAFE
    if isinstance(verdict, Unsafe):
        return EXIT_UNSAFE
    return EXIT_INCONCLUSIVE


def kind(verdict: Verdict) -> str:
    """SAFE, UNSAFE or INCONCLUSIVE without the reason."""
    return verdict.token.split('(')[0]
