"""
Run configuration. Tunable after profiling on the bundled corpus.

Everything comes from command-line flags; there is no environment or file
based configuration so that two runs with the same flags behave the same.
"""

from dataclasses import dataclass, replace
from typing import Optional, Tuple


ENGINES = ('far', 'backward', 'explicit', 'diff')
QUEUE_ORDERS = ('procs', 'fifo')

DEFAULT_MAX_STEPS = 100000
DEFAULT_BRANCH_BUDGET = 2 ** 16
# Largest bad cube (bound process variables) accepted by pre-image.
DEFAULT_MAX_CUBE_PROCS = 4
DEFAULT_STATE_LIMIT = 10 ** 7
# Concrete invariant audits enumerate every state up to this size, reachable ones beyond.
EXHAUSTIVE_AUDIT_LIMIT = 50000
# Instance sizes the explicit oracle runs at in differential mode.
DIFF_PROCS: Tuple[int, ...] = (2, 3)
# Entries kept by the canonical-form cache of logic.cubes.
CANONICAL_CACHE_SIZE = 2 ** 16


@dataclass(frozen=True)
class RunConfig:
    engine: str = 'far'
    procs: Optional[int] = None
    max_steps: int = DEFAULT_MAX_STEPS
    timeout_s: Optional[float] = None
    queue_order: str = 'procs'
    dot_path: Optional[str] = None
    hide_sink: bool = False
    stats_path: Optional[str] = None
    trace_path: Optional[str] = None
    invariant_path: Optional[str] = None
    dump_queries_path: Optional[str] = None
    check_graph: bool = False
    verbosity: int = 0
    branch_budget: int = DEFAULT_BRANCH_BUDGET
    max_cube_procs: int = DEFAULT_MAX_CUBE_PROCS
    state_limit: int = DEFAULT_STATE_LIMIT

    def validate(self) -> None:
        """Raise ValueError when the flag combination is not usable."""
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine '{self.engine}'")
        if self.queue_order not in QUEUE_ORDERS:
            raise ValueError(f"unknown queue order '{self.queue_order}'")
        if self.engine == 'explicit' and self.procs is None:
            raise ValueError("--procs is required with --engine explicit")
        if self.engine != 'explicit' and self.procs is not None:
            raise ValueError("--procs only applies to --engine explicit")
        if self.procs is not None and self.procs < 1:
            raise ValueError("--procs must be positive")
        if self.max_steps < 1:
            raise ValueError("--max-steps must be positive")
        if self.timeout_s is not None and self.timeout_s <= 0:
            raise ValueError("--timeout must be positive")

    def with_engine(self, engine: str, procs: Optional[int] = None) -> 'RunConfig':
        return replace(self, engine=engine, procs=procs)
