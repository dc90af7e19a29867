"""
Explicit-state semantics at a fixed number of processes N.

States are concrete tuples; transitions are fired directly from the core
system's updates without any cube reasoning, so this is an independent
reading of the model. Used for breadth-first search, trace replay and the
concrete audit of an invariant.
"""

import itertools
import logging
import time
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from logic.cubes import Cube
from logic.system import CoreSystem, Transition
from logic.terms import (
    PROC, ArrayRead, CaseIndex, EnumConst, GlobalVar, Literal, ProcParam, Term,
)
from logic.worlds import Base, World
from services.verdicts import Safe, TraceStep, Unsafe, Verdict
from utils.config import DEFAULT_STATE_LIMIT, EXHAUSTIVE_AUDIT_LIMIT
from utils.errors import IllFormedTrace, StateLimit

logger = logging.getLogger(__name__)

Value = object  # a constructor name or a process number


@dataclass(frozen=True)
class ConcreteState:
    globals: Tuple[Value, ...]
    arrays: Tuple[Tuple[Value, ...], ...]


class ExplicitModel:
    """The finite instance of a system with processes 0..n-1."""

    def __init__(self, system: CoreSystem, n: int):
        self.system = system
        self.n = n
        self.global_index: Dict[str, int] = {g.name: i for i, g in enumerate(system.globals)}
        self.array_index: Dict[str, int] = {name: i for i, (name, _) in enumerate(system.arrays)}

    # evaluation

    def eval_term(self, state: ConcreteState, term: Term, binding: Sequence[int],
                  cell: Optional[int] = None) -> Value:
        if isinstance(term, GlobalVar):
            return state.globals[self.global_index[term.name]]
        if isinstance(term, ArrayRead):
            index = cell if isinstance(term.index, CaseIndex) else binding[term.index.index]
            return state.arrays[self.array_index[term.array]][index]
        if isinstance(term, ProcParam):
            return binding[term.index]
        if isinstance(term, CaseIndex):
            return cell
        return term.value

    def holds(self, state: ConcreteState, lit: Literal, binding: Sequence[int]) -> bool:
        equal = self.eval_term(state, lit.lhs, binding) == self.eval_term(state, lit.rhs, binding)
        return equal if lit.positive else not equal

    def holds_cube(self, state: ConcreteState, cube: Cube) -> bool:
        if cube.bottom:
            return False
        return any(all(self.holds(state, lit, binding) for lit in cube.literals)
                   for binding in itertools.permutations(range(self.n), cube.nprocs))

    def init_holds(self, state: ConcreteState) -> bool:
        init = self.system.init
        if init.contradictory:
            return False
        bindings = [(p,) for p in range(self.n)] if init.nparams else [()]
        return all(self.holds(state, lit, binding) for binding in bindings for lit in init.literals)

    def holds_world(self, state: ConcreteState, world: World) -> bool:
        if world.base is Base.BOTTOM:
            return False
        if world.base is Base.INIT and not self.init_holds(state):
            return False
        return not any(self.holds_cube(state, cube) for cube in world.negated)

    def is_unsafe(self, state: ConcreteState) -> bool:
        return self.holds_cube(state, self.system.unsafe)

    # state spaces

    def _domain(self, sort) -> List[Value]:
        return list(range(self.n)) if sort == PROC else list(sort.constructors)

    def _init_fixed(self) -> Tuple[Dict[str, Value], Dict[str, Value]]:
        """Values pinned by init literals `x = C` or `a[p] = C`."""
        globals_fixed: Dict[str, Value] = {}
        arrays_fixed: Dict[str, Value] = {}
        init = self.system.init
        for lit in init.literals:
            if not lit.positive or not isinstance(lit.rhs, EnumConst):
                continue
            if isinstance(lit.lhs, GlobalVar):
                globals_fixed[lit.lhs.name] = lit.rhs.value
            elif isinstance(lit.lhs, ArrayRead) and init.nparams:
                arrays_fixed[lit.lhs.array] = lit.rhs.value
        return globals_fixed, arrays_fixed

    def _states(self, globals_fixed=None, arrays_fixed=None) -> Iterator[ConcreteState]:
        globals_fixed = globals_fixed or {}
        arrays_fixed = arrays_fixed or {}
        global_domains = [[globals_fixed[g.name]] if g.name in globals_fixed else self._domain(g.sort)
                          for g in self.system.globals]
        cell_domains = []
        for name, sort in self.system.arrays:
            domain = [arrays_fixed[name]] if name in arrays_fixed else self._domain(sort)
            cell_domains.extend([domain] * self.n)
        width = self.n
        for values in itertools.product(*global_domains):
            for cells in itertools.product(*cell_domains):
                arrays = tuple(tuple(cells[i * width:(i + 1) * width]) for i in range(len(self.system.arrays)))
                yield ConcreteState(tuple(values), arrays)

    def state_space_size(self) -> int:
        size = 1
        for g in self.system.globals:
            size *= len(self._domain(g.sort))
        for _, sort in self.system.arrays:
            size *= len(self._domain(sort)) ** self.n
        return size

    def all_states(self) -> Iterator[ConcreteState]:
        return self._states()

    def initial_states(self) -> List[ConcreteState]:
        if self.system.init.contradictory:
            return []
        return [s for s in self._states(*self._init_fixed()) if self.init_holds(s)]

    # transitions

    def fire(self, state: ConcreteState, tr: Transition, procs: Sequence[int]) -> Optional[ConcreteState]:
        if tr.guard.bottom or not all(self.holds(state, lit, procs) for lit in tr.guard.literals):
            return None
        new_globals = tuple(self.eval_term(state, term, procs) for _, term in tr.global_updates)
        new_arrays = []
        for name, update in tr.array_updates:
            row = []
            for cell in range(self.n):
                chosen = update.default
                for param, term in update.cases:
                    if procs[param] == cell:
                        chosen = term
                        break
                row.append(self.eval_term(state, chosen, procs, cell))
            new_arrays.append(tuple(row))
        return ConcreteState(new_globals, tuple(new_arrays))

    def successors(self, state: ConcreteState) -> Iterator[Tuple[TraceStep, ConcreteState]]:
        for tr in self.system.transitions:
            for procs in itertools.permutations(range(self.n), tr.nparams):
                nxt = self.fire(state, tr, procs)
                if nxt is not None:
                    yield TraceStep(tr.name, procs), nxt


def explicit_reach(system: CoreSystem, n: int, state_limit: int = DEFAULT_STATE_LIMIT) -> Verdict:
    """Breadth-first search at N = n; Unsafe verdicts carry a shortest trace."""
    if n < system.max_arity:
        raise ValueError(f"{system.name} needs at least {system.max_arity} processes, got {n}")
    started = time.monotonic()
    model = ExplicitModel(system, n)
    parents: Dict[ConcreteState, Optional[Tuple[ConcreteState, TraceStep]]] = {}
    queue = deque()
    found = None
    for state in model.initial_states():
        if state in parents:
            continue
        parents[state] = None
        if model.is_unsafe(state):
            found = state
            break
        queue.append(state)
    while queue and found is None:
        state = queue.popleft()
        for step, nxt in model.successors(state):
            if nxt in parents:
                continue
            parents[nxt] = (state, step)
            if len(parents) > state_limit:
                raise StateLimit('state-limit', f"more than {state_limit} reachable states")
            if model.is_unsafe(nxt):
                found = nxt
                break
            queue.append(nxt)
    stats = {'states': len(parents), 'elapsed_ms': int((time.monotonic() - started) * 1000)}
    logger.info('explicit search of %s at N=%d: %d states', system.name, n, len(parents))
    if found is None:
        return Safe((), stats)
    steps: List[TraceStep] = []
    while parents[found] is not None:
        found, step = parents[found]
        steps.append(step)
    return Unsafe(tuple(reversed(steps)), n, stats)


def replay_trace(system: CoreSystem, trace: Sequence[TraceStep], n: int) -> bool:
    """
    True when firing the steps from some initial state ends in an unsafe
    state. Raises IllFormedTrace when no initial state gets through, naming
    the furthest step that was disabled.
    """
    for step in trace:
        tr = system.transition(step.transition)
        if len(step.procs) != tr.nparams or len(set(step.procs)) != len(step.procs) \
                or any(p < 0 or p >= n for p in step.procs):
            raise ValueError(f"step {step} does not fit {tr.nparams} distinct processes below {n}")
    model = ExplicitModel(system, n)
    furthest = -1
    completed = False
    for state in model.initial_states():
        current = state
        for k, step in enumerate(trace):
            current = model.fire(current, system.transition(step.transition), step.procs)
            if current is None:
                furthest = max(furthest, k)
                break
        else:
            completed = True
            if model.is_unsafe(current):
                return True
    if trace and not completed and furthest >= 0:
        raise IllFormedTrace(furthest, trace[furthest].transition)
    return False


def audit_invariant(system: CoreSystem, worlds: Sequence[World], n: int,
                    exhaustive_limit: int = EXHAUSTIVE_AUDIT_LIMIT) -> bool:
    """
    Concrete check of an invariant given as a disjunction of worlds: every
    initial state satisfies it, no state satisfying it is unsafe, and it is
    closed under every transition. Closure is checked on all states when the
    instance has at most `exhaustive_limit` states, else on reachable ones.
    """
    model = ExplicitModel(system, n)

    def theta(state: ConcreteState) -> bool:
        return any(model.holds_world(state, world) for world in worlds)

    initial = model.initial_states()
    if not all(theta(s) for s in initial):
        logger.warning('an initial state falls outside the invariant at N=%d', n)
        return False
    if model.state_space_size() <= exhaustive_limit:
        candidates = model.all_states()
    else:
        candidates = _reachable(model, initial)
    for state in candidates:
        if not theta(state):
            continue
        if model.is_unsafe(state):
            logger.warning('the invariant admits an unsafe state at N=%d', n)
            return False
        for step, nxt in model.successors(state):
            if not theta(nxt):
                logger.warning('the invariant is not closed under %s at N=%d', step, n)
                return False
    return True


def _reachable(model: ExplicitModel, initial: List[ConcreteState]) -> Iterator[ConcreteState]:
    seen = set(initial)
    queue = deque(initial)
    while queue:
        state = queue.popleft()
        yield state
        for _, nxt in model.successors(state):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
