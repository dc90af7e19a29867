"""
FAR unwinding engine.

The unwinding starts with three vertices: the root ε (world init), the unsafe
vertex β (world ⊤, bad part {unsafe}) and the sink ω (world ⊥). Vertices are
popped from a priority queue; every transition either extends the vertex
towards β or sinks it into ω. An edge whose target has a bad part is closed:
it is covered by an existing vertex, the bad part is propagated backwards
to its source, or the edge is redirected to a new vertex whose world rules
the bad part out. The system is safe once the queue is empty; the worlds of
the vertices reachable from ε then form an inductive invariant.

Budgets: RunConfig.max_steps rule applications and RunConfig.timeout_s.
"""

import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from graphviz import Digraph

from logic.cubes import Cube, compact, make_cube, render_cube, subsumes
from logic.system import CoreSystem, Transition
from logic.worlds import World, entails_syntactically, strengthen
from oracles.explicit import replay_trace
from services.solver import Query, Solver
from services.traces import Link, concrete_steps
from services.transitions import (
    enabled, post_entails, post_intersects_bad, pre_image_with_origins,
)
from services.verdicts import Inconclusive, Safe, Unsafe, Verdict
from utils.config import RunConfig
from utils.errors import AuditFailure, IllFormedTrace, ReplayFailure, ResourceLimit

logger = logging.getLogger(__name__)

ROOT, UNSAFE, SINK = 0, 1, 2
_NAMES = {ROOT: 'ε', UNSAFE: 'β', SINK: 'ω'}


@dataclass(frozen=True)
class BadOrigin:
    """Why a cube is bad: firing `link` from it can land in `successor_cube` at `successor`."""
    link: Link
    successor: int
    successor_cube: Cube


@dataclass
class Vertex:
    id: int
    world: World
    bads: Dict[Cube, Optional[BadOrigin]] = field(default_factory=dict)
    # Bad cubes replaced by more general ones; kept so provenance chains stay walkable.
    retired: Dict[Cube, Optional[BadOrigin]] = field(default_factory=dict)
    parent: Optional[Tuple[int, str]] = None

    @property
    def name(self) -> str:
        return _NAMES.get(self.id, f"v{self.id}")

    def origin(self, cube: Cube) -> Optional[BadOrigin]:
        if cube in self.bads:
            return self.bads[cube]
        return self.retired[cube]


@dataclass(frozen=True)
class Covered:
    vertex: int


@dataclass(frozen=True)
class Bad:
    cubes: Tuple[Tuple[Cube, BadOrigin], ...]


@dataclass(frozen=True)
class Refined:
    vertex: int


CloseOutcome = Union[Covered, Bad, Refined]


class UnwindGraph:
    """Vertices with worlds and bad parts, and at most one edge per (vertex, transition)."""

    def __init__(self, system: CoreSystem):
        self.system = system
        self.vertices: List[Vertex] = []
        self.edges: Dict[Tuple[int, str], int] = {}
        self.add_vertex(World.initial(system.init))
        unsafe = self.add_vertex(World.top())
        unsafe.bads[system.unsafe] = None
        self.add_vertex(World.bottom())

    def vertex(self, vid: int) -> Vertex:
        return self.vertices[vid]

    def add_vertex(self, world: World, parent: Optional[Tuple[int, str]] = None) -> Vertex:
        vertex = Vertex(len(self.vertices), world, parent=parent)
        self.vertices.append(vertex)
        return vertex

    def set_edge(self, src: int, label: str, dst: int) -> None:
        self.edges[(src, label)] = dst

    def incoming(self, vid: int) -> List[Tuple[int, str]]:
        return [edge for edge, dst in self.edges.items() if dst == vid]

    def add_bads(self, vid: int, cubes) -> None:
        vertex = self.vertex(vid)
        for cube, origin in cubes:
            if cube in vertex.bads or any(subsumes(kept, cube) for kept in vertex.bads):
                continue
            for kept in [kept for kept in vertex.bads if subsumes(cube, kept)]:
                vertex.retired[kept] = vertex.bads.pop(kept)
            vertex.bads[cube] = origin

    def reachable_from_root(self) -> List[int]:
        seen = {ROOT}
        stack = [ROOT]
        while stack:
            vid = stack.pop()
            for (src, _), dst in self.edges.items():
                if src == vid and dst != SINK and dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return sorted(seen)

    def all_bad_cubes(self) -> List[Tuple[int, Cube]]:
        """Every cube ever placed in a bad part, vertex by vertex."""
        out = []
        for vertex in self.vertices:
            for cube in list(vertex.bads) + list(vertex.retired):
                out.append((vertex.id, cube))
        return out

    @property
    def created(self) -> int:
        return len(self.vertices) - 3


@dataclass
class EngineStats:
    covers: int = 0
    refines: int = 0
    bad_propagations: int = 0
    extends: int = 0
    sinks: int = 0
    steps: int = 0
    elapsed_ms: int = 0


class FarEngine:
    """Deterministic scheduling of the unwinding rules: main loop, unwind and close."""

    def __init__(self, system: CoreSystem, config: Optional[RunConfig] = None,
                 solver: Optional[Solver] = None):
        self.system = system
        self.config = config or RunConfig()
        self.solver = solver or Solver(branch_budget=self.config.branch_budget)
        self.graph = UnwindGraph(system)
        self.stats = EngineStats()
        self._queue: List[Tuple] = []
        self._seq = itertools.count()
        self._started = 0.0

    # bookkeeping

    def _tick(self) -> None:
        self.stats.steps += 1
        if self.stats.steps > self.config.max_steps:
            raise ResourceLimit('max-steps')
        timeout = self.config.timeout_s
        if timeout is not None and time.monotonic() - self._started > timeout:
            raise ResourceLimit('timeout')

    def _push(self, vid: int) -> None:
        seq = next(self._seq)
        if self.config.queue_order == 'fifo':
            key = (seq,)
        else:
            key = (self.graph.vertex(vid).world.min_procs(), seq)
        heapq.heappush(self._queue, (key, vid))

    def _pop(self) -> int:
        return heapq.heappop(self._queue)[1]

    def stats_dict(self, verdict: Verdict) -> Dict[str, object]:
        return {
            'engine': 'far',
            'verdict': verdict.token,
            'vertices_created': self.graph.created,
            'edges': len(self.graph.edges),
            'covers': self.stats.covers,
            'refines': self.stats.refines,
            'bad_propagations': self.stats.bad_propagations,
            'solver_calls': self.solver.calls,
            'elapsed_ms': self.stats.elapsed_ms,
        }

    # main loop

    def check(self) -> Verdict:
        self._started = time.monotonic()
        try:
            verdict = self._run()
        except ResourceLimit as exc:
            logger.info('FAR stopped on %s: %s', self.system.name, exc)
            verdict = Inconclusive(exc.reason)
        self.stats.elapsed_ms = int((time.monotonic() - self._started) * 1000)
        verdict.stats.update(self.stats_dict(verdict))
        logger.info('FAR %s on %s: %d vertices created, %d refines, %d covers',
                    verdict.token, self.system.name, self.graph.created,
                    self.stats.refines, self.stats.covers)
        return verdict

    def _run(self) -> Verdict:
        unsafe = self.system.unsafe
        if unsafe.bottom:
            logger.info('the unsafe formula of %s is contradictory', self.system.name)
            return Safe((World.top(),))
        root_world = self.graph.vertex(ROOT).world
        zero = self.solver.sat(Query(unsafe.nprocs, unsafe.literals, (root_world,)))
        if zero.is_sat:
            logger.info('an initial state is unsafe')
            procs = max(zero.model.universe, unsafe.nprocs, 1)
            if not replay_trace(self.system, (), procs):
                raise ReplayFailure(f"no initial state is unsafe at N={procs}")
            return Unsafe((), procs)
        self._push(ROOT)
        while self._queue:
            vid = self._pop()
            world = self.graph.vertex(vid).world
            for tr in self.system.transitions:
                self._tick()
                if enabled(world, tr, self.solver):
                    self.graph.set_edge(vid, tr.name, UNSAFE)
                    self.stats.extends += 1
                    logger.debug('extend %s -%s-> β', self.graph.vertex(vid).name, tr.name)
                    self._check_graph()
                    verdict = self.unwind(vid, tr.name)
                    if verdict is not None:
                        return verdict
                else:
                    self.graph.set_edge(vid, tr.name, SINK)
                    self.stats.sinks += 1
                    logger.debug('sink %s -%s-> ω', self.graph.vertex(vid).name, tr.name)
        return Safe(extract_invariant(self.graph, self.solver))

    def unwind(self, vid: int, label: str) -> Optional[Unsafe]:
        stack = [(vid, label)]
        while stack:
            src, name = stack.pop()
            dst = self.graph.edges[(src, name)]
            if self.graph.vertex(src).bads or not self.graph.vertex(dst).bads:
                continue
            self._tick()
            outcome = self.close(src, name, dst)
            if isinstance(outcome, Covered):
                self.graph.set_edge(src, name, outcome.vertex)
                self.stats.covers += 1
                logger.debug('cover %s -%s-> %s', self.graph.vertex(src).name, name,
                             self.graph.vertex(outcome.vertex).name)
                stack.append((src, name))
            elif isinstance(outcome, Bad):
                self.stats.bad_propagations += 1
                logger.debug('propagate %d bad cube(s) to %s', len(outcome.cubes), self.graph.vertex(src).name)
                if src == ROOT:
                    return self._unsafe(outcome)
                self.graph.add_bads(src, outcome.cubes)
                stack.extend(reversed(self.graph.incoming(src)))
            else:
                self.graph.set_edge(src, name, outcome.vertex)
                self.stats.refines += 1
                logger.debug('refine %s -%s-> %s: %s', self.graph.vertex(src).name, name,
                             self.graph.vertex(outcome.vertex).name, self.graph.vertex(outcome.vertex).world)
                self._push(outcome.vertex)
            self._check_graph()
        return None

    def close(self, src: int, label: str, dst: int) -> CloseOutcome:
        tr = self.system.transition(label)
        source = self.graph.vertex(src).world
        target = self.graph.vertex(dst)
        for candidate in self.graph.vertices:
            if candidate.id in (UNSAFE, SINK) or candidate.bads:
                continue
            if not entails_syntactically(candidate.world, target.world):
                continue
            if post_entails(source, tr, candidate.world, self.solver):
                return Covered(candidate.id)
        hits = [cube for cube in target.bads if post_intersects_bad(source, tr, cube, self.solver).is_sat]
        if hits:
            cubes = []
            for cube in hits:
                for pre in pre_image_with_origins(cube, tr, self.solver, self.config.max_cube_procs):
                    if self.solver.sat(Query(pre.cube.nprocs, pre.cube.literals, (source,))).is_sat:
                        origin = BadOrigin(Link(label, pre.params, pre.succ), dst, cube)
                        cubes.append((pre.cube, origin))
            if not cubes:
                raise AuditFailure(f"{label} reaches a bad cube of {target.name} but no pre-image cube "
                                   f"meets the world of {self.graph.vertex(src).name}")
            return Bad(tuple(cubes))
        world = target.world
        for cube in target.bads:
            world = strengthen(world, self.generalize(source, tr, target.world, cube))
        vertex = self.graph.add_vertex(world, parent=(src, label))
        return Refined(vertex.id)

    def generalize(self, source: World, tr: Transition, target: World, bad: Cube) -> Cube:
        """
        Drop literals of `bad` greedily while the source still cannot reach
        the remaining cube; a candidate must keep one literal and must not be
        excluded by the target world already.
        """
        taken = set(target.negated)
        kept = list(bad.literals)
        best = bad
        for lit in bad.literals:
            if len(kept) <= 1:
                break
            trial = [other for other in kept if other != lit]
            candidate = compact(make_cube(bad.nprocs, trial))
            if candidate.bottom or candidate in taken:
                continue
            if post_entails(source, tr, strengthen(World.top(), candidate), self.solver):
                kept = trial
                best = candidate
        return best

    # traces and checks

    def links_from(self, vid: int, cube: Cube) -> List[Link]:
        links = []
        origin = self.graph.vertex(vid).origin(cube)
        while origin is not None:
            links.append(origin.link)
            origin = self.graph.vertex(origin.successor).origin(origin.successor_cube)
        return links

    def _unsafe(self, outcome: Bad) -> Unsafe:
        root_world = self.graph.vertex(ROOT).world
        for cube, origin in outcome.cubes:
            result = self.solver.sat(Query(cube.nprocs, cube.literals, (root_world,)))
            if not result.is_sat:
                continue
            links = [origin.link] + self.links_from(origin.successor, origin.successor_cube)
            trace = concrete_steps(cube.nprocs, links)
            procs = max(result.model.universe, cube.nprocs, 1)
            try:
                replayed = replay_trace(self.system, trace, procs)
            except (IllFormedTrace, ValueError) as exc:
                raise ReplayFailure(f"trace does not replay at N={procs}: {exc}") from exc
            if not replayed:
                raise ReplayFailure(f"trace {' '.join(map(str, trace))} does not reach unsafe at N={procs}")
            return Unsafe(trace, procs)
        raise AuditFailure('bad part reached the root but no pre-image cube meets the initial condition')

    def _check_graph(self) -> None:
        if not self.config.check_graph:
            return
        for (src, label), dst in self.graph.edges.items():
            tr = self.system.transition(label)
            world = self.graph.vertex(src).world
            if dst == SINK:
                if enabled(world, tr, self.solver):
                    raise AuditFailure(f"sink edge {self.graph.vertex(src).name} -{label}-> ω is enabled")
            elif dst != UNSAFE and not self.graph.vertex(dst).bads:
                if not post_entails(world, tr, self.graph.vertex(dst).world, self.solver):
                    raise AuditFailure(f"edge {self.graph.vertex(src).name} -{label}-> "
                                       f"{self.graph.vertex(dst).name} is not an abstraction")


def extract_invariant(graph: UnwindGraph, solver: Solver) -> Tuple[World, ...]:
    """
    Worlds of the vertices reachable from ε, after re-checking that every
    transition out of them is disabled or lands in the edge's target world.
    """
    system = graph.system
    reachable = graph.reachable_from_root()
    for vid in reachable:
        vertex = graph.vertex(vid)
        if vid == UNSAFE or vertex.bads:
            raise AuditFailure(f"{vertex.name} is reachable from the root and has a bad part")
        for tr in system.transitions:
            dst = graph.edges.get((vid, tr.name))
            if dst is None:
                raise AuditFailure(f"{vertex.name} has no {tr.name} edge")
            if dst == SINK:
                if enabled(vertex.world, tr, solver):
                    raise AuditFailure(f"{tr.name} is enabled in {vertex.name} but leads to ω")
            elif not post_entails(vertex.world, tr, graph.vertex(dst).world, solver):
                raise AuditFailure(f"{vertex.name} -{tr.name}-> {graph.vertex(dst).name} is not inductive")
    return tuple(graph.vertex(vid).world for vid in reachable)


def check(system: CoreSystem, config: Optional[RunConfig] = None) -> Verdict:
    return FarEngine(system, config).check()


def _label(vertex: Vertex) -> str:
    lines = [vertex.name, str(vertex.world)]
    lines.extend(f"bad: {render_cube(cube)}" for cube in vertex.bads)
    return '\\n'.join(lines)


def export_dot(graph: UnwindGraph, hide_sink: bool = False) -> str:
    """Deterministic DOT text of the unwinding."""
    dot = Digraph('unwinding')
    for vertex in graph.vertices:
        if hide_sink and vertex.id == SINK:
            continue
        shape = 'doublecircle' if vertex.id == ROOT else 'box'
        dot.node(vertex.name, label=_label(vertex), shape=shape)
    for (src, label), dst in graph.edges.items():
        if hide_sink and dst == SINK:
            continue
        dot.edge(graph.vertex(src).name, graph.vertex(dst).name, label=label)
    return dot.source
