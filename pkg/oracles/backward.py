"""
Backward reachability from the unsafe cube.

Cubes are explored fewest processes first. A cube subsumed by a visited one
adds nothing; a cube satisfiable together with the initial condition ends the
search with a trace built from the pre-image provenance.
"""

import heapq
import itertools
import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from logic.cubes import Cube, subsumes
from logic.system import CoreSystem
from logic.worlds import World
from oracles.explicit import replay_trace
from services.solver import Query, Solver
from services.traces import Link, concrete_steps
from services.transitions import pre_image_with_origins
from services.verdicts import Inconclusive, Safe, Unsafe, Verdict
from utils.config import RunConfig
from utils.errors import IllFormedTrace, ReplayFailure, ResourceLimit

logger = logging.getLogger(__name__)


@dataclass
class _Origin:
    link: Link
    successor: Cube


class BackwardReach:
    def __init__(self, system: CoreSystem, config: Optional[RunConfig] = None,
                 solver: Optional[Solver] = None):
        self.system = system
        self.config = config or RunConfig()
        self.solver = solver or Solver(branch_budget=self.config.branch_budget)
        self.visited: List[Cube] = []
        self.origins: Dict[Cube, Optional[_Origin]] = {}
        self.popped = 0
        self.pruned = 0
        self.elapsed_ms = 0

    def stats(self, verdict: str) -> Dict[str, object]:
        return {
            'engine': 'backward',
            'verdict': verdict,
            'cubes_visited': len(self.visited),
            'cubes_pruned': self.pruned,
            'solver_calls': self.solver.calls,
            'elapsed_ms': self.elapsed_ms,
        }

    def run(self) -> Verdict:
        started = time.monotonic()
        try:
            verdict = self._search(started)
        except ResourceLimit as exc:
            verdict = Inconclusive(exc.reason)
        self.elapsed_ms = int((time.monotonic() - started) * 1000)
        verdict.stats.update(self.stats(verdict.token))
        logger.info('backward %s on %s: %d cubes visited, %d pruned',
                    verdict.token, self.system.name, len(self.visited), self.pruned)
        return verdict

    def _search(self, started: float) -> Verdict:
        init = World.initial(self.system.init)
        unsafe = self.system.unsafe
        if unsafe.bottom:
            return Safe(())
        seq = itertools.count()
        frontier: List[Tuple[int, int, Cube]] = [(unsafe.nprocs, next(seq), unsafe)]
        self.origins[unsafe] = None
        while frontier:
            self.popped += 1
            if self.popped > self.config.max_steps:
                raise ResourceLimit('max-steps')
            if self.config.timeout_s is not None and time.monotonic() - started > self.config.timeout_s:
                raise ResourceLimit('timeout')
            _, _, cube = heapq.heappop(frontier)
            if any(subsumes(seen, cube) for seen in self.visited):
                self.pruned += 1
                continue
            result = self.solver.sat(Query(cube.nprocs, cube.literals, (init,)))
            if result.is_sat:
                return self._unsafe(cube, result.model.universe)
            self.visited = [seen for seen in self.visited if not subsumes(cube, seen)]
            self.visited.append(cube)
            for tr in self.system.transitions:
                for pre in pre_image_with_origins(cube, tr, self.solver, self.config.max_cube_procs):
                    if pre.cube in self.origins or any(subsumes(seen, pre.cube) for seen in self.visited):
                        continue
                    self.origins[pre.cube] = _Origin(Link(tr.name, pre.params, pre.succ), cube)
                    heapq.heappush(frontier, (pre.cube.nprocs, next(seq), pre.cube))
        return Safe(())

    def _unsafe(self, cube: Cube, universe: int) -> Unsafe:
        links = []
        origin = self.origins[cube]
        while origin is not None:
            links.append(origin.link)
            origin = self.origins[origin.successor]
        trace = concrete_steps(cube.nprocs, links)
        procs = max(universe, cube.nprocs, 1)
        try:
            replayed = replay_trace(self.system, trace, procs)
        except (IllFormedTrace, ValueError) as exc:
            raise ReplayFailure(f"backward trace does not replay at N={procs}: {exc}") from exc
        if not replayed:
            raise ReplayFailure(f"backward trace {' '.join(map(str, trace))} does not reach unsafe at N={procs}")
        return Unsafe(trace, procs)


def backward_reach(system: CoreSystem, config: Optional[RunConfig] = None) -> Verdict:
    return BackwardReach(system, config).run()
