"""
Transition semantics over worlds and cubes.

A transition fires on distinct processes p0..p(m-1). When a cube over the
post-state is pulled back through a transition, each cube variable is either
identified with one parameter or is a fresh process m, m+1, ... (numbered in
order of first use). Every check enumerates these identifications, which is
exactly the case split an array read a'[x] needs.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from logic.cubes import Cube, canonicalize_with_perm, make_cube, reduce_cubes
from logic.system import Transition
from logic.terms import ArrayRead, GlobalVar, Literal, NormLiteral, ProcParam, Term, normalize, rename_literal
from logic.worlds import World
from services.solver import UNSAT, Query, SatResult, Solver, default_solver
from utils.config import DEFAULT_MAX_CUBE_PROCS
from utils.errors import ResourceLimit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreCube:
    """
    One disjunct of a pre-image. `params[k]` is the cube variable carrying
    transition parameter k, `succ[i]` the one carrying variable i of the
    successor cube.
    """
    cube: Cube
    params: Tuple[int, ...]
    succ: Tuple[int, ...]


def identifications(nvars: int, nparams: int) -> Iterator[Tuple[int, ...]]:
    """Every placement of `nvars` distinct cube variables among parameters and fresh processes."""
    def rec(i: int, used: frozenset, fresh: int, acc: List[int]):
        if i == nvars:
            yield tuple(acc)
            return
        for k in range(nparams):
            if k not in used:
                yield from rec(i + 1, used | {k}, fresh, acc + [k])
        yield from rec(i + 1, used, fresh + 1, acc + [nparams + fresh])

    yield from rec(0, frozenset(), 0, [])


def prime(term: Term, tr: Transition) -> Term:
    """Value of a post-state term as a pre-state term."""
    if isinstance(term, GlobalVar):
        return tr.global_update(term.name)
    if isinstance(term, ArrayRead) and isinstance(term.index, ProcParam):
        return tr.array_update(term.array).value_at(term.index.index)
    return term


def prime_literal(lit: Literal, tr: Transition) -> NormLiteral:
    return normalize(Literal(prime(lit.lhs, tr), prime(lit.rhs, tr), lit.positive))


def _universe(tr: Transition, ident: Sequence[int]) -> int:
    return max([tr.nparams] + [v + 1 for v in ident])


def successor_literals(tr: Transition, cube: Cube, ident: Sequence[int]) -> Optional[List[Literal]]:
    """Guard and the cube pulled back under one identification; None when decided false."""
    out = list(tr.guard.literals)
    for lit in cube.literals:
        renamed = rename_literal(lit, ident)
        if renamed is False:
            return None
        if renamed is True:
            continue
        pulled = prime_literal(renamed, tr)
        if pulled is False:
            return None
        if pulled is not True:
            out.append(pulled)
    return out


def enabled(world: World, tr: Transition, solver: Optional[Solver] = None) -> bool:
    solver = solver or default_solver()
    if world.is_bottom or tr.guard.bottom:
        return False
    return solver.sat(Query(tr.nparams, tr.guard.literals, (world,))).is_sat


def post_intersects_bad(world: World, tr: Transition, bad: Cube, solver: Optional[Solver] = None) -> SatResult:
    """Sat when some state of `world` reaches `bad` by one `tr` step."""
    solver = solver or default_solver()
    if bad.bottom or world.is_bottom or tr.guard.bottom:
        return UNSAT
    for ident in identifications(bad.nprocs, tr.nparams):
        lits = successor_literals(tr, bad, ident)
        if lits is None:
            continue
        result = solver.sat(Query(_universe(tr, ident), tuple(lits), (world,)))
        if result.is_sat:
            return result
    return UNSAT


def post_entails(world: World, tr: Transition, target: World, solver: Optional[Solver] = None) -> bool:
    """world ∧ tr ⊨ target'. Vacuously true when tr is disabled in world."""
    solver = solver or default_solver()
    if not enabled(world, tr, solver):
        return True
    if target.is_bottom:
        return False
    return all(not post_intersects_bad(world, tr, cube, solver).is_sat
               for cube in target.negation_cubes())


def pre_image_with_origins(bad: Cube, tr: Transition, solver: Optional[Solver] = None,
                           max_procs: int = DEFAULT_MAX_CUBE_PROCS) -> List[PreCube]:
    """
    Exact pre-image of `bad` under `tr` as a subsumption-reduced list of
    satisfiable canonical cubes, each with its variable maps.
    """
    solver = solver or default_solver()
    if bad.bottom or tr.guard.bottom:
        return []
    width = len(bad.procs_used())
    if width > max_procs:
        raise ResourceLimit('cube-width', f"bad cube over {width} processes exceeds the limit of {max_procs}")
    found: List[PreCube] = []
    for ident in identifications(bad.nprocs, tr.nparams):
        lits = successor_literals(tr, bad, ident)
        if lits is None:
            continue
        raw = make_cube(_universe(tr, ident), lits)
        if raw.bottom:
            continue
        cube, perm = canonicalize_with_perm(raw)
        if cube.bottom or not solver.sat(Query(cube.nprocs, cube.literals)).is_sat:
            continue
        found.append(PreCube(cube, tuple(perm[k] for k in range(tr.nparams)),
                             tuple(perm[v] for v in ident)))
    return reduce_cubes(found, lambda pre: pre.cube)


def pre_image(bad: Cube, tr: Transition, solver: Optional[Solver] = None,
              max_procs: int = DEFAULT_MAX_CUBE_PROCS) -> Tuple[Cube, ...]:
    return tuple(pre.cube for pre in pre_image_with_origins(bad, tr, solver, max_procs))
