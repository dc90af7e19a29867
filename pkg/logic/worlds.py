"""
Worlds: the formula attached to an unwinding vertex.

A world is a base (⊤, the initial condition, or ⊥) conjoined with negations of
canonical cubes. The negated cubes are kept subsumption-reduced and sorted.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from logic.cubes import BOTTOM, TRUE_CUBE, Cube, canonicalize, make_cube, render_cube, subsumes
from logic.terms import Literal


class Base(Enum):
    TOP = 'top'
    INIT = 'init'
    BOTTOM = 'bottom'


@dataclass(frozen=True)
class InitSpec:
    """
    The initial condition: a conjunction of literals universally quantified
    over at most one process variable p0.
    """
    nparams: int
    literals: Tuple[Literal, ...]
    contradictory: bool = False

    def negation_cubes(self) -> Tuple[Cube, ...]:
        """¬init as a disjunction of cubes, one per negated literal."""
        if self.contradictory:
            return (TRUE_CUBE,)
        out = []
        for lit in self.literals:
            neg = lit.negate()
            if neg is False:
                continue
            procs = 0 if neg is True else len(neg.procs())
            out.append(canonicalize(make_cube(procs, [] if neg is True else [neg])))
        return tuple(out)

    def __str__(self) -> str:
        if self.contradictory:
            return 'false'
        body = ' && '.join(str(lit) for lit in self.literals) or 'true'
        return f"∀p0. {body}" if self.nparams else body


@dataclass(frozen=True)
class World:
    base: Base
    negated: Tuple[Cube, ...] = ()
    init: Optional[InitSpec] = None

    @classmethod
    def top(cls) -> 'World':
        return cls(Base.TOP)

    @classmethod
    def initial(cls, init: InitSpec) -> 'World':
        return cls(Base.INIT, (), init)

    @classmethod
    def bottom(cls) -> 'World':
        return cls(Base.BOTTOM)

    @property
    def is_bottom(self) -> bool:
        return self.base is Base.BOTTOM

    def negation_cubes(self) -> Tuple[Cube, ...]:
        """¬W as a disjunction of cubes."""
        if self.base is Base.BOTTOM:
            return (TRUE_CUBE,)
        if self.base is Base.INIT:
            return self.init.negation_cubes() + self.negated
        return self.negated

    def min_procs(self) -> int:
        return min((cube.nprocs for cube in self.negated), default=0)

    def __str__(self) -> str:
        if self.base is Base.BOTTOM:
            return '⊥'
        parts = ['init' if self.base is Base.INIT else '⊤']
        parts.extend(f"¬({render_cube(cube)})" for cube in self.negated)
        return ' ∧ '.join(parts)


def strengthen(world: World, cube: Cube) -> World:
    """W ∧ ¬cube, keeping the negated cubes subsumption-reduced."""
    if world.is_bottom:
        return world
    cube = canonicalize(cube)
    if cube is BOTTOM or cube.bottom:
        return world
    if cube.nprocs == 0 and not cube.literals:
        return World.bottom()
    if any(subsumes(kept, cube) for kept in world.negated):
        return world
    kept = [other for other in world.negated if not subsumes(cube, other)]
    kept.append(cube)
    return World(world.base, tuple(sorted(kept, key=lambda c: c.key)), world.init)


def entails_syntactically(stronger: World, weaker: World) -> bool:
    """
    Sound syntactic check of stronger ⊨ weaker: every cube excluded by the
    weaker world is excluded (up to subsumption) by the stronger one.
    """
    if stronger.is_bottom:
        return True
    if weaker.is_bottom:
        return False
    if weaker.base is Base.INIT and stronger.base is not Base.INIT:
        return False
    if weaker.base is Base.INIT and stronger.init != weaker.init:
        return False
    return all(any(subsumes(mine, cube) for mine in stronger.negated) for cube in weaker.negated)
