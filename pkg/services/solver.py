"""
Decision procedure for the array-based fragment.

A query is a conjunction of ground literals over process constants 0..n-1
together with worlds whose negated cubes read as universal clauses. Solving a
query:
1. case-split every proc-sorted global over the constants and fresh
   "elsewhere" elements (fresh elements are numbered in order of first use)
2. instantiate world clauses and init literals over every element of the
   branch universe; clauses that are already true are dropped
3. DPLL over the clauses with union-find classes for equalities and a list of
   disequalities
4. finish with a small finite-domain search over enum classes with no value

Env: none. Budget: RunConfig.branch_budget branches per query.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from logic.cubes import Cube
from logic.terms import (
    PROC, EnumConst, GlobalVar, Literal, NormLiteral, ProcParam, Term, is_value, map_literal,
    normalize, proc_globals_of, rename_literal,
)
from logic.worlds import Base, World
from utils.config import DEFAULT_BRANCH_BUDGET
from utils.errors import ResourceLimit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Query:
    nconst: int
    literals: Tuple[Literal, ...] = ()
    worlds: Tuple[World, ...] = ()


@dataclass(frozen=True)
class Model:
    """A satisfying assignment. Elements 0..nconst-1 are the query constants."""
    universe: int
    procs: Tuple[Tuple[str, int], ...] = ()
    values: Tuple[Tuple[Term, str], ...] = ()

    def proc_value(self, name: str) -> int:
        return dict(self.procs)[name]

    def value(self, term: Term) -> Optional[str]:
        return dict(self.values).get(term)

    def _resolve(self, term: Term):
        if isinstance(term, ProcParam):
            return ('proc', term.index)
        if isinstance(term, GlobalVar) and term.sort == PROC:
            return ('proc', self.proc_value(term.name))
        if isinstance(term, EnumConst):
            return ('enum', term.value)
        return ('enum', self.value(term))

    def evaluate(self, lit: Literal) -> bool:
        equal = self._resolve(lit.lhs) == self._resolve(lit.rhs)
        return equal if lit.positive else not equal


@dataclass(frozen=True)
class SatResult:
    model: Optional[Model] = None

    @property
    def is_sat(self) -> bool:
        return self.model is not None


UNSAT = SatResult()


class _Classes:
    """Union-find over terms; constructors are members of their own class."""

    def __init__(self):
        self.parent: Dict[Term, Term] = {}
        self.const: Dict[Term, EnumConst] = {}
        self.diseq: List[Tuple[Term, Term]] = []

    def copy(self) -> '_Classes':
        other = _Classes()
        other.parent = dict(self.parent)
        other.const = dict(self.const)
        other.diseq = list(self.diseq)
        return other

    def find(self, term: Term) -> Term:
        if term not in self.parent:
            self.parent[term] = term
            if isinstance(term, EnumConst):
                self.const[term] = term
            return term
        while self.parent[term] != term:
            self.parent[term] = self.parent[self.parent[term]]
            term = self.parent[term]
        return term

    def union(self, a: Term, b: Term) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        ca, cb = self.const.get(ra), self.const.get(rb)
        if ca is not None and cb is not None:
            return False
        if ca is None and cb is not None:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return all(self.find(x) != self.find(y) for x, y in self.diseq)

    def separate(self, a: Term, b: Term) -> bool:
        if self.find(a) == self.find(b):
            return False
        self.diseq.append((a, b))
        return True

    def assume(self, lit: Literal) -> bool:
        if lit.positive:
            return self.union(lit.lhs, lit.rhs)
        return self.separate(lit.lhs, lit.rhs)

    def value(self, lit: Literal) -> Optional[bool]:
        ra, rb = self.find(lit.lhs), self.find(lit.rhs)
        if ra == rb:
            equal = True
        elif ra in self.const and rb in self.const:
            equal = False
        elif any({self.find(x), self.find(y)} == {ra, rb} for x, y in self.diseq):
            equal = False
        else:
            return None
        return equal if lit.positive else not equal

    def complete(self, tick) -> Optional[Dict[Term, str]]:
        """Pick a constructor for every class without one, respecting disequalities."""
        groups: Dict[Term, List[Term]] = {}
        for term in list(self.parent):
            groups.setdefault(self.find(term), []).append(term)
        neighbours: Dict[Term, set] = {root: set() for root in groups}
        for x, y in self.diseq:
            rx, ry = self.find(x), self.find(y)
            neighbours[rx].add(ry)
            neighbours[ry].add(rx)
        chosen: Dict[Term, str] = {root: self.const[root].value for root in groups if root in self.const}
        open_roots = [root for root in groups if root not in self.const]

        def search(i: int) -> bool:
            if i == len(open_roots):
                return True
            root = open_roots[i]
            taken = {chosen[n] for n in neighbours[root] if n in chosen}
            for ctor in groups[root][0].sort.constructors:
                if ctor in taken:
                    continue
                tick()
                chosen[root] = ctor
                if search(i + 1):
                    return True
            chosen.pop(root, None)
            return False

        if not search(0):
            return None
        return {term: chosen[root] for root, terms in groups.items()
                for term in terms if not isinstance(term, EnumConst)}


def trivial_unsat(literals: Iterable[Literal]) -> bool:
    """
    Set-theoretic pre-test: a complementary pair, or an equality chain joining
    two distinct values. False answers commit to nothing.
    """
    lits = []
    for lit in literals:
        norm = normalize(lit)
        if norm is False:
            return True
        if norm is not True:
            lits.append(norm)
    present = set(lits)
    classes = _Classes()
    for lit in lits:
        if lit.positive:
            if Literal(lit.lhs, lit.rhs, False) in present:
                return True
            if not classes.union(lit.lhs, lit.rhs):
                return True
    seen: Dict[Term, Term] = {}
    for term in list(classes.parent):
        if is_value(term):
            root = classes.find(term)
            if root in seen and seen[root] != term:
                return True
            seen[root] = term
    return any(classes.find(lit.lhs) == classes.find(lit.rhs) for lit in lits if not lit.positive)


def _world_proc_globals(world: World) -> set:
    names = set()
    for cube in world.negation_cubes():
        names |= proc_globals_of(cube.literals)
    return names


class _Search:
    def __init__(self, query: Query, budget: int):
        self.query = query
        self.budget = budget
        self.branches = 0
        names = proc_globals_of(query.literals)
        for world in query.worlds:
            names |= _world_proc_globals(world)
        self.proc_globals = sorted(names)

    def tick(self) -> None:
        self.branches += 1
        if self.branches > self.budget:
            raise ResourceLimit('branch-budget', f"solver branch budget ({self.budget}) exceeded")

    def run(self) -> SatResult:
        for assignment, universe in self._proc_assignments():
            model = self._solve_branch(assignment, universe)
            if model is not None:
                return SatResult(model)
        return UNSAT

    def _proc_assignments(self):
        names = self.proc_globals
        base = self.query.nconst

        def rec(i: int, assigned: Dict[str, int], fresh: int):
            if i == len(names):
                yield dict(assigned), base + fresh
                return
            for elem in range(base + fresh + 1):
                self.tick()
                assigned[names[i]] = elem
                yield from rec(i + 1, assigned, fresh + (1 if elem == base + fresh else 0))
            del assigned[names[i]]

        yield from rec(0, {}, 0)

    def _solve_branch(self, assignment: Dict[str, int], universe: int) -> Optional[Model]:
        def resolve(term: Term) -> Term:
            if isinstance(term, GlobalVar) and term.name in assignment:
                return ProcParam(assignment[term.name])
            return term

        classes = _Classes()
        for lit in self.query.literals:
            norm = map_literal(lit, resolve)
            if norm is False:
                return None
            if norm is not True and not classes.assume(norm):
                return None
        clauses: Dict[Tuple[Literal, ...], None] = {}
        for world in self.query.worlds:
            if world.base is Base.INIT:
                init = world.init
                elements = range(universe) if init.nparams else [0]
                for elem in elements:
                    for lit in init.literals:
                        norm = _ground(lit, {0: elem}, resolve)
                        if norm is False:
                            return None
                        if norm is not True and not classes.assume(norm):
                            return None
            for cube in world.negated:
                for clause in self._instances(cube, universe, resolve):
                    if not clause:
                        return None
                    clauses[clause] = None
        values = self._dpll(classes, [list(c) for c in clauses])
        if values is None:
            return None
        return Model(universe, tuple(sorted(assignment.items())), tuple(values.items()))

    @staticmethod
    def _instances(cube: Cube, universe: int, resolve):
        """Clauses ¬cube[image] for every injective image; satisfied ones are skipped."""
        for image in itertools.permutations(range(universe), cube.nprocs):
            clause = []
            satisfied = False
            for lit in cube.literals:
                inst = _ground(lit, image, resolve)
                if inst is False:
                    satisfied = True
                    break
                if inst is True:
                    continue
                negated = inst.negate()
                if negated is True:
                    satisfied = True
                    break
                if negated is not False:
                    clause.append(negated)
            if not satisfied:
                yield tuple(dict.fromkeys(clause))

    def _dpll(self, classes: _Classes, clauses: List[List[Literal]]) -> Optional[Dict[Term, str]]:
        pending = clauses
        while True:
            progress = False
            remaining = []
            for clause in pending:
                open_lits = []
                done = False
                for lit in clause:
                    val = classes.value(lit)
                    if val is True:
                        done = True
                        break
                    if val is None:
                        open_lits.append(lit)
                if done:
                    continue
                if not open_lits:
                    return None
                if len(open_lits) == 1:
                    if not classes.assume(open_lits[0]):
                        return None
                    progress = True
                    continue
                remaining.append(open_lits)
            pending = remaining
            if not progress:
                break
        if not pending:
            return classes.complete(self.tick)
        clause = pending[0]
        for i, lit in enumerate(clause):
            self.tick()
            branch = classes.copy()
            if not branch.assume(lit):
                continue
            if not all(branch.assume(_complement(prev)) for prev in clause[:i]):
                continue
            found = self._dpll(branch, pending)
            if found is not None:
                return found
        return None


def _ground(lit: Literal, image, resolve) -> NormLiteral:
    renamed = rename_literal(lit, image)
    if isinstance(renamed, bool):
        return renamed
    return map_literal(renamed, resolve)


def _complement(lit: Literal) -> Literal:
    return Literal(lit.lhs, lit.rhs, not lit.positive)


class Solver:
    """
    Entry point for satisfiability and entailment checks. Counts calls
    for the run statistics and an optional query dump.
    """

    def __init__(self, branch_budget: int = DEFAULT_BRANCH_BUDGET, dump=None):
        self.branch_budget = branch_budget
        self.dump = dump
        self.calls = 0

    def sat(self, query: Query) -> SatResult:
        self.calls += 1
        result = self._decide(query)
        if self.dump is not None:
            self.dump.write(query, result)
        return result

    def _decide(self, query: Query) -> SatResult:
        for world in query.worlds:
            if world.is_bottom or (world.base is Base.INIT and world.init.contradictory):
                return UNSAT
        if trivial_unsat(query.literals):
            return UNSAT
        return _Search(query, self.branch_budget).run()

    def entails_world(self, nconst: int, literals: Sequence[Literal], world: World) -> bool:
        """
        Does the conjunction entail the world? Each cube of ¬world is
        instantiated over injective maps into the constants only.
        """
        literals = tuple(literals)
        if world.is_bottom:
            return not self.sat(Query(nconst, literals)).is_sat
        for cube in world.negation_cubes():
            for image in itertools.permutations(range(nconst), cube.nprocs):
                inst: List[Literal] = []
                dead = False
                for lit in cube.literals:
                    norm = rename_literal(lit, image)
                    if norm is False:
                        dead = True
                        break
                    if norm is not True:
                        inst.append(norm)
                if dead:
                    continue
                if self.sat(Query(nconst, literals + tuple(inst))).is_sat:
                    return False
        return True


_default = Solver()


def default_solver() -> Solver:
    return _default


def sat(query: Query) -> SatResult:
    return _default.sat(query)


def entails_world(nconst: int, literals: Sequence[Literal], world: World) -> bool:
    return _default.entails_world(nconst, literals, world)
