"""
Elaboration of a checked SystemAst into the CoreSystem the engines use.

- parameters become process variables p0..p(n-1) in declaration order
- `a[p] := t` becomes `a'[j] = case j = p : t | _ : a[j]`
- `a[j] := t` with a fresh `j` updates every cell
- variables a transition does not mention keep their value
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from frontend.parser import parse
from frontend.syntax import FormulaDecl, LitAst, SystemAst, TermAst, TransitionAst
from logic.cubes import canonicalize, make_cube
from logic.system import ArrayUpdate, CoreSystem, Transition, identity_update
from logic.terms import (
    BOOL, CASE_INDEX, PROC, ArrayRead, EnumConst, EnumSort, GlobalVar, Literal, ProcParam, Sort,
    Term,
)
from logic.worlds import InitSpec
from utils.errors import SortError, UnsupportedError

logger = logging.getLogger(__name__)


class _Elaborator:
    def __init__(self, ast: SystemAst):
        self.ast = ast
        self.enums: Dict[str, EnumSort] = {
            decl.name: EnumSort(decl.name, decl.constructors) for decl in ast.type_decls.values()
        }

    def sort(self, name: str) -> Sort:
        if name == 'bool':
            return BOOL
        if name == 'proc':
            return PROC
        return self.enums[name]

    def term(self, term: TermAst, params: Dict[str, int], case_index: Optional[str] = None) -> Term:
        ast = self.ast
        if term.index is not None:
            sort = self.sort(ast.arrays[term.name].sort)
            if term.index == case_index:
                return ArrayRead(term.name, CASE_INDEX, sort)
            return ArrayRead(term.name, ProcParam(params[term.index]), sort)
        if term.name in ('true', 'false'):
            return EnumConst(term.name, BOOL)
        if term.name == case_index:
            return CASE_INDEX
        if term.name in params:
            return ProcParam(params[term.name])
        if term.name in ast.globals:
            return GlobalVar(term.name, self.sort(ast.globals[term.name].sort))
        owner = ast.constructor_owner(term.name)
        return EnumConst(term.name, self.enums[owner])

    def literal(self, lit: LitAst, params: Dict[str, int]) -> Literal:
        lhs, rhs = self.term(lit.lhs, params), self.term(lit.rhs, params)
        if lhs.sort != rhs.sort:
            raise SortError(f"cannot compare {lit.lhs} with {lit.rhs}", lit.line, lit.column)
        return Literal(lhs, rhs, lit.positive)

    def formula(self, decl: FormulaDecl):
        params = {name: i for i, name in enumerate(decl.params)}
        return len(decl.params), [self.literal(lit, params) for lit in decl.literals]

    def init(self) -> InitSpec:
        decl = self.ast.init
        if decl is None:
            return InitSpec(0, ())
        if len(decl.params) > 1:
            raise UnsupportedError('init takes at most one universal parameter', decl.line, decl.column)
        nparams, lits = self.formula(decl)
        cube = make_cube(nparams, lits)
        if cube.bottom:
            logger.warning('the initial condition is contradictory')
            return InitSpec(nparams, (), contradictory=True)
        return InitSpec(nparams, cube.literals)

    def transition(self, tr: TransitionAst) -> Transition:
        params = {name: i for i, name in enumerate(tr.params)}
        guard = make_cube(len(tr.params), [self.literal(lit, params) for lit in tr.guard])
        explicit_globals: Dict[str, Term] = {}
        point_cases: Dict[str, List[Tuple[int, Term]]] = {}
        whole: Dict[str, ArrayUpdate] = {}
        for up in tr.updates:
            if up.target in self.ast.globals:
                explicit_globals[up.target] = self.term(up.value, params)
            elif up.index in params and not up.is_case:
                point_cases.setdefault(up.target, []).append(
                    (params[up.index], self.term(up.value, params)))
            else:
                cases = []
                for cond, value in up.cases:
                    other = cond.rhs if cond.lhs.name == up.index else cond.lhs
                    cases.append((params[other.name], self.term(value, params, up.index)))
                whole[up.target] = ArrayUpdate(tuple(_first_per_param(cases)),
                                               self.term(up.value, params, up.index))
        global_updates = tuple(
            (decl.name, explicit_globals.get(decl.name, GlobalVar(decl.name, self.sort(decl.sort))))
            for decl in self.ast.globals.values()
        )
        array_updates = []
        for decl in self.ast.arrays.values():
            sort = self.sort(decl.sort)
            if decl.name in whole:
                array_updates.append((decl.name, whole[decl.name]))
            elif decl.name in point_cases:
                cases = tuple(sorted(point_cases[decl.name], key=lambda c: c[0]))
                array_updates.append((decl.name, ArrayUpdate(cases, ArrayRead(decl.name, CASE_INDEX, sort))))
            else:
                array_updates.append((decl.name, identity_update(decl.name, sort)))
        return Transition(tr.name, len(tr.params), guard, global_updates, tuple(array_updates),
                          tuple(tr.params))

    def run(self, name: str) -> CoreSystem:
        for decl in self.ast.arrays.values():
            if decl.sort == 'proc':
                raise UnsupportedError(f"array '{decl.name}' holds processes; only bool and "
                                       f"enumerated arrays are supported", decl.line, decl.column)
        nprocs, lits = self.formula(self.ast.unsafe)
        unsafe = canonicalize(make_cube(nprocs, lits))
        return CoreSystem(
            name=name,
            enums=tuple(self.enums.values()),
            globals=tuple(GlobalVar(d.name, self.sort(d.sort)) for d in self.ast.globals.values()),
            arrays=tuple((d.name, self.sort(d.sort)) for d in self.ast.arrays.values()),
            init=self.init(),
            unsafe=unsafe,
            transitions=tuple(self.transition(tr) for tr in self.ast.transitions),
        )


def _first_per_param(cases):
    """Earlier case arms win when two arms test the same parameter."""
    seen = set()
    for param, term in cases:
        if param not in seen:
            seen.add(param)
            yield param, term


def elaborate(ast: SystemAst, name: str = 'system') -> CoreSystem:
    core = _Elaborator(ast).run(name)
    logger.debug('elaborated %s: %d transitions, unsafe %s', name, len(core.transitions), core.unsafe)
    return core


def load_system(path) -> CoreSystem:
    """Read, parse and elaborate a .fcub file; the model name is the file stem."""
    path = Path(path)
    return elaborate(parse(path.read_text(encoding='utf-8')), path.stem)
