"""Pretty-printer: CoreSystem back to concrete .fcub syntax."""

import re
from typing import List, Sequence

from logic.system import ArrayUpdate, CoreSystem, Transition
from logic.terms import ArrayRead, CaseIndex, EnumSort, GlobalVar, Literal, ProcParam, Term


def _fresh_prefix(taken: Sequence[str], preferred: str) -> str:
    prefix = preferred
    while any(re.fullmatch(re.escape(prefix) + r'\d*', name) for name in taken):
        prefix += '_'
    return prefix


class _Printer:
    def __init__(self, system: CoreSystem):
        self.system = system
        taken = [enum.name for enum in system.enums]
        taken += [c for enum in system.enums for c in enum.constructors]
        taken += [g.name for g in system.globals] + [name for name, _ in system.arrays]
        self.proc = _fresh_prefix(taken, 'p')
        self.index = _fresh_prefix(taken, 'j')

    def term(self, term: Term) -> str:
        if isinstance(term, ProcParam):
            return f"{self.proc}{term.index}"
        if isinstance(term, CaseIndex):
            return self.index
        if isinstance(term, ArrayRead):
            return f"{term.array}[{self.term(term.index)}]"
        if isinstance(term, GlobalVar):
            return term.name
        return term.value

    def literal(self, lit: Literal) -> str:
        op = '=' if lit.positive else '<>'
        return f"{self.term(lit.lhs)} {op} {self.term(lit.rhs)}"

    def conj(self, literals) -> str:
        body = ' && '.join(self.literal(lit) for lit in literals)
        return f"{{ {body} }}" if body else '{ }'

    def params(self, n: int) -> str:
        return '(' + ' '.join(f"{self.proc}{i}" for i in range(n)) + ')'

    def updates(self, tr: Transition) -> List[str]:
        lines = []
        for name, value in tr.global_updates:
            if value != GlobalVar(name, value.sort):
                lines.append(f"  {name} := {self.term(value)};")
        for name, update in tr.array_updates:
            if update.is_identity(name):
                continue
            lines.extend(self.array_update(name, update))
        return lines

    def array_update(self, name: str, update: ArrayUpdate) -> List[str]:
        identity_default = isinstance(update.default, ArrayRead) and update.default.array == name \
            and isinstance(update.default.index, CaseIndex)
        reads_index = any(_mentions_case_index(term) for _, term in update.cases)
        if identity_default and not reads_index:
            return [f"  {name}[{self.proc}{param}] := {self.term(term)};" for param, term in update.cases]
        if not update.cases:
            return [f"  {name}[{self.index}] := {self.term(update.default)};"]
        arms = ' '.join(f"| {self.index} = {self.proc}{param} : {self.term(term)}"
                        for param, term in update.cases)
        return [f"  {name}[{self.index}] := case {arms} | _ : {self.term(update.default)};"]

    def render(self) -> str:
        system = self.system
        out: List[str] = []
        for enum in system.enums:
            out.append(f"type {enum.name} = {' | '.join(enum.constructors)}")
        for var in system.globals:
            out.append(f"var {var.name} : {_sort_name(var.sort)}")
        for name, sort in system.arrays:
            out.append(f"array {name}[proc] : {_sort_name(sort)}")
        init = system.init
        if init.contradictory:
            out.append(f"init {self.params(init.nparams)} {{ true = false }}")
        else:
            out.append(f"init {self.params(init.nparams)} {self.conj(init.literals)}")
        if system.unsafe.bottom:
            out.append('unsafe () { true = false }')
        else:
            out.append(f"unsafe {self.params(system.unsafe.nprocs)} {self.conj(system.unsafe.literals)}")
        for tr in system.transitions:
            out.append('')
            out.append(f"transition {tr.name} {self.params(tr.nparams)}")
            if tr.guard.bottom:
                out.append('requires { true = false }')
            else:
                out.append(f"requires {self.conj(tr.guard.literals)}")
            out.append('{')
            out.extend(self.updates(tr))
            out.append('}')
        return '\n'.join(out) + '\n'


def _sort_name(sort) -> str:
    return sort.name if isinstance(sort, EnumSort) else 'proc'


def _mentions_case_index(term: Term) -> bool:
    return isinstance(term, CaseIndex) or (isinstance(term, ArrayRead) and isinstance(term.index, CaseIndex))


def print_system(system: CoreSystem) -> str:
    return _Printer(system).render()
