"""
Recursive-descent parser for .fcub files, followed by a name and sort check.

parse() returns a SystemAst whose identifiers all resolve and whose literals
are well-sorted; elaboration only has to desugar.
"""

import logging
from typing import Dict, List, Optional, Set, Tuple

from frontend.lexer import Token, tokenize
from frontend.syntax import (
    ArrayDecl, FormulaDecl, LitAst, SystemAst, TermAst, TransitionAst, TypeDecl, UpdateAst,
    VarDecl,
)
from utils.errors import (
    DuplicateDeclError, FcubSyntaxError, SortError, UndeclaredNameError, UnsupportedError,
)

logger = logging.getLogger(__name__)


class Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != 'EOF':
            self.pos += 1
        return tok

    def _at(self, text: str) -> bool:
        tok = self.current
        return tok.kind in ('OP', 'KW') and tok.text == text

    def _expect(self, text: str) -> Token:
        if not self._at(text):
            self._fail(f"expected '{text}'")
        return self._advance()

    def _expect_id(self, what: str = 'identifier') -> Token:
        if self.current.kind != 'ID':
            self._fail(f"expected {what}")
        return self._advance()

    def _fail(self, message: str):
        tok = self.current
        raise FcubSyntaxError(f"{message}, found {tok}", tok.line, tok.column)

    def parse_file(self) -> SystemAst:
        ast = SystemAst()
        if self.current.kind == 'EOF':
            raise FcubSyntaxError('expected declaration', self.current.line, self.current.column)
        while self.current.kind != 'EOF':
            tok = self.current
            if tok.kind != 'KW':
                self._fail('expected declaration')
            if tok.text == 'type':
                self._type_decl(ast)
            elif tok.text == 'var':
                self._var_decl(ast)
            elif tok.text == 'array':
                self._array_decl(ast)
            elif tok.text in ('init', 'unsafe'):
                self._formula_decl(ast, tok.text)
            elif tok.text == 'transition':
                ast.transitions.append(self._transition())
            else:
                self._fail('expected declaration')
        if ast.unsafe is None:
            raise FcubSyntaxError('expected an unsafe declaration', self.current.line, self.current.column)
        return ast

    def _sort_name(self) -> str:
        tok = self.current
        if tok.kind == 'KW' and tok.text in ('bool', 'proc'):
            return self._advance().text
        return self._expect_id('sort').text

    def _type_decl(self, ast: SystemAst) -> None:
        start = self._advance()
        name = self._expect_id('type name')
        self._expect('=')
        constructors = [self._expect_id('constructor')]
        while self._at('|'):
            self._advance()
            constructors.append(self._expect_id('constructor'))
        seen: Set[str] = set()
        for tok in constructors:
            if tok.text in seen:
                raise DuplicateDeclError(tok.text, tok.line, tok.column)
            seen.add(tok.text)
        if name.text in ast.type_decls:
            raise DuplicateDeclError(name.text, name.line, name.column)
        ast.type_decls[name.text] = TypeDecl(name.text, tuple(t.text for t in constructors),
                                             start.line, start.column)

    def _var_decl(self, ast: SystemAst) -> None:
        start = self._advance()
        name = self._expect_id('variable name')
        self._expect(':')
        sort = self._sort_name()
        if name.text in ast.globals:
            raise DuplicateDeclError(name.text, name.line, name.column)
        ast.globals[name.text] = VarDecl(name.text, sort, start.line, start.column)

    def _array_decl(self, ast: SystemAst) -> None:
        start = self._advance()
        name = self._expect_id('array name')
        self._expect('[')
        self._expect('proc')
        self._expect(']')
        self._expect(':')
        sort = self._sort_name()
        if name.text in ast.arrays:
            raise DuplicateDeclError(name.text, name.line, name.column)
        ast.arrays[name.text] = ArrayDecl(name.text, sort, start.line, start.column)

    def _params(self) -> Tuple[str, ...]:
        self._expect('(')
        params: List[Token] = []
        while self.current.kind == 'ID':
            params.append(self._advance())
        self._expect(')')
        seen: Set[str] = set()
        for tok in params:
            if tok.text in seen:
                raise DuplicateDeclError(tok.text, tok.line, tok.column)
            seen.add(tok.text)
        return tuple(t.text for t in params)

    def _formula_decl(self, ast: SystemAst, kind: str) -> None:
        start = self._advance()
        params = self._params()
        lits = self._braced_conj()
        if getattr(ast, kind) is not None:
            raise DuplicateDeclError(kind, start.line, start.column)
        setattr(ast, kind, FormulaDecl(params, lits, start.line, start.column))

    def _transition(self) -> TransitionAst:
        start = self._advance()
        name = self._expect_id('transition name')
        params = self._params()
        self._expect('requires')
        guard = self._braced_conj()
        self._expect('{')
        updates = []
        while not self._at('}'):
            updates.append(self._update())
        self._expect('}')
        return TransitionAst(name.text, params, guard, tuple(updates), start.line, start.column)

    def _braced_conj(self) -> Tuple[LitAst, ...]:
        self._expect('{')
        lits: List[LitAst] = []
        if not self._at('}'):
            lits.append(self._literal())
            while self._at('&&'):
                self._advance()
                lits.append(self._literal())
        self._expect('}')
        return tuple(lits)

    def _literal(self) -> LitAst:
        if self._at('forall_other'):
            tok = self.current
            raise UnsupportedError('universally quantified guards are not supported', tok.line, tok.column)
        lhs = self._term()
        if self._at('='):
            positive = True
        elif self._at('<>'):
            positive = False
        else:
            self._fail("expected '=' or '<>'")
        self._advance()
        rhs = self._term()
        return LitAst(lhs, rhs, positive, lhs.line, lhs.column)

    def _term(self) -> TermAst:
        tok = self.current
        if tok.kind == 'KW' and tok.text in ('true', 'false'):
            self._advance()
            return TermAst(tok.text, None, tok.line, tok.column)
        name = self._expect_id('term')
        if self._at('['):
            self._advance()
            index = self._expect_id('process variable')
            self._expect(']')
            return TermAst(name.text, index.text, name.line, name.column)
        return TermAst(name.text, None, name.line, name.column)

    def _update(self) -> UpdateAst:
        target = self._expect_id('assignment target')
        index = None
        if self._at('['):
            self._advance()
            index = self._expect_id('process variable').text
            self._expect(']')
        self._expect(':=')
        if self._at('case'):
            if index is None:
                self._fail('case updates need an indexed target')
            self._advance()
            cases = []
            default = None
            while self._at('|'):
                self._advance()
                if self._at('_'):
                    self._advance()
                    self._expect(':')
                    default = self._term()
                    break
                cond = self._literal()
                self._expect(':')
                cases.append((cond, self._term()))
            if default is None or not cases:
                self._fail("expected '| _ : term' closing a case update")
            self._expect(';')
            return UpdateAst(target.text, index, default, tuple(cases), True, target.line, target.column)
        value = self._term()
        self._expect(';')
        return UpdateAst(target.text, index, value, (), False, target.line, target.column)


class _Checker:
    """Resolves names and checks sorts. Sorts are plain names: 'bool', 'proc' or a type."""

    def __init__(self, ast: SystemAst):
        self.ast = ast
        self.kinds: Dict[str, str] = {}

    def run(self) -> None:
        ast = self.ast
        for decl in ast.type_decls.values():
            self._declare(decl.name, 'type', decl.line, decl.column)
            for ctor in decl.constructors:
                self._declare(ctor, 'constructor', decl.line, decl.column)
        for decl in list(ast.globals.values()) + list(ast.arrays.values()):
            self._check_sort_name(decl.sort, decl.line, decl.column)
            self._declare(decl.name, 'array' if decl.name in ast.arrays else 'global', decl.line, decl.column)
        seen: Set[str] = set()
        for tr in ast.transitions:
            if tr.name in seen:
                raise DuplicateDeclError(tr.name, tr.line, tr.column)
            seen.add(tr.name)
        for decl in (ast.init, ast.unsafe):
            if decl is not None:
                scope = self._scope(decl.params, decl.line, decl.column)
                for lit in decl.literals:
                    self._literal(lit, scope)
        for tr in ast.transitions:
            self._transition(tr)

    def _declare(self, name: str, kind: str, line: int, column: int) -> None:
        if name in self.kinds:
            raise DuplicateDeclError(name, line, column)
        self.kinds[name] = kind

    def _check_sort_name(self, sort: str, line: int, column: int) -> None:
        if sort not in ('bool', 'proc') and sort not in self.ast.type_decls:
            raise UndeclaredNameError(sort, line, column)

    def _scope(self, params, line: int, column: int) -> Dict[str, str]:
        for name in params:
            if name in self.kinds:
                raise DuplicateDeclError(name, line, column)
        return {name: 'proc' for name in params}

    def sort_of(self, term: TermAst, scope: Dict[str, str]) -> str:
        ast = self.ast
        if term.index is not None:
            if term.name not in ast.arrays:
                if term.name in self.kinds:
                    raise SortError(f"'{term.name}' is not an array", term.line, term.column)
                raise UndeclaredNameError(term.name, term.line, term.column)
            if term.index not in scope:
                if term.index in self.kinds:
                    raise SortError(f"array index '{term.index}' must be a process parameter",
                                    term.line, term.column)
                raise UndeclaredNameError(term.index, term.line, term.column)
            return ast.arrays[term.name].sort
        if term.name in ('true', 'false'):
            return 'bool'
        if term.name in scope:
            return scope[term.name]
        kind = self.kinds.get(term.name)
        if kind == 'global':
            return ast.globals[term.name].sort
        if kind == 'constructor':
            return ast.constructor_owner(term.name)
        if kind == 'array':
            raise SortError(f"array '{term.name}' must be indexed", term.line, term.column)
        if kind == 'type':
            raise SortError(f"type '{term.name}' used as a value", term.line, term.column)
        raise UndeclaredNameError(term.name, term.line, term.column)

    def _literal(self, lit: LitAst, scope: Dict[str, str]) -> None:
        left = self.sort_of(lit.lhs, scope)
        right = self.sort_of(lit.rhs, scope)
        if left != right:
            raise SortError(f"cannot compare {lit.lhs} ({left}) with {lit.rhs} ({right})",
                            lit.line, lit.column)

    def _transition(self, tr: TransitionAst) -> None:
        scope = self._scope(tr.params, tr.line, tr.column)
        for lit in tr.guard:
            self._literal(lit, scope)
        assigned: Dict[str, Optional[str]] = {}
        for up in tr.updates:
            if up.target in self.ast.globals:
                if up.index is not None:
                    raise SortError(f"'{up.target}' is not an array", up.line, up.column)
                self._assigned_once(assigned, up, None)
                self._value(up.value, self.ast.globals[up.target].sort, scope, up)
                continue
            if up.target not in self.ast.arrays:
                if up.target in self.kinds:
                    raise SortError(f"cannot assign to '{up.target}'", up.line, up.column)
                raise UndeclaredNameError(up.target, up.line, up.column)
            if up.index is None:
                raise SortError(f"array '{up.target}' must be indexed", up.line, up.column)
            sort = self.ast.arrays[up.target].sort
            if up.index in scope and not up.is_case:
                self._assigned_once(assigned, up, up.index)
                self._value(up.value, sort, scope, up)
                continue
            if up.index in scope or up.index in self.kinds:
                raise SortError(f"case index '{up.index}' must be a fresh name", up.line, up.column)
            self._assigned_once(assigned, up, '*')
            inner = dict(scope)
            inner[up.index] = 'proc'
            for cond, value in up.cases:
                self._case_condition(cond, up.index, scope)
                self._value(value, sort, inner, up)
            self._value(up.value, sort, inner, up)

    def _assigned_once(self, assigned: Dict[str, object], up: UpdateAst, index: Optional[str]) -> None:
        if up.target in assigned:
            previous = assigned[up.target]
            point_updates = isinstance(previous, set) and index not in (None, '*') \
                and index not in previous
            if not point_updates:
                raise DuplicateDeclError(up.target, up.line, up.column, what='updated')
            previous.add(index)
            return
        assigned[up.target] = {index} if index not in (None, '*') else index

    def _case_condition(self, cond: LitAst, index: str, scope: Dict[str, str]) -> None:
        sides = {str(cond.lhs), str(cond.rhs)}
        if not cond.positive or index not in sides or len(sides) != 2:
            raise UnsupportedError(f"case conditions must have the form {index} = <parameter>",
                                   cond.line, cond.column)
        other = (sides - {index}).pop()
        if other not in scope:
            raise UnsupportedError(f"case conditions must have the form {index} = <parameter>",
                                   cond.line, cond.column)

    def _value(self, term: TermAst, sort: str, scope: Dict[str, str], up: UpdateAst) -> None:
        found = self.sort_of(term, scope)
        if found != sort:
            raise SortError(f"cannot assign {term} ({found}) to {up.target} ({sort})",
                            term.line, term.column)


def parse(source: str) -> SystemAst:
    """Parse and check a .fcub source text."""
    ast = Parser(tokenize(source)).parse_file()
    _Checker(ast).run()
    logger.debug('parsed %d types, %d globals, %d arrays, %d transitions',
                 len(ast.type_decls), len(ast.globals), len(ast.arrays), len(ast.transitions))
    return ast
