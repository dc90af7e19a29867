"""
Sorts, terms and literals of the array-based fragment.

Process variables are numbered: inside a cube they are the bound variables
p0..p(n-1), inside a solver query the ground constants, inside a transition
the parameters. Literals are kept in a normal form (see normalize) so that
syntactic checks (complementary pairs, subsumption) are meaningful.
"""

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Set, Tuple, Union


@dataclass(frozen=True)
class EnumSort:
    name: str
    constructors: Tuple[str, ...]

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ProcSort:
    def __str__(self) -> str:
        return 'proc'


BOOL = EnumSort('bool', ('false', 'true'))
PROC = ProcSort()

Sort = Union[EnumSort, ProcSort]


@dataclass(frozen=True)
class ProcParam:
    index: int

    @property
    def sort(self) -> Sort:
        return PROC

    def __str__(self) -> str:
        return f"p{self.index}"


@dataclass(frozen=True)
class CaseIndex:
    """The cell index `j` of an array update. Only appears inside updates."""

    @property
    def sort(self) -> Sort:
        return PROC

    def __str__(self) -> str:
        return 'j'


CASE_INDEX = CaseIndex()


@dataclass(frozen=True)
class GlobalVar:
    name: str
    sort: Sort

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ArrayRead:
    array: str
    index: Union[ProcParam, CaseIndex]
    sort: Sort

    def __str__(self) -> str:
        return f"{self.array}[{self.index}]"


@dataclass(frozen=True)
class EnumConst:
    value: str
    sort: EnumSort

    def __str__(self) -> str:
        return self.value


Term = Union[GlobalVar, ArrayRead, ProcParam, CaseIndex, EnumConst]


def enum_const(sort: EnumSort, value: str) -> EnumConst:
    return EnumConst(value, sort)


TRUE_CONST = EnumConst('true', BOOL)
FALSE_CONST = EnumConst('false', BOOL)


def term_key(term: Term) -> Tuple:
    if isinstance(term, GlobalVar):
        return (0, term.name, -1)
    if isinstance(term, ArrayRead):
        index = term.index.index if isinstance(term.index, ProcParam) else -1
        return (1, term.array, index)
    if isinstance(term, ProcParam):
        return (2, '', term.index)
    if isinstance(term, CaseIndex):
        return (3, '', -1)
    return (4, f"{term.sort.name}.{term.value}", -1)


def is_value(term: Term) -> bool:
    """Process constants and enum constructors: distinct values are distinct."""
    return isinstance(term, (ProcParam, EnumConst))


def rename_term(term: Term, mapping: Union[Mapping[int, int], Sequence[int]]) -> Term:
    if isinstance(term, ProcParam):
        return ProcParam(mapping[term.index])
    if isinstance(term, ArrayRead) and isinstance(term.index, ProcParam):
        return ArrayRead(term.array, ProcParam(mapping[term.index.index]), term.sort)
    return term


def replace_globals(term: Term, values: Mapping[str, Term]) -> Term:
    if isinstance(term, GlobalVar) and term.name in values:
        return values[term.name]
    return term


def instantiate_case(term: Term, elem: int) -> Term:
    """Bind the case index `j` of an update term to process `elem`."""
    if isinstance(term, ArrayRead) and isinstance(term.index, CaseIndex):
        return ArrayRead(term.array, ProcParam(elem), term.sort)
    if isinstance(term, CaseIndex):
        return ProcParam(elem)
    return term


def procs_of_term(term: Term) -> Set[int]:
    if isinstance(term, ProcParam):
        return {term.index}
    if isinstance(term, ArrayRead) and isinstance(term.index, ProcParam):
        return {term.index.index}
    return set()


@dataclass(frozen=True)
class Literal:
    lhs: Term
    rhs: Term
    positive: bool = True

    @property
    def key(self) -> Tuple:
        return (term_key(self.lhs), 0 if self.positive else 1, term_key(self.rhs))

    def procs(self) -> Set[int]:
        return procs_of_term(self.lhs) | procs_of_term(self.rhs)

    def negate(self) -> Union['Literal', bool]:
        return normalize(Literal(self.lhs, self.rhs, not self.positive))

    def __str__(self) -> str:
        op = '=' if self.positive else '<>'
        return f"{self.lhs} {op} {self.rhs}"


# A normalized literal, or a truth value when the literal is decided syntactically.
NormLiteral = Union[Literal, bool]


def normalize(lit: Literal) -> NormLiteral:
    """
    Put a literal in normal form.

    - identical sides decide the literal; two distinct process constants or two
      distinct constructors are different values
    - the side with the smaller term key goes left (constants end up right)
    - over a two-constructor enum, `t <> C` becomes `t = C'`
    """
    lhs, rhs, positive = lit.lhs, lit.rhs, lit.positive
    if lhs == rhs:
        return positive
    if is_value(lhs) and is_value(rhs):
        return not positive
    if term_key(rhs) < term_key(lhs):
        lhs, rhs = rhs, lhs
    if not positive and isinstance(rhs, EnumConst) and len(rhs.sort.constructors) == 2:
        other = next(c for c in rhs.sort.constructors if c != rhs.value)
        return Literal(lhs, EnumConst(other, rhs.sort), True)
    return Literal(lhs, rhs, positive)


def rename_literal(lit: Literal, mapping: Union[Mapping[int, int], Sequence[int]]) -> NormLiteral:
    return normalize(Literal(rename_term(lit.lhs, mapping), rename_term(lit.rhs, mapping), lit.positive))


def map_literal(lit: Literal, fn) -> NormLiteral:
    return normalize(Literal(fn(lit.lhs), fn(lit.rhs), lit.positive))


def procs_of(literals: Iterable[Literal]) -> Set[int]:
    used: Set[int] = set()
    for lit in literals:
        used |= lit.procs()
    return used


def proc_globals_of(literals: Iterable[Literal]) -> Set[str]:
    names: Set[str] = set()
    for lit in literals:
        for term in (lit.lhs, lit.rhs):
            if isinstance(term, GlobalVar) and term.sort == PROC:
                names.add(term.name)
    return names
