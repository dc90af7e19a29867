"""Surface syntax tree produced by the parser."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


@dataclass(frozen=True)
class TermAst:
    name: str
    index: Optional[str] = None
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return self.name if self.index is None else f"{self.name}[{self.index}]"


@dataclass(frozen=True)
class LitAst:
    lhs: TermAst
    rhs: TermAst
    positive: bool
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class TypeDecl:
    name: str
    constructors: Tuple[str, ...]
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class VarDecl:
    name: str
    sort: str
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class ArrayDecl:
    name: str
    sort: str
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class FormulaDecl:
    """An `init` or `unsafe` declaration."""
    params: Tuple[str, ...]
    literals: Tuple[LitAst, ...]
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class UpdateAst:
    """
    `x := t` (index None), `a[i] := t`, or the case form
    `a[j] := case | j = p : t | _ : d` (cases non-empty, value is the default).
    """
    target: str
    index: Optional[str]
    value: TermAst
    cases: Tuple[Tuple[LitAst, TermAst], ...] = ()
    is_case: bool = False
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class TransitionAst:
    name: str
    params: Tuple[str, ...]
    guard: Tuple[LitAst, ...]
    updates: Tuple[UpdateAst, ...]
    line: int = 0
    column: int = 0


@dataclass
class SystemAst:
    type_decls: Dict[str, TypeDecl] = field(default_factory=dict)
    globals: Dict[str, VarDecl] = field(default_factory=dict)
    arrays: Dict[str, ArrayDecl] = field(default_factory=dict)
    init: Optional[FormulaDecl] = None
    unsafe: Optional[FormulaDecl] = None
    transitions: List[TransitionAst] = field(default_factory=list)

    def constructor_owner(self, name: str) -> Optional[str]:
        for decl in self.type_decls.values():
            if name in decl.constructors:
                return decl.name
        return None
