"""
The elaborated system: what the engines consume.

Every transition carries one update per global and per array (identity
updates are made explicit), so priming a term never needs a frame rule.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Tuple

from logic.cubes import Cube
from logic.terms import (
    CASE_INDEX, ArrayRead, EnumSort, GlobalVar, Sort, Term, instantiate_case,
)
from logic.worlds import InitSpec


@dataclass(frozen=True)
class ArrayUpdate:
    """a'[j] = case j = p_k1 : t1 | ... | _ : default."""
    cases: Tuple[Tuple[int, Term], ...]
    default: Term

    def value_at(self, elem: int) -> Term:
        for param, term in self.cases:
            if param == elem:
                return instantiate_case(term, elem)
        return instantiate_case(self.default, elem)

    def is_identity(self, array: str) -> bool:
        return not self.cases and isinstance(self.default, ArrayRead) \
            and self.default.array == array and self.default.index == CASE_INDEX


def identity_update(array: str, sort: Sort) -> ArrayUpdate:
    return ArrayUpdate((), ArrayRead(array, CASE_INDEX, sort))


@dataclass(frozen=True)
class Transition:
    name: str
    nparams: int
    guard: Cube
    global_updates: Tuple[Tuple[str, Term], ...]
    array_updates: Tuple[Tuple[str, ArrayUpdate], ...]
    param_names: Tuple[str, ...] = field(default=(), compare=False)

    @cached_property
    def _globals(self) -> Dict[str, Term]:
        return dict(self.global_updates)

    @cached_property
    def _arrays(self) -> Dict[str, ArrayUpdate]:
        return dict(self.array_updates)

    def global_update(self, name: str) -> Term:
        return self._globals[name]

    def array_update(self, name: str) -> ArrayUpdate:
        return self._arrays[name]


@dataclass(frozen=True)
class CoreSystem:
    name: str
    enums: Tuple[EnumSort, ...]
    globals: Tuple[GlobalVar, ...]
    arrays: Tuple[Tuple[str, Sort], ...]
    init: InitSpec
    unsafe: Cube
    transitions: Tuple[Transition, ...]

    @cached_property
    def _by_name(self) -> Dict[str, Transition]:
        return {tr.name: tr for tr in self.transitions}

    def transition(self, name: str) -> Transition:
        return self._by_name[name]

    def array_sort(self, name: str) -> Sort:
        return dict(self.arrays)[name]

    @property
    def max_arity(self) -> int:
        return max([self.unsafe.nprocs] + [tr.nparams for tr in self.transitions])
