"""
Cubes: existentially quantified conjunctions of literals over pairwise distinct
process variables p0..p(n-1).

Canonical cubes are interned in a process-wide store so that equality is cheap
and every canonical cube gets a stable id for the lifetime of the process.
Canonicalization results are kept in a bounded LRU cache.
"""

import functools
import itertools
import threading
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, TypeVar, Union

from logic.terms import EnumConst, Literal, is_value, normalize, rename_literal
from utils.config import CANONICAL_CACHE_SIZE

T = TypeVar('T')


@dataclass(frozen=True)
class Cube:
    nprocs: int
    literals: Tuple[Literal, ...] = ()
    bottom: bool = False

    @property
    def key(self) -> Tuple:
        return (self.nprocs, tuple(lit.key for lit in self.literals))

    def procs_used(self) -> List[int]:
        used = set()
        for lit in self.literals:
            used |= lit.procs()
        return sorted(used)

    def __str__(self) -> str:
        return render_cube(self)


BOTTOM = Cube(0, (), True)
# The cube with no constraint at all: every state satisfies it.
TRUE_CUBE = Cube(0, ())


def _simplify(lits: Sequence[Literal]) -> Optional[List[Literal]]:
    """Detect syntactic conflicts and drop implied disequalities. None means bottom."""
    present = set(lits)
    values: Dict[object, object] = {}
    for lit in lits:
        if not lit.positive:
            continue
        if Literal(lit.lhs, lit.rhs, False) in present:
            return None
        if is_value(lit.rhs):
            seen = values.get(lit.lhs)
            if seen is not None and seen != lit.rhs:
                return None
            values[lit.lhs] = lit.rhs
    excluded: Dict[object, set] = {}
    kept = []
    for lit in lits:
        if not lit.positive and is_value(lit.rhs):
            known = values.get(lit.lhs)
            if known is not None:
                if known == lit.rhs:
                    return None
                continue
            if isinstance(lit.rhs, EnumConst):
                excluded.setdefault(lit.lhs, set()).add(lit.rhs.value)
                if len(excluded[lit.lhs]) == len(lit.rhs.sort.constructors):
                    return None
        kept.append(lit)
    return kept


def make_cube(nprocs: int, literals: Iterable[Literal]) -> Cube:
    """Normalize literals into a cube without renaming variables."""
    seen: Dict[Literal, None] = {}
    for lit in literals:
        norm = normalize(lit) if isinstance(lit, Literal) else lit
        if norm is True:
            continue
        if norm is False:
            return BOTTOM
        seen[norm] = None
    kept = _simplify(list(seen))
    if kept is None:
        return BOTTOM
    return Cube(nprocs, tuple(sorted(kept, key=lambda lit: lit.key)))


class CubeStore:
    """Thread-safe hash-consing of canonical cubes."""

    def __init__(self):
        self._lock = threading.Lock()
        self._cubes: Dict[Cube, Cube] = {}
        self._ids: Dict[Cube, int] = {}

    def intern(self, cube: Cube) -> Cube:
        with self._lock:
            found = self._cubes.get(cube)
            if found is None:
                self._cubes[cube] = cube
                self._ids[cube] = len(self._ids)
                found = cube
            return found

    def id_of(self, cube: Cube) -> int:
        return self._ids[self.intern(cube)]

    def __len__(self) -> int:
        return len(self._cubes)


STORE = CubeStore()


@functools.lru_cache(maxsize=CANONICAL_CACHE_SIZE)
def canonicalize_with_perm(cube: Cube) -> Tuple[Cube, Tuple[int, ...]]:
    """
    Canonical representative of a cube and the renaming that produced it:
    perm[i] is the new index of variable i. Minimises the sorted literal list
    over all permutations of the bound variables.
    """
    if cube.bottom:
        return BOTTOM, ()
    base = make_cube(cube.nprocs, cube.literals)
    if base.bottom:
        return BOTTOM, ()
    # Variables no literal mentions never lower the key: they go last.
    used = base.procs_used()
    unused = [i for i in range(base.nprocs) if i not in set(used)]
    best = None
    for order in itertools.permutations(range(len(used))):
        perm = [0] * base.nprocs
        for var, target in zip(used, order):
            perm[var] = target
        for offset, var in enumerate(unused):
            perm[var] = len(used) + offset
        candidate = make_cube(base.nprocs, (rename_literal(lit, perm) for lit in base.literals))
        key = tuple(lit.key for lit in candidate.literals)
        if best is None or key < best[0]:
            best = (key, candidate, perm)
    return STORE.intern(best[1]), tuple(best[2])


def canonicalize(cube: Cube) -> Cube:
    return canonicalize_with_perm(cube)[0]


def cube_of(nprocs: int, literals: Iterable[Literal]) -> Cube:
    return canonicalize(make_cube(nprocs, literals))


def substitute(cube: Cube, sigma: Union[Mapping[int, int], Sequence[int]], nprocs: Optional[int] = None) -> Cube:
    """Rename process variables; identifying two variables gives bottom."""
    if cube.bottom:
        return BOTTOM
    if isinstance(sigma, Mapping):
        targets = [sigma.get(i, i) for i in range(cube.nprocs)]
    else:
        targets = list(sigma)
    if len(set(targets)) < len(targets):
        return BOTTOM
    if nprocs is None:
        nprocs = max(targets) + 1 if targets else 0
    return make_cube(nprocs, (rename_literal(lit, targets) for lit in cube.literals))


def subsumes(general: Cube, specific: Cube) -> bool:
    """
    True when some injective renaming maps every literal of `general` onto a
    literal of `specific`, so `specific` implies `general`.
    """
    if specific.bottom:
        return True
    if general.bottom or general.nprocs > specific.nprocs:
        return False
    if len(general.literals) > len(specific.literals):
        return False
    target = set(specific.literals)
    by_last: Dict[int, List[Literal]] = {}
    for lit in general.literals:
        procs = lit.procs()
        if not procs:
            if lit not in target:
                return False
            continue
        by_last.setdefault(max(procs), []).append(lit)
    n = general.nprocs
    mapping: List[int] = [0] * n
    used = set()

    def extend(i: int) -> bool:
        if i == n:
            return True
        for j in range(specific.nprocs):
            if j in used:
                continue
            mapping[i] = j
            if all(rename_literal(lit, mapping) in target for lit in by_last.get(i, ())):
                used.add(j)
                if extend(i + 1):
                    return True
                used.discard(j)
        return False

    return extend(0)


def compact(cube: Cube) -> Cube:
    """Drop process variables no literal mentions, then canonicalize."""
    if cube.bottom:
        return BOTTOM
    used = cube.procs_used()
    if len(used) == cube.nprocs:
        return canonicalize(cube)
    mapping = {old: new for new, old in enumerate(used)}
    return canonicalize(make_cube(len(used), (rename_literal(lit, mapping) for lit in cube.literals)))


def cube_id(cube: Cube) -> int:
    return STORE.id_of(canonicalize(cube))


def _identity(cube: Cube) -> Cube:
    return cube


def render_cube(cube: Cube) -> str:
    if cube.bottom:
        return '⊥'
    body = ' && '.join(str(lit) for lit in cube.literals) or 'true'
    if cube.nprocs == 0:
        return body
    return '∃' + ','.join(f"p{i}" for i in range(cube.nprocs)) + '. ' + body


def reduce_cubes(items: Iterable[T], cube_from: Callable[[T], Cube] = _identity) -> List[T]:
    """
    Subsumption-reduce a disjunction, deterministically ordered by cube key.
    `cube_from` reads the cube off each item; of two items with the same cube
    the first in key order survives.
    """
    kept: List[T] = []
    for item in sorted(items, key=lambda it: cube_from(it).key):
        cube = cube_from(item)
        if cube.bottom or any(subsumes(cube_from(other), cube) for other in kept):
            continue
        kept = [other for other in kept if not subsumes(cube, cube_from(other))]
        kept.append(item)
    return kept
