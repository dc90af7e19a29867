import itertools
import random

from logic.cubes import (
    BOTTOM, Cube, canonicalize, canonicalize_with_perm, compact, cube_id, make_cube, reduce_cubes,
    render_cube, substitute, subsumes,
)
from logic.terms import BOOL, ArrayRead, EnumConst, EnumSort, GlobalVar, Literal, ProcParam
from logic.worlds import World, entails_syntactically, strengthen
from utils.config import CANONICAL_CACHE_SIZE

STATE = EnumSort('state', ('A', 'B', 'C'))
X = GlobalVar('x', STATE)


def crit(i):
    return ArrayRead('crit', ProcParam(i), BOOL)


def want(i):
    return ArrayRead('want', ProcParam(i), BOOL)


def arr(i):
    return ArrayRead('s', ProcParam(i), STATE)


def is_true(term):
    return Literal(term, EnumConst('true', BOOL))


def is_(term, value, positive=True):
    return Literal(term, EnumConst(value, STATE), positive)


UNSAFE = make_cube(2, [is_true(crit(0)), is_true(crit(1))])


def random_literal(rng, nprocs):
    i = rng.randrange(nprocs)
    choice = rng.randrange(5)
    if choice == 0:
        return is_true(crit(i)) if rng.random() < 0.5 else Literal(crit(i), EnumConst('false', BOOL))
    if choice == 1:
        return is_true(want(i))
    if choice == 2:
        return is_(arr(i), rng.choice(STATE.constructors), rng.random() < 0.6)
    if choice == 3:
        return Literal(arr(i), arr(rng.randrange(nprocs)), rng.random() < 0.5)
    return is_(X, rng.choice(STATE.constructors), rng.random() < 0.6)


def random_cube(rng):
    nprocs = rng.randint(1, 3)
    return make_cube(nprocs, [random_literal(rng, nprocs) for _ in range(rng.randint(1, 4))])


def test_canonical_order_of_symmetric_cube():
    swapped = make_cube(2, [is_true(crit(1)), is_true(want(0))])
    straight = make_cube(2, [is_true(crit(0)), is_true(want(1))])
    assert canonicalize(swapped) == canonicalize(straight)


def test_contradictory_equalities_give_bottom():
    cube = make_cube(1, [is_(X, 'A'), is_(X, 'B')])
    assert cube.bottom
    assert canonicalize(cube) is BOTTOM


def test_every_constructor_excluded_gives_bottom():
    assert make_cube(0, [is_(X, value, False) for value in STATE.constructors]).bottom


def test_implied_disequality_is_dropped():
    cube = make_cube(0, [is_(X, 'A'), is_(X, 'B', False)])
    assert cube.literals == (is_(X, 'A'),)


def test_canonicalize_is_idempotent_and_permutation_invariant():
    rng = random.Random(20241)
    for _ in range(1000):
        cube = random_cube(rng)
        canon = canonicalize(cube)
        assert canonicalize(canon) == canon
        for perm in itertools.permutations(range(cube.nprocs)):
            assert canonicalize(substitute(cube, perm, cube.nprocs)) == canon


def test_substitute_identifying_variables_is_bottom():
    phi = make_cube(2, [is_true(crit(0)), Literal(crit(1), EnumConst('false', BOOL))])
    assert substitute(phi, {1: 0}).bottom


def test_substitute_renames():
    phi = make_cube(1, [is_true(crit(0))])
    assert substitute(phi, [2], 3) == make_cube(3, [is_true(crit(2))])


def test_subsumes_examples():
    one = make_cube(1, [is_true(crit(0))])
    assert subsumes(one, UNSAFE)
    assert subsumes(UNSAFE, UNSAFE)
    bigger = canonicalize(make_cube(3, [is_true(crit(0)), is_true(crit(1)), is_true(want(2))]))
    assert subsumes(UNSAFE, bigger)
    assert not subsumes(make_cube(1, [is_true(want(0))]), one)
    assert not subsumes(UNSAFE, one)


def _holds(cube, cells, x, binding):
    """Evaluate a cube over explicit values: cells[array][proc]."""
    def value(term):
        if isinstance(term, ArrayRead):
            return cells[term.array][binding[term.index.index]]
        if isinstance(term, GlobalVar):
            return x
        return term.value

    return all((value(lit.lhs) == value(lit.rhs)) == lit.positive for lit in cube.literals)


def _sat_somewhere(cube, cells, x, n):
    return any(_holds(cube, cells, x, b) for b in itertools.permutations(range(n), cube.nprocs))


def test_subsumption_is_sound():
    rng = random.Random(7)
    n = 3
    checked = 0
    while checked < 150:
        general, specific = canonicalize(random_cube(rng)), canonicalize(random_cube(rng))
        if general.bottom or specific.bottom or not subsumes(general, specific):
            continue
        checked += 1
        for _ in range(40):
            cells = {
                'crit': [rng.choice(BOOL.constructors) for _ in range(n)],
                'want': [rng.choice(BOOL.constructors) for _ in range(n)],
                's': [rng.choice(STATE.constructors) for _ in range(n)],
            }
            x = rng.choice(STATE.constructors)
            if _sat_somewhere(specific, cells, x, n):
                assert _sat_somewhere(general, cells, x, n)


def test_substitute_commutes_with_canonicalize():
    rng = random.Random(99)
    n = 4
    checked = 0
    while checked < 300:
        cube = random_cube(rng)
        if cube.bottom:
            continue
        checked += 1
        m = rng.randint(cube.nprocs, n)
        sigma = rng.sample(range(m), cube.nprocs)
        renamed = substitute(cube, sigma, m)
        assert canonicalize(renamed) == canonicalize(substitute(canonicalize(cube), sigma, m))
        for _ in range(10):
            cells = {
                'crit': [rng.choice(BOOL.constructors) for _ in range(n)],
                'want': [rng.choice(BOOL.constructors) for _ in range(n)],
                's': [rng.choice(STATE.constructors) for _ in range(n)],
            }
            x = rng.choice(STATE.constructors)
            assert _sat_somewhere(renamed, cells, x, n) == _sat_somewhere(cube, cells, x, n)


def test_reduce_cubes_keeps_the_weakest():
    one = make_cube(1, [is_true(crit(0))])
    assert reduce_cubes([UNSAFE, one, BOTTOM, one]) == [one]
    other = make_cube(1, [is_true(want(0))])
    assert reduce_cubes([other, one]) == sorted([one, other], key=lambda c: c.key)


def test_reduce_cubes_reads_cubes_off_items():
    one = make_cube(1, [is_true(crit(0))])
    tagged = [('second', UNSAFE), ('first', one)]
    assert reduce_cubes(tagged, lambda item: item[1]) == [('first', one)]


def test_canonical_cache_is_bounded():
    assert canonicalize_with_perm.cache_info().maxsize == CANONICAL_CACHE_SIZE
    canonicalize(UNSAFE)
    assert canonicalize_with_perm.cache_info().currsize <= CANONICAL_CACHE_SIZE


def test_compact_drops_unused_variables():
    cube = make_cube(3, [is_true(crit(2))])
    assert compact(cube) == make_cube(1, [is_true(crit(0))])


def test_cube_ids_are_stable():
    cube = make_cube(2, [is_true(crit(1)), is_true(want(0))])
    assert cube_id(cube) == cube_id(canonicalize(cube))


def test_render_cube():
    assert render_cube(UNSAFE) == '∃p0,p1. crit[p0] = true && crit[p1] = true'
    assert render_cube(BOTTOM) == '⊥'
    assert render_cube(Cube(0, ())) == 'true'


def test_strengthen_top_with_unsafe():
    world = strengthen(World.top(), UNSAFE)
    assert world.negated == (UNSAFE,)
    assert str(world) == '⊤ ∧ ¬(∃p0,p1. crit[p0] = true && crit[p1] = true)'


def test_strengthen_is_idempotent():
    world = strengthen(World.top(), UNSAFE)
    assert strengthen(world, UNSAFE) == world


def test_strengthen_reduces_by_subsumption():
    world = strengthen(World.top(), UNSAFE)
    general = make_cube(1, [is_true(crit(0))])
    stronger = strengthen(world, general)
    assert stronger.negated == (general,)
    assert strengthen(stronger, UNSAFE) == stronger


def test_strengthen_twice():
    gamma1 = make_cube(2, [is_true(want(0)), is_true(crit(1))])
    gamma2 = make_cube(2, [is_true(want(0)), is_true(want(1))])
    world = strengthen(strengthen(strengthen(World.top(), UNSAFE), gamma1), gamma2)
    assert len(world.negated) == 3


def test_empty_cube_strengthens_to_bottom():
    assert strengthen(World.top(), Cube(0, ())).is_bottom


def test_syntactic_entailment():
    weak = strengthen(World.top(), UNSAFE)
    strong = strengthen(World.top(), make_cube(1, [is_true(crit(0))]))
    assert entails_syntactically(strong, weak)
    assert not entails_syntactically(weak, strong)
    assert entails_syntactically(World.bottom(), weak)
    assert entails_syntactically(weak, World.top())
