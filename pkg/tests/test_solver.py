import itertools
import random

import pytest

from logic.cubes import make_cube
from logic.terms import (
    BOOL, PROC, ArrayRead, EnumConst, EnumSort, GlobalVar, Literal, ProcParam, is_value,
)
from logic.worlds import InitSpec, World, strengthen
from services.solver import Query, Solver, entails_world, sat, trivial_unsat
from utils.errors import ResourceLimit

STATE = EnumSort('state', ('A', 'B', 'C'))
X = GlobalVar('x', STATE)
Y = GlobalVar('y', BOOL)
G = GlobalVar('g', PROC)
TURN = GlobalVar('Turn', PROC)
TRUE = EnumConst('true', BOOL)
FALSE = EnumConst('false', BOOL)


def s(i):
    return ArrayRead('s', ProcParam(i), STATE)


def b(i):
    return ArrayRead('b', ProcParam(i), BOOL)


def crit(i):
    return ArrayRead('crit', ProcParam(i), BOOL)


def want(i):
    return ArrayRead('want', ProcParam(i), BOOL)


def random_literal(rng, nconst):
    i, k = rng.randrange(nconst), rng.randrange(nconst)
    positive = rng.random() < 0.6
    choice = rng.randrange(7)
    if choice == 0:
        return Literal(X, EnumConst(rng.choice(STATE.constructors), STATE), positive)
    if choice == 1:
        return Literal(Y, rng.choice([TRUE, FALSE]), positive)
    if choice == 2:
        return Literal(s(i), EnumConst(rng.choice(STATE.constructors), STATE), positive)
    if choice == 3:
        return Literal(b(i), rng.choice([TRUE, FALSE]), positive)
    if choice == 4:
        return Literal(s(i), s(k), positive)
    if choice == 5:
        return Literal(X, s(i), positive)
    return Literal(G, ProcParam(i), positive)


def brute_force_sat(nconst, literals):
    """Enumerate values of every term in the query; g ranges over the constants plus one more."""
    terms = sorted({t for lit in literals for t in (lit.lhs, lit.rhs) if not is_value(t)}, key=str)
    domains = [list(range(nconst + 1)) if t == G else list(t.sort.constructors) for t in terms]
    for values in itertools.product(*domains):
        env = dict(zip(terms, values))

        def val(t):
            if t in env:
                return env[t]
            return t.index if isinstance(t, ProcParam) else t.value

        if all((val(lit.lhs) == val(lit.rhs)) == lit.positive for lit in literals):
            return True
    return False


def test_random_queries_agree_with_enumeration():
    rng = random.Random(1234)
    solver = Solver()
    for _ in range(1000):
        nconst = rng.randint(1, 3)
        literals = tuple(random_literal(rng, nconst) for _ in range(rng.randint(1, 5)))
        result = solver.sat(Query(nconst, literals))
        assert result.is_sat == brute_force_sat(nconst, literals), literals
        if trivial_unsat(literals):
            assert not result.is_sat
        if result.is_sat:
            assert all(result.model.evaluate(lit) for lit in literals), literals


def test_trivial_unsat_examples():
    assert trivial_unsat([Literal(X, EnumConst('A', STATE)), Literal(X, EnumConst('A', STATE), False)])
    assert trivial_unsat([Literal(X, s(0)), Literal(s(0), EnumConst('A', STATE)),
                          Literal(X, EnumConst('B', STATE))])
    assert trivial_unsat([Literal(ProcParam(0), ProcParam(1))])
    assert not trivial_unsat([Literal(X, EnumConst('A', STATE))])


def test_every_constructor_excluded_is_unsat():
    lits = tuple(Literal(s(0), EnumConst(c, STATE), False) for c in STATE.constructors)
    assert not trivial_unsat(lits)
    assert not sat(Query(1, lits)).is_sat


def test_init_world_is_instantiated():
    init = World.initial(InitSpec(1, (Literal(crit(0), FALSE),)))
    assert not sat(Query(1, (Literal(crit(0), TRUE),), (init,))).is_sat
    assert sat(Query(1, (Literal(want(0), TRUE),), (init,))).is_sat


def test_negated_cubes_are_universal():
    no_crit = strengthen(World.top(), make_cube(1, [Literal(crit(0), TRUE)]))
    assert not sat(Query(2, (Literal(crit(1), TRUE),), (no_crit,))).is_sat
    assert sat(Query(2, (Literal(crit(1), FALSE),), (no_crit,))).is_sat


def test_proc_global_is_split_over_constants_and_elsewhere():
    owner = make_cube(1, [Literal(TURN, ProcParam(0), False), Literal(crit(0), TRUE)])
    world = strengthen(World.top(), owner)
    both = (Literal(crit(0), TRUE), Literal(crit(1), TRUE))
    assert not sat(Query(2, both, (world,))).is_sat
    result = sat(Query(2, both[:1], (world,)))
    assert result.is_sat
    assert result.model.proc_value('Turn') == 0
    away = sat(Query(1, (Literal(TURN, ProcParam(0), False),)))
    assert away.is_sat and away.model.universe == 2


def test_bottom_world_is_unsat():
    assert not sat(Query(0, (), (World.bottom(),))).is_sat


def test_contradictory_init_is_unsat():
    init = World.initial(InitSpec(1, (), contradictory=True))
    assert not sat(Query(0, (), (init,))).is_sat


def test_entails_world_examples():
    unsafe = make_cube(2, [Literal(crit(0), TRUE), Literal(crit(1), TRUE)])
    not_unsafe = strengthen(World.top(), unsafe)
    assert entails_world(2, (Literal(crit(0), FALSE), Literal(crit(1), FALSE)), not_unsafe)
    assert not entails_world(2, (Literal(crit(0), TRUE), Literal(crit(1), TRUE)), not_unsafe)
    assert entails_world(2, (Literal(crit(0), TRUE),), World.top())
    assert not entails_world(1, (), World.bottom())
    assert entails_world(1, (Literal(crit(0), TRUE), Literal(crit(0), FALSE)), World.bottom())


def test_entailment_is_antitone_in_the_world():
    gamma = make_cube(2, [Literal(want(0), TRUE), Literal(crit(1), TRUE)])
    unsafe = make_cube(2, [Literal(crit(0), TRUE), Literal(crit(1), TRUE)])
    weak = strengthen(World.top(), unsafe)
    strong = strengthen(weak, gamma)
    rng = random.Random(99)
    for _ in range(200):
        lits = tuple(Literal(rng.choice([crit, want])(rng.randrange(2)), rng.choice([TRUE, FALSE]))
                     for _ in range(rng.randint(1, 4)))
        if entails_world(2, lits, strong):
            assert entails_world(2, lits, weak)


def test_branch_budget():
    solver = Solver(branch_budget=1)
    lits = (Literal(G, ProcParam(0), False), Literal(G, ProcParam(1), False))
    with pytest.raises(ResourceLimit):
        solver.sat(Query(2, lits))


def test_call_counter():
    solver = Solver()
    solver.sat(Query(1, (Literal(crit(0), TRUE),)))
    solver.sat(Query(1, (Literal(crit(0), FALSE),)))
    assert solver.calls == 2


def random_plain_literal(rng, n):
    """A random literal that mentions no proc-sorted global."""
    while True:
        lit = random_literal(rng, n)
        if G not in (lit.lhs, lit.rhs):
            return lit


def random_world(rng):
    if rng.random() < 0.3:
        body = make_cube(1, [random_plain_literal(rng, 1) for _ in range(rng.randint(1, 2))])
        world = World.initial(InitSpec(1, body.literals)) if not body.bottom else World.top()
    else:
        world = World.top()
    for _ in range(rng.randint(1, 2)):
        width = rng.randint(1, 2)
        cube = make_cube(width, [random_plain_literal(rng, width) for _ in range(rng.randint(1, 3))])
        if not cube.bottom:
            world = strengthen(world, cube)
    return world


def brute_force_sat_with_worlds(nconst, literals, worlds):
    """Enumerate every cell of the constants; world clauses range over the same elements."""
    procs = range(nconst)
    for svals, bvals, x, y in itertools.product(
            itertools.product(STATE.constructors, repeat=nconst),
            itertools.product(BOOL.constructors, repeat=nconst),
            STATE.constructors, BOOL.constructors):
        cells = {'s': svals, 'b': bvals}

        def holds(lit, binding):
            def val(t):
                if isinstance(t, ArrayRead):
                    return cells[t.array][binding[t.index.index]]
                if t == X:
                    return x
                if t == Y:
                    return y
                return t.value
            return (val(lit.lhs) == val(lit.rhs)) == lit.positive

        if not all(holds(lit, procs) for lit in literals):
            continue
        ok = True
        for world in worlds:
            if world.init is not None and not all(holds(lit, (e,)) for e in procs for lit in world.init.literals):
                ok = False
            for cube in world.negated:
                for binding in itertools.permutations(procs, cube.nprocs):
                    if all(holds(lit, binding) for lit in cube.literals):
                        ok = False
        if ok:
            return True
    return False


def test_random_queries_with_worlds_agree_with_enumeration():
    rng = random.Random(4321)
    solver = Solver()
    for _ in range(300):
        nconst = rng.randint(1, 3)
        literals = tuple(random_plain_literal(rng, nconst) for _ in range(rng.randint(1, 3)))
        worlds = tuple(random_world(rng) for _ in range(rng.randint(1, 2)))
        result = solver.sat(Query(nconst, literals, worlds))
        expected = brute_force_sat_with_worlds(nconst, literals, worlds)
        assert result.is_sat == expected, (literals, [str(w) for w in worlds])
        if result.is_sat:
            assert all(result.model.evaluate(lit) for lit in literals), literals
