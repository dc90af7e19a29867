import itertools
import random

import pytest

from far_engine import FarEngine
from logic.cubes import make_cube
from logic.terms import BOOL, ArrayRead, EnumConst, Literal, ProcParam
from logic.worlds import World, strengthen
from oracles.explicit import ExplicitModel
from services.transitions import (
    enabled, identifications, post_entails, post_intersects_bad, pre_image, pre_image_with_origins,
)
from utils.config import RunConfig

TRUE = EnumConst('true', BOOL)


def crit(i):
    return ArrayRead('Crit', ProcParam(i), BOOL)


def test_identifications():
    assert list(identifications(1, 1)) == [(0,), (1,)]
    assert list(identifications(2, 1)) == [(0, 1), (1, 0), (1, 2)]
    assert len(list(identifications(2, 0))) == 1


def test_enabled_in_initial_world(load_model):
    system = load_model('dekker')
    init = World.initial(system.init)
    assert enabled(init, system.transition('req'))
    assert not enabled(init, system.transition('enter'))
    assert not enabled(init, system.transition('exit'))
    assert not enabled(World.bottom(), system.transition('req'))


def test_post_of_init(load_model):
    system = load_model('dekker')
    init = World.initial(system.init)
    req = system.transition('req')
    no_crit = strengthen(World.top(), make_cube(1, [Literal(crit(0), TRUE)]))
    assert not post_intersects_bad(init, req, system.unsafe).is_sat
    assert post_entails(init, req, no_crit)
    assert post_entails(no_crit, req, no_crit)
    assert not post_entails(no_crit, system.transition('enter'), no_crit)
    assert not post_entails(init, req, World.bottom())


def test_disabled_transition_entails_anything(load_model):
    system = load_model('dekker')
    init = World.initial(system.init)
    assert post_entails(init, system.transition('exit'), World.bottom())


def test_post_intersects_bad(load_model):
    system = load_model('broken_dekker')
    enter = system.transition('enter')
    world = strengthen(World.top(), system.unsafe)
    assert post_intersects_bad(world, enter, system.unsafe).is_sat
    crit_and_want = make_cube(2, [Literal(crit(0), TRUE), Literal(ArrayRead('Want', ProcParam(1), BOOL), TRUE)])
    assert not post_intersects_bad(strengthen(world, crit_and_want), enter, system.unsafe).is_sat


def test_pre_image_of_unsafe_under_enter(load_model):
    system = load_model('dekker')
    found = pre_image_with_origins(system.unsafe, system.transition('enter'))
    assert len(found) == 1
    pre = found[0]
    assert pre.cube.nprocs == 2
    rendered = str(pre.cube)
    assert 'Turn = ' in rendered and 'Want[' in rendered and 'Crit[' in rendered
    assert len(pre.params) == 1 and len(pre.succ) == 2


def test_uniform_update_leaves_no_predecessor(load_model):
    system = load_model('german_ish')
    cstate = system.array_sort('Cache')
    exclusive = make_cube(1, [Literal(ArrayRead('Cache', ProcParam(0), cstate), EnumConst('Exclusive', cstate))])
    assert pre_image(exclusive, system.transition('inv_all')) == ()


def _true_predecessor(model, state, tr, bad):
    for procs in itertools.permutations(range(model.n), tr.nparams):
        nxt = model.fire(state, tr, procs)
        if nxt is not None and model.holds_cube(nxt, bad):
            return True
    return False


def _engine_bads(system, limit):
    engine = FarEngine(system, RunConfig(max_steps=20000))
    engine.check()
    bads = [system.unsafe]
    for _, cube in engine.graph.all_bad_cubes():
        if cube not in bads:
            bads.append(cube)
    return bads[:limit]


@pytest.mark.parametrize('name,sample', [
    ('dekker', None),
    ('mux_sem', None),
    ('german_ish', None),
    ('german_ish2', 400),
])
def test_pre_image_is_exact_at_three_processes(load_model, name, sample):
    system = load_model(name)
    model = ExplicitModel(system, 3)
    states = list(model.all_states())
    if sample is not None:
        states = random.Random(5).sample(states, sample)
    for bad in _engine_bads(system, 20):
        for tr in system.transitions:
            pres = pre_image(bad, tr)
            for state in states:
                symbolic = any(model.holds_cube(state, cube) for cube in pres)
                assert symbolic == _true_predecessor(model, state, tr, bad), (bad, tr.name, state)


@pytest.mark.parametrize('name', ['dekker', 'mux_sem', 'broken_dekker'])
def test_post_entails_rules_out_every_negated_cube(load_model, name):
    system = load_model(name)
    engine = FarEngine(system)
    engine.check()
    worlds = [vertex.world for vertex in engine.graph.vertices] + [World.top()]
    for world in worlds:
        for tr in system.transitions:
            for target in worlds:
                entailed = post_entails(world, tr, target)
                hits = [cube for cube in target.negation_cubes()
                        if post_intersects_bad(world, tr, cube).is_sat]
                if entailed:
                    assert not hits, (str(world), tr.name, str(target))
                elif not target.is_bottom:
                    assert hits, (str(world), tr.name, str(target))
