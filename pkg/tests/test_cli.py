import json

import pytest

from farcheck import DiffReport, diff_mode, main
from frontend import elaborate, parse
from oracles.explicit import replay_trace
from services.traces import parse_trace
from services.verdicts import Safe
from utils import corpus
from utils.config import RunConfig
from utils.logging_setup import level_for
from utils.report import format_table, stats_schema, validate_stats, write_stats


@pytest.fixture
def model():
    return corpus.model_path


NEVER_UNSAFE = """
array A[proc] : bool
init (z) { A[z] = true }
unsafe (z) { A[z] = true && A[z] = false }
transition flip (i) requires { A[i] = false } { A[i] := true; }
"""


def stdout_lines(capsys):
    return capsys.readouterr().out.splitlines()


def test_safe_model(model, capsys):
    assert main(['check', model('dekker')]) == 0
    assert stdout_lines(capsys)[0] == 'SAFE'


def test_unsafe_model_writes_a_replayable_trace(model, tmp_path, capsys, load_model):
    trace_file = tmp_path / 'trace.txt'
    assert main(['check', model('broken_dekker'), '--trace', str(trace_file)]) == 10
    lines = stdout_lines(capsys)
    assert lines[0] == 'UNSAFE'
    name, procs, steps = parse_trace(trace_file.read_text())
    assert name == 'broken_dekker'
    assert [str(step) for step in steps] == lines[1:]
    assert replay_trace(load_model('broken_dekker'), steps, procs)


def test_safe_model_writes_its_invariant(model, tmp_path, capsys):
    inv_file = tmp_path / 'inv.txt'
    assert main(['check', model('dekker'), '--invariant', str(inv_file)]) == 0
    worlds = inv_file.read_text().splitlines()
    assert worlds and worlds[0].startswith('init')


def test_inconclusive_exit_code(model, capsys):
    assert main(['check', model('dekker'), '--max-steps', '1']) == 20
    assert stdout_lines(capsys)[0] == 'INCONCLUSIVE(max-steps)'


@pytest.mark.parametrize('engine', ['far', 'backward'])
def test_stats_file_matches_the_schema(model, tmp_path, capsys, engine):
    stats_file = tmp_path / 'stats.json'
    assert main(['check', model('mux_sem'), '--engine', engine, '--stats', str(stats_file)]) == 0
    stats = json.loads(stats_file.read_text())
    assert stats['engine'] == engine
    assert stats['verdict'] == 'SAFE'
    assert validate_stats(stats) == []


def test_dot_output(model, tmp_path, capsys):
    dot_file = tmp_path / 'graph.dot'
    assert main(['check', model('dekker'), '--dot', str(dot_file), '--hide-sink']) == 0
    dot = dot_file.read_text()
    assert dot.startswith('digraph unwinding {')
    assert 'ω' not in dot


@pytest.mark.parametrize('engine', ['far', 'backward', 'diff'])
def test_dump_queries(model, tmp_path, capsys, engine):
    dump_file = tmp_path / 'queries.jsonl'
    assert main(['check', model('dekker'), '--engine', engine, '--dump-queries', str(dump_file)]) == 0
    records = [json.loads(line) for line in dump_file.read_text().splitlines()]
    assert records


def test_explicit_engine(model, capsys):
    assert main(['check', model('broken_dekker'), '--engine', 'explicit', '--procs', '2']) == 10
    lines = stdout_lines(capsys)
    assert lines[0] == 'UNSAFE'
    assert len(lines) == 5


@pytest.mark.parametrize('argv', [
    ['check'],
    ['check', 'models/dekker.fcub', '--engine', 'nope'],
    ['check', 'models/dekker.fcub', '--max-steps', 'many'],
    ['frobnicate'],
])
def test_bad_arguments(argv, capsys):
    assert main(argv) == 2


def test_explicit_needs_procs(model, capsys):
    assert main(['check', model('dekker'), '--engine', 'explicit']) == 2
    assert '--procs' in capsys.readouterr().err


def test_explicit_with_too_few_procs(model, capsys):
    assert main(['check', model('dekker'), '--engine', 'explicit', '--procs', '1']) == 2


def test_procs_without_explicit(model, capsys):
    assert main(['check', model('dekker'), '--procs', '2']) == 2


def test_missing_file(tmp_path, capsys):
    assert main(['check', str(tmp_path / 'absent.fcub')]) == 2
    assert capsys.readouterr().out == ''


def test_syntax_error_names_the_position(tmp_path, capsys):
    bad = tmp_path / 'bad.fcub'
    bad.write_text('var Flag bool\n')
    assert main(['check', str(bad)]) == 2
    assert f"{bad}:1:10:" in capsys.readouterr().err


def test_print_subcommand(model, capsys, load_model):
    assert main(['print', model('mux_sem')]) == 0
    printed = capsys.readouterr().out
    assert elaborate(parse(printed), 'mux_sem') == load_model('mux_sem')


def test_diff_mode_is_consistent(model, capsys):
    assert main(['check', model('dekker'), '--engine', 'diff']) == 0
    lines = stdout_lines(capsys)
    assert lines[0] == 'SAFE'
    assert 'backward: SAFE' in lines
    assert 'explicit(N=2): SAFE' in lines
    assert 'audit(N=3): ok' in lines
    assert lines[-1] == 'CONSISTENT'


def test_diff_mode_on_a_mutant(model, capsys):
    assert main(['check', model('broken_mux_sem'), '--engine', 'diff']) == 10
    lines = stdout_lines(capsys)
    assert lines[0] == 'UNSAFE'
    assert lines[-1] == 'CONSISTENT'


@pytest.mark.parametrize('name', corpus.get_models())
def test_diff_mode_over_the_corpus(model, capsys, name):
    expected = corpus.expected_verdict(name)
    assert main(['check', model(name), '--engine', 'diff']) == (0 if expected == 'SAFE' else 10)
    lines = stdout_lines(capsys)
    assert lines[0] == expected
    assert lines[-1] == 'CONSISTENT'


def test_contradictory_unsafe_formula_is_safe(tmp_path, capsys):
    path = tmp_path / 'never.fcub'
    path.write_text(NEVER_UNSAFE)
    assert main(['check', str(path)]) == 0
    assert stdout_lines(capsys)[0] == 'SAFE'
    assert main(['check', str(path), '--engine', 'diff']) == 0
    assert stdout_lines(capsys)[-1] == 'CONSISTENT'


def test_engine_value_error_is_an_engine_bug(model, capsys):
    def broken(system, config):
        raise ValueError('process list does not fit')

    assert main(['check', model('dekker')], engines={'far': broken}) == 4
    assert 'engine bug' in capsys.readouterr().err
    assert main(['check', model('dekker'), '--engine', 'diff'], engines={'backward': broken}) == 4


def test_wrong_engine_is_reported(model, capsys):
    lying = {'far': lambda system, config: Safe(())}
    assert main(['check', model('broken_dekker'), '--engine', 'diff'], engines=lying) == 3
    lines = stdout_lines(capsys)
    assert lines[0] == 'SAFE'
    assert lines[-1] == 'INCONSISTENT'
    assert any(line.startswith('problem: ') for line in lines)


def test_explicit_search_catches_a_missed_violation(load_model):
    blind = {'far': lambda system, config: Safe(()), 'backward': lambda system, config: Safe(())}
    report = diff_mode(load_model('broken_dekker'), RunConfig(), blind)
    assert isinstance(report, DiffReport)
    assert not report.consistent
    assert report.rows[:2] == [('far', 'SAFE'), ('backward', 'SAFE')]
    assert ('explicit(N=2)', 'UNSAFE') in report.rows


def test_corpus_table(capsys):
    assert main(['corpus', '--timings']) == 0
    lines = stdout_lines(capsys)
    assert lines[0].split() == ['model', 'expected', 'far', 'backward', 'far_ms', 'backward_ms']
    assert len(lines) == 1 + len(corpus.get_models())


def test_format_table():
    rows = [{'model': 'dekker', 'expected': 'SAFE', 'far': 'SAFE', 'backward': 'SAFE',
             'far_ms': '12', 'backward_ms': '3'}]
    assert format_table(rows) == 'model   expected  far   backward\ndekker  SAFE      SAFE  SAFE\n'
    assert '12' in format_table(rows, timings=True).splitlines()[1]


def test_validate_stats():
    good = {'engine': 'explicit', 'verdict': 'SAFE', 'procs': 2, 'states': 5, 'elapsed_ms': 1}
    assert validate_stats(good) == []
    extra = validate_stats({**good, 'extra': 1})
    assert len(extra) == 1 and "'extra'" in extra[0]
    flag = validate_stats({**good, 'procs': True})
    assert len(flag) == 1 and flag[0].startswith('procs:')
    missing = validate_stats({k: v for k, v in good.items() if k != 'states'})
    assert len(missing) == 1 and "'states'" in missing[0]
    assert validate_stats({**good, 'states': -1}) != []
    assert validate_stats({'engine': 'smt'}) == ["unknown engine 'smt'"]


def test_stats_schema_document_covers_every_engine():
    shapes = stats_schema()['$defs']
    assert set(shapes) == {'far', 'backward', 'explicit'}
    for shape in shapes.values():
        assert shape['additionalProperties'] is False
        assert set(shape['required']) == set(shape['properties'])


def test_write_stats_refuses_bad_records(tmp_path):
    with pytest.raises(ValueError):
        write_stats(str(tmp_path / 'stats.json'), {'engine': 'far'})


def test_verbosity_levels():
    assert level_for(0) == 30
    assert level_for(1) == 20
    assert level_for(3) == 10
