"""
Run artifacts: stats JSON, invariant and trace files, and the corpus table.

Stats records are checked against the JSON Schema in docs/stats_schema.json;
docs/stats_schema.md explains each key.
"""

import functools
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import jsonschema

from logic.worlds import World

STATS_SCHEMA_PATH = Path(__file__).resolve().parent.parent / 'docs' / 'stats_schema.json'

TABLE_COLUMNS = ('model', 'expected', 'far', 'backward')


@functools.lru_cache(maxsize=None)
def stats_schema() -> Dict[str, Any]:
    with open(STATS_SCHEMA_PATH, encoding='utf-8') as fh:
        return json.load(fh)


def validate_stats(stats: Dict[str, object]) -> List[str]:
    """Problems with a stats record; empty when it matches the schema exactly."""
    engine = stats.get('engine')
    shapes = stats_schema()['$defs']
    if not isinstance(engine, str) or engine not in shapes:
        return [f"unknown engine {engine!r}"]
    validator = jsonschema.Draft202012Validator(shapes[engine])
    problems = []
    for error in sorted(validator.iter_errors(stats), key=lambda e: (list(e.path), e.message)):
        where = '/'.join(str(part) for part in error.path) or '(record)'
        problems.append(f"{where}: {error.message}")
    return problems


def write_stats(path: str, stats: Dict[str, object]) -> None:
    problems = validate_stats(stats)
    if problems:
        raise ValueError('stats do not match the schema: ' + '; '.join(problems))
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
        fh.write('\n')


def render_invariant(worlds: Iterable[World]) -> str:
    return ''.join(f"{world}\n" for world in worlds)


def write_text(path: str, text: str) -> None:
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write(text)


def format_table(rows: Sequence[Dict[str, str]], timings: bool = False) -> str:
    """Fixed-width verdict table; elapsed columns only with `timings`."""
    columns: List[str] = list(TABLE_COLUMNS)
    if timings:
        columns += ['far_ms', 'backward_ms']
    widths = {col: max([len(col)] + [len(str(row.get(col, ''))) for row in rows]) for col in columns}

    def line(values: Dict[str, Optional[str]]) -> str:
        return '  '.join(str(values.get(col, '')).ljust(widths[col]) for col in columns).rstrip()

    out = [line({col: col for col in columns})]
    out.extend(line(row) for row in rows)
    return '\n'.join(out) + '\n'
