"""
Concrete counterexample traces from bad-cube provenance.

A provenance chain starts at a cube satisfiable with the initial condition
and follows, step by step, the transition that leads into the next bad cube
until unsafe is reached. The variables of the start cube are processes
0..k-1; each link says which cube variables carry the transition parameters
and the successor cube's variables.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

from services.verdicts import TraceStep


@dataclass(frozen=True)
class Link:
    transition: str
    params: Tuple[int, ...]
    succ: Tuple[int, ...]


def concrete_steps(nprocs: int, links: Iterable[Link]) -> Tuple[TraceStep, ...]:
    assignment: Dict[int, int] = {var: var for var in range(nprocs)}
    steps = []
    for link in links:
        steps.append(TraceStep(link.transition, tuple(assignment[var] for var in link.params)))
        assignment = {i: assignment[var] for i, var in enumerate(link.succ)}
    return tuple(steps)


def format_trace(model: str, nprocs: int, steps: Iterable[TraceStep]) -> str:
    lines = [f"model {model}", f"procs {nprocs}"]
    lines.extend(str(step) for step in steps)
    return '\n'.join(lines) + '\n'


def parse_trace(text: str) -> Tuple[str, int, Tuple[TraceStep, ...]]:
    """Inverse of format_trace. Raises ValueError on malformed input."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if len(lines) < 2 or not lines[0].startswith('model ') or not lines[1].startswith('procs '):
        raise ValueError('trace header must name the model and the number of processes')
    model = lines[0][len('model '):]
    nprocs = int(lines[1][len('procs '):])
    steps = []
    for line in lines[2:]:
        name, _, rest = line.partition('(')
        if not rest.endswith(')'):
            raise ValueError(f"malformed trace step '{line}'")
        body = rest[:-1].strip()
        procs = tuple(int(p) for p in body.split(',')) if body else ()
        steps.append(TraceStep(name.strip(), procs))
    return model, nprocs, tuple(steps)
