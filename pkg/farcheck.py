#!/usr/bin/env python3
"""
farcheck command line.

    farcheck check FILE [--engine far|backward|explicit|diff] [flags]
    farcheck corpus [--timings]
    farcheck print FILE

The first stdout line of `check` is always the verdict token. Exit codes:
0 safe, 10 unsafe, 20 inconclusive, 2 usage or input error, 3 inconsistent
engines, 4 a certificate failed its re-check.
"""

import argparse
import logging
import sys
from contextlib import ExitStack
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from far_engine import FarEngine, export_dot
from frontend import load_system, print_system
from logic.system import CoreSystem
from oracles.backward import BackwardReach
from oracles.explicit import audit_invariant, explicit_reach
from services.query_dump import QueryDump
from services.solver import Solver
from services.traces import format_trace
from services.verdicts import (
    EXIT_ENGINE_BUG, EXIT_INCONSISTENT, EXIT_USAGE, Inconclusive, Safe, Unsafe,
    Verdict, exit_code, kind,
)
from utils import corpus
from utils.config import DEFAULT_MAX_STEPS, DIFF_PROCS, ENGINES, QUEUE_ORDERS, RunConfig
from utils.errors import AuditFailure, FrontendError, ReplayFailure, StateLimit
from utils.logging_setup import configure_logging
from utils.report import format_table, render_invariant, write_stats, write_text

logger = logging.getLogger('farcheck')

EngineFn = Callable[[CoreSystem, RunConfig], Verdict]


# engines

def run_far(system: CoreSystem, config: RunConfig, solver: Optional[Solver] = None) -> Verdict:
    engine = FarEngine(system, config, solver)
    verdict = engine.check()
    if config.dot_path:
        write_text(config.dot_path, export_dot(engine.graph, config.hide_sink) + '\n')
    return verdict


def run_backward(system: CoreSystem, config: RunConfig, solver: Optional[Solver] = None) -> Verdict:
    return BackwardReach(system, config, solver).run()


def run_explicit(system: CoreSystem, config: RunConfig, solver: Optional[Solver] = None) -> Verdict:
    try:
        verdict = explicit_reach(system, config.procs, config.state_limit)
    except StateLimit as exc:
        logger.info('explicit search stopped: %s', exc)
        verdict = Inconclusive(exc.reason, {'states': config.state_limit, 'elapsed_ms': 0})
    verdict.stats.update({'engine': 'explicit', 'verdict': verdict.token, 'procs': config.procs})
    return verdict


DEFAULT_ENGINES: Dict[str, EngineFn] = {
    'far': run_far,
    'backward': run_backward,
    'explicit': run_explicit,
}


# differential mode

@dataclass
class DiffReport:
    far: Verdict
    rows: List[Tuple[str, str]] = field(default_factory=list)
    problems: List[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.problems

    def lines(self) -> List[str]:
        out = [self.far.token]
        out.extend(f"{label}: {token}" for label, token in self.rows)
        out.extend(f"problem: {problem}" for problem in self.problems)
        out.append('CONSISTENT' if self.consistent else 'INCONSISTENT')
        return out


def diff_mode(system: CoreSystem, config: RunConfig,
              engines: Optional[Dict[str, EngineFn]] = None,
              dump: Optional[QueryDump] = None) -> DiffReport:
    """
    Run FAR, backward reachability and explicit search at each size in
    DIFF_PROCS and check that their verdicts fit together: FAR and backward
    agree when both conclude, a FAR Safe verdict is Safe for explicit search
    and its invariant passes the concrete audit, and an explicit Unsafe
    verdict is Unsafe for FAR.

    Each default engine gets its own solver, logging to `dump` when given.
    """
    injected = engines or {}

    def run(name: str, engine_config: RunConfig) -> Verdict:
        if name in injected:
            return injected[name](system, engine_config)
        solver = Solver(branch_budget=config.branch_budget, dump=dump)
        return DEFAULT_ENGINES[name](system, engine_config, solver)

    far = run('far', config.with_engine('far'))
    backward = run('backward', config.with_engine('backward'))
    report = DiffReport(far, [('far', far.token), ('backward', backward.token)])
    conclusive = ('SAFE', 'UNSAFE')
    if kind(far) in conclusive and kind(backward) in conclusive and kind(far) != kind(backward):
        report.problems.append(f"far says {far.token}, backward says {backward.token}")
    for n in DIFF_PROCS:
        if n < system.max_arity:
            report.rows.append((f"explicit(N={n})", 'skipped'))
            continue
        explicit = run('explicit', config.with_engine('explicit', n))
        report.rows.append((f"explicit(N={n})", explicit.token))
        if isinstance(far, Safe) and isinstance(explicit, Unsafe):
            report.problems.append(f"far says SAFE, explicit finds a violation at N={n}")
        if isinstance(explicit, Unsafe) and not isinstance(far, Unsafe):
            report.problems.append(f"explicit finds a violation at N={n}, far says {far.token}")
        if isinstance(far, Safe):
            ok = audit_invariant(system, far.invariant, n)
            report.rows.append((f"audit(N={n})", 'ok' if ok else 'failed'))
            if not ok:
                report.problems.append(f"the far invariant fails the concrete audit at N={n}")
    return report


# subcommands

def _config_from_args(args) -> RunConfig:
    config = RunConfig(
        engine=args.engine,
        procs=args.procs,
        max_steps=args.max_steps,
        timeout_s=args.timeout,
        queue_order=args.queue_order,
        dot_path=args.dot,
        hide_sink=args.hide_sink,
        stats_path=args.stats,
        trace_path=args.trace,
        invariant_path=args.invariant,
        dump_queries_path=args.dump_queries,
        check_graph=args.check_graph,
        verbosity=args.verbose,
    )
    config.validate()
    return config


def cmd_check(args, engines: Optional[Dict[str, EngineFn]] = None) -> int:
    config = _config_from_args(args)
    system = load_system(args.file)
    report = None
    with ExitStack() as stack:
        dump = stack.enter_context(QueryDump(config.dump_queries_path)) if config.dump_queries_path else None
        if config.engine == 'explicit' and config.procs < system.max_arity:
            raise ValueError(f"{system.name} needs --procs of at least {system.max_arity}")
        try:
            if config.engine == 'diff':
                report = diff_mode(system, config, engines, dump)
                verdict = report.far
            else:
                injected = (engines or {}).get(config.engine)
                solver = Solver(branch_budget=config.branch_budget, dump=dump)
                verdict = injected(system, config) if injected else DEFAULT_ENGINES[config.engine](system, config, solver)
        except ValueError as exc:
            raise AuditFailure(f"{config.engine} engine failed on {system.name}: {exc}") from exc
        if report is not None:
            print('\n'.join(report.lines()))
        else:
            print(verdict.token)
            if isinstance(verdict, Unsafe):
                for step in verdict.trace:
                    print(step)
    if isinstance(verdict, Unsafe) and config.trace_path:
        write_text(config.trace_path, format_trace(system.name, verdict.procs, verdict.trace))
    if isinstance(verdict, Safe) and config.invariant_path:
        write_text(config.invariant_path, render_invariant(verdict.invariant))
    if config.stats_path:
        write_stats(config.stats_path, verdict.stats)
    if report is not None and not report.consistent:
        return EXIT_INCONSISTENT
    return exit_code(verdict)


def corpus_rows(config: RunConfig) -> List[Dict[str, str]]:
    rows = []
    for name in corpus.get_models():
        system = load_system(corpus.model_path(name))
        far = run_far(system, config.with_engine('far'))
        backward = run_backward(system, config.with_engine('backward'))
        rows.append({
            'model': name,
            'expected': corpus.expected_verdict(name),
            'far': far.token,
            'backward': backward.token,
            'far_ms': str(far.stats.get('elapsed_ms', '')),
            'backward_ms': str(backward.stats.get('elapsed_ms', '')),
        })
    return rows


def cmd_corpus(args) -> int:
    config = RunConfig(max_steps=args.max_steps, timeout_s=args.timeout, verbosity=args.verbose)
    config.validate()
    rows = corpus_rows(config)
    sys.stdout.write(format_table(rows, timings=args.timings))
    mismatched = [row['model'] for row in rows
                  if row['far'] != row['expected'] or row['backward'] != row['expected']]
    for name in mismatched:
        logger.warning('%s does not match its expected verdict', name)
    return EXIT_INCONSISTENT if mismatched else 0


def cmd_print(args) -> int:
    sys.stdout.write(print_system(load_system(args.file)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for run summaries, -vv for every rule application')

    parser = argparse.ArgumentParser(prog='farcheck', description='FAR safety checker for array-based systems')
    sub = parser.add_subparsers(dest='command', required=True)

    check = sub.add_parser('check', parents=[common], help='check one .fcub model')
    check.add_argument('file')
    check.add_argument('--engine', choices=ENGINES, default='far')
    check.add_argument('--procs', type=int, help='number of processes for --engine explicit')
    check.add_argument('--max-steps', type=int, default=DEFAULT_MAX_STEPS)
    check.add_argument('--timeout', type=float, help='seconds')
    check.add_argument('--queue-order', choices=QUEUE_ORDERS, default='procs')
    check.add_argument('--dot', help='write the final unwinding as DOT')
    check.add_argument('--hide-sink', action='store_true', help='leave ω and its edges out of the DOT file')
    check.add_argument('--stats', help='write run statistics as JSON')
    check.add_argument('--trace', help='write the counterexample of an UNSAFE verdict')
    check.add_argument('--invariant', help='write the worlds of a SAFE verdict, one per line')
    check.add_argument('--dump-queries', help='log every solver query as JSON lines')
    check.add_argument('--check-graph', action='store_true', help='re-check edge soundness after every rule')

    bundled = sub.add_parser('corpus', parents=[common], help='run FAR and backward on the bundled models')
    bundled.add_argument('--timings', action='store_true', help='add elapsed-ms columns')
    bundled.add_argument('--max-steps', type=int, default=DEFAULT_MAX_STEPS)
    bundled.add_argument('--timeout', type=float)

    printer = sub.add_parser('print', parents=[common], help='print the elaborated model')
    printer.add_argument('file')
    return parser


def main(argv: Optional[Sequence[str]] = None, engines: Optional[Dict[str, EngineFn]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    configure_logging(args.verbose)
    try:
        if args.command == 'check':
            return cmd_check(args, engines)
        if args.command == 'corpus':
            return cmd_corpus(args)
        return cmd_print(args)
    except FrontendError as exc:
        print(f"{getattr(args, 'file', 'farcheck')}:{exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"farcheck: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"farcheck: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AuditFailure, ReplayFailure) as exc:
        print(f"farcheck: engine bug: {exc}", file=sys.stderr)
        return EXIT_ENGINE_BUG


if __name__ == '__main__':
    sys.exit(main())
