"""Logging wiring for the command line. stdout stays reserved for verdicts and reports."""

import logging
import sys

_FORMAT = '%(levelname)s %(name)s: %(message)s'


def level_for(verbosity: int) -> int:
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return logging.WARNING


def configure_logging(verbosity: int = 0) -> None:
    """-v shows INFO (per-run summaries), -vv DEBUG (every rule application)."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_farcheck', False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(stream=sys.stderr)
    handler.setFormatter(logging.Formatter(_FORMAT))
    handler._farcheck = True
    root.addHandler(handler)
    root.setLevel(level_for(verbosity))
