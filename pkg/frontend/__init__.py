"""Input language: lexer, parser, elaboration to the core system, printer."""

from frontend.elaborate import elaborate, load_system
from frontend.parser import parse
from frontend.printer import print_system

__all__ = ['parse', 'elaborate', 'load_system', 'print_system']
