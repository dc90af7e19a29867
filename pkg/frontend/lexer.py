"""Tokenizer for .fcub files. Comments are `(* ... *)` and nest."""

import re
from dataclasses import dataclass
from typing import List

from utils.errors import FcubSyntaxError

KEYWORDS = {
    'type', 'var', 'array', 'init', 'unsafe', 'transition', 'requires',
    'case', 'proc', 'bool', 'true', 'false', 'forall_other',
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<nl>\n)
  | (?P<comment>\(\*)
  | (?P<op>&&|<>|:=|[=|:;()\[\]{}])
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # 'KW', 'ID', 'OP', 'EOF'
    text: str
    line: int
    column: int

    def __str__(self) -> str:
        return 'end of input' if self.kind == 'EOF' else f"'{self.text}'"


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise FcubSyntaxError(f"unexpected character '{text[pos]}'", line, column)
        kind = match.lastgroup
        value = match.group()
        if kind == 'nl':
            line += 1
            line_start = match.end()
            pos = match.end()
            continue
        if kind == 'comment':
            pos, line, line_start = _skip_comment(text, match.end(), line, line_start, column)
            continue
        if kind == 'op':
            tokens.append(Token('OP', value, line, column))
        elif kind == 'name':
            if value == '_':
                tokens.append(Token('OP', value, line, column))
            else:
                tokens.append(Token('KW' if value in KEYWORDS else 'ID', value, line, column))
        pos = match.end()
    tokens.append(Token('EOF', '', line, pos - line_start + 1))
    return tokens


def _skip_comment(text: str, pos: int, line: int, line_start: int, column: int):
    start_line = line
    depth = 1
    while depth:
        if pos >= len(text):
            raise FcubSyntaxError('unterminated comment', start_line, column)
        if text.startswith('(*', pos):
            depth += 1
            pos += 2
        elif text.startswith('*)', pos):
            depth -= 1
            pos += 2
        else:
            if text[pos] == '\n':
                line += 1
                line_start = pos + 1
            pos += 1
    return pos, line, line_start
