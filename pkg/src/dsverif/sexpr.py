"""Minimal SMT-LIB 2 reader: tokens with source positions, nested lists."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

__all__ = ["Atom", "SList", "SExprSyntaxError", "parse", "is_symbol"]

_TOKEN_RE = re.compile(r"""
      (?P<ws>\s+)
    | (?P<comment>;[^\n]*)
    | (?P<lpar>\()
    | (?P<rpar>\))
    | (?P<string>"(?:[^"]|"")*")
    | (?P<quoted>\|[^|\\]*\|)
    | (?P<atom>[^\s()";|]+)
""", re.VERBOSE)

_SIMPLE_SYMBOL = re.compile(r"^[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*$")


class SExprSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


@dataclass(frozen=True)
class Atom:
    text: str
    offset: int
    line: int
    column: int
    kind: str  # "atom", "quoted" or "string"


@dataclass
class SList:
    items: list
    start: int
    end: int  # offset one past the closing paren
    line: int
    column: int

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom):
            return self.items[0].text
        return None


Node = Union[Atom, SList]


def is_symbol(node) -> bool:
    if not isinstance(node, Atom):
        return False
    return node.kind == "quoted" or bool(_SIMPLE_SYMBOL.match(node.text))


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def parse(text: str) -> list[Node]:
    """Parse a sequence of top-level s-expressions.

    Raises :class:`SExprSyntaxError` for unbalanced parentheses or
    unterminated strings/quoted symbols.
    """
    stack: list[SList] = []
    top: list[Node] = []
    pos = 0
    while pos < len(text):
        mt = _TOKEN_RE.match(text, pos)
        if mt is None:
            line, col = _position(text, pos)
            what = "unterminated string" if text[pos] == '"' else "unterminated quoted symbol"
            raise SExprSyntaxError(what, line, col)
        kind = mt.lastgroup
        start, pos = pos, mt.end()
        if kind in ("ws", "comment"):
            continue
        line, col = _position(text, start)
        if kind == "lpar":
            stack.append(SList([], start, -1, line, col))
        elif kind == "rpar":
            if not stack:
                raise SExprSyntaxError("unexpected ')'", line, col)
            node = stack.pop()
            node.end = pos
            (stack[-1].items if stack else top).append(node)
        else:
            atom = Atom(mt.group(), start, line, col, kind)
            (stack[-1].items if stack else top).append(atom)
    if stack:
        open_ = stack[-1]
        raise SExprSyntaxError("unclosed '('", open_.line, open_.column)
    return top
