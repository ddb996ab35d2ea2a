"""Tokenizer and s-expression reader with 1-based line/column tracking."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .diagnostics import PddlError, error

# Characters accepted inside a symbol. Everything else outside whitespace,
# parentheses and comments is a lex error.
_SYMBOL_CHARS = re.compile(r"[A-Za-z0-9_\-?:.+*/<>=!@]+")
_WHITESPACE = " \t\r\n\f\v"


@dataclass(frozen=True)
class Token:
    kind: str  # "(", ")" or "sym"
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Symbol:
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple[Node, ...]
    line: int
    col: int

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)


Node = Union[Symbol, SList]


def tokenize(text: str) -> Iterator[Token]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in _WHITESPACE:
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield Token(ch, ch, line, col)
            col += 1
            i += 1
        else:
            m = _SYMBOL_CHARS.match(text, i)
            if m is None:
                raise PddlError([error("BAD_TOKEN", f"unexpected character {ch!r}", line, col)])
            yield Token("sym", m.group(), line, col)
            col += m.end() - i
            i = m.end()


def read(text: str) -> list[Node]:
    """Read every top-level form in ``text``.

    Iterative so that pathological nesting cannot exhaust the Python stack.
    """
    stack: list[tuple[list[Node], int, int]] = []
    top: list[Node] = []
    for tok in tokenize(text):
        if tok.kind == "(":
            stack.append(([], tok.line, tok.col))
        elif tok.kind == ")":
            if not stack:
                raise PddlError([error("UNBALANCED_PARENS", "unexpected ')'", tok.line, tok.col)])
            items, line, col = stack.pop()
            node = SList(tuple(items), line, col)
            (stack[-1][0] if stack else top).append(node)
        else:
            sym = Symbol(tok.text, tok.line, tok.col)
            (stack[-1][0] if stack else top).append(sym)
    if stack:
        _, line, col = stack[-1]
        raise PddlError([error("UNBALANCED_PARENS", "unclosed '('", line, col)])
    return top
