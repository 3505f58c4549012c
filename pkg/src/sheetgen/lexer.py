"""Tokenizer for template source and compiled formula text.

Free format: whitespace is insignificant, statements end with a full stop.
`/* ... */` block comments and `// ...` line comments are recorded with
their positions so the parser can interleave prose with code spans.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

IDENT = "IDENT"
NUMBER = "NUMBER"
STRING = "STRING"
LPAREN = "("
RPAREN = ")"
LBRACKET = "["
RBRACKET = "]"
COMMA = ","
COLON = ":"
DOT = "."
ARROW = "->"
BANG = "!"
EQ = "="
NE = "<>"
LE = "<="
GE = ">="
LT = "<"
GT = ">"
PLUS = "+"
MINUS = "-"
STAR = "*"
SLASH = "/"
AMP = "&"
EOF = "EOF"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")


@dataclass(frozen=True)
class Token:
    type: str
    value: str
    line: int
    col: int
    start: int  # byte offsets into the source, for doc-span slicing
    end: int


@dataclass(frozen=True)
class Comment:
    text: str  # content without the comment markers
    line: int
    col: int
    start: int
    end: int


def tokenize(source: str) -> tuple[list[Token], list[Comment]]:
    if source.startswith("﻿"):
        source = source[1:]
    tokens: list[Token] = []
    comments: list[Comment] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    def emit(type_: str, value: str, start: int, l: int, c: int) -> None:
        tokens.append(Token(type_, value, l, c, start, i))

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        start, l, c = i, line, col
        if source.startswith("//", i):
            j = source.find("\n", i)
            j = n if j == -1 else j
            text = source[i + 2 : j].strip()
            advance(j - i)
            comments.append(Comment(text, l, c, start, i))
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j == -1:
                raise ParseError("unterminated block comment", l, c)
            text = source[i + 2 : j].strip()
            advance(j + 2 - i)
            comments.append(Comment(text, l, c, start, i))
            continue
        if ch in "\"'":
            quote = ch
            j = i + 1
            parts: list[str] = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string", l, c)
                if source[j] == quote:
                    if j + 1 < n and source[j + 1] == quote:  # doubled quote
                        parts.append(quote)
                        j += 2
                        continue
                    break
                parts.append(source[j])
                j += 1
            advance(j + 1 - i)
            emit(STRING, "".join(parts), start, l, c)
            continue
        m = _NUMBER_RE.match(source, i)
        if m:
            advance(m.end() - i)
            emit(NUMBER, m.group(), start, l, c)
            continue
        m = _IDENT_RE.match(source, i)
        if m:
            advance(m.end() - i)
            emit(IDENT, m.group(), start, l, c)
            continue
        if source.startswith("->", i):
            advance(2)
            emit(ARROW, "->", start, l, c)
            continue
        if source.startswith("<>", i):
            advance(2)
            emit(NE, "<>", start, l, c)
            continue
        if source.startswith("<=", i):
            advance(2)
            emit(LE, "<=", start, l, c)
            continue
        if source.startswith(">=", i):
            advance(2)
            emit(GE, ">=", start, l, c)
            continue
        if ch in "()[],:.=<>+-*/&!":
            advance(1)
            emit(ch, ch, start, l, c)
            continue
        raise ParseError(f"unexpected character {ch!r}", l, c)

    tokens.append(Token(EOF, "", line, col, n, n))
    return tokens, comments
