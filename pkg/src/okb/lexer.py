"""Tokenizer shared by the knowledge-base DSL and the algebra expression syntax."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int
    end_column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, NUMBER, STRING, OP, EOF
    text: str
    span: Span


class LexError(Exception):
    def __init__(self, message: str, span: Span) -> None:
        super().__init__(message)
        self.message = message
        self.span = span


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+(?:\.\d+)?(?![A-Za-z_\d.]))
  | (?P<badnumber>\d[\w.]*)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op><=|>=|==|!=|[{}()\[\],;=<>+\-*/])
    """,
    re.VERBOSE,
)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def _unescape(body: str, span: Span) -> str:
    out = []
    chars = iter(body)
    for ch in chars:
        if ch != "\\":
            out.append(ch)
            continue
        nxt = next(chars)
        if nxt not in _ESCAPES:
            raise LexError(f"unknown escape '\\{nxt}' in string", span)
        out.append(_ESCAPES[nxt])
    return "".join(out)


def tokenize(text: str) -> Iterator[Token]:
    """Yield tokens with 1-based line/column spans, ending with an EOF token."""
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            span = Span(line, col, line, col + 1)
            raise LexError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        lexeme = m.group()
        span = Span(line, col, line, col + len(lexeme))
        pos = m.end()
        if kind == "badnumber":
            raise LexError(f"malformed number {lexeme!r}", span)
        if kind == "newline":
            line += 1
            line_start = pos
        elif kind == "number":
            yield Token("NUMBER", lexeme, span)
        elif kind == "name":
            yield Token("NAME", lexeme, span)
        elif kind == "string":
            yield Token("STRING", _unescape(lexeme[1:-1], span), span)
        elif kind == "op":
            yield Token("OP", lexeme, span)
    col = pos - line_start + 1
    yield Token("EOF", "", Span(line, col, line, col))


class TokenStream:
    """Cursor over a token list with small lookahead helpers."""

    def __init__(self, text: str) -> None:
        self.tokens = list(tokenize(text))
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.current
        return tok.kind == kind and (text is None or tok.text == text)

    def at_op(self, text: str) -> bool:
        return self.at("OP", text)

    def at_keyword(self, text: str) -> bool:
        return self.at("NAME", text)

    def accept_op(self, text: str) -> bool:
        if self.at_op(text):
            self.advance()
            return True
        return False

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        tok = self.current
        wanted = what or (repr(text) if text is not None else kind.lower())
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise SyntaxErrorAt(f"expected {wanted}, found {found}", tok.span)


class SyntaxErrorAt(Exception):
    def __init__(self, message: str, span: Span) -> None:
        super().__init__(message)
        self.message = message
        self.span = span
