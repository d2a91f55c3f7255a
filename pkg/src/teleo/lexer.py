"""Tokenizer shared by the wire-term parser and the program parser."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import TermSyntaxError

# longest first
PUNCT = (
    "::=", "~>", "::", "..", "||", ">=", "<=", "==",
    "|", ">", "<", "+", "-", "*", "/", "(", ")", "[", "]", "{", "}",
    ",", "&", ":", ";", "=",
)

# after these a '-' directly followed by a digit starts a negative literal
_NEG_CONTEXT = frozenset({
    "(", "[", "{", ",", "&", "|", "||", ":", "::=", "~>", "..",
    ">", ">=", "==", "<=", "<", "+", "-", "*", "/", ";", "=",
})

_NAME = re.compile(r"[a-z_][A-Za-z0-9_]*")
_VAR = re.compile(r"[A-Z][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?")
_SPACE = re.compile(r"[ \t\r\n]+")
_DIGITS = frozenset("0123456789")
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # name | var | int | float | string | punct | eof
    value: object
    offset: int
    line: int
    col: int
    text: str = ""


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def tokenize(text: str, comments: bool = False) -> list[Token]:
    """Split ``text`` into tokens, raising TermSyntaxError on stray input.

    With ``comments`` set, ``%`` starts a comment running to end of line.
    """
    tokens: list[Token] = []
    pos = 0
    n = len(text)
    line, line_start = 1, 0

    def make(kind: str, value: object, start: int, end: int) -> Token:
        return Token(kind, value, start, line, start - line_start + 1, text[start:end])

    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            m = _SPACE.match(text, pos)
            chunk = m.group(0)
            nl = chunk.count("\n")
            if nl:
                line += nl
                line_start = pos + chunk.rfind("\n") + 1
            pos = m.end()
            continue
        if comments and ch == "%":
            end = text.find("\n", pos)
            pos = n if end < 0 else end
            continue
        start = pos
        if ch == '"':
            pos += 1
            out = []
            while True:
                if pos >= n:
                    raise TermSyntaxError("unterminated string", start, text)
                c = text[pos]
                if c == '"':
                    pos += 1
                    break
                if c == "\\":
                    if pos + 1 >= n or text[pos + 1] not in _ESCAPES:
                        raise TermSyntaxError("bad escape in string", pos, text)
                    out.append(_ESCAPES[text[pos + 1]])
                    pos += 2
                    continue
                if c == "\n":
                    raise TermSyntaxError("newline in string", pos, text)
                out.append(c)
                pos += 1
            tokens.append(make("string", "".join(out), start, pos))
            continue
        negative = (
            ch == "-"
            and pos + 1 < n
            and text[pos + 1] in _DIGITS
            and (not tokens or (tokens[-1].kind == "punct" and tokens[-1].value in _NEG_CONTEXT))
        )
        if ch in _DIGITS or negative:
            m = _NUMBER.match(text, pos + 1 if negative else pos)
            literal = text[start:m.end()]
            if "." in literal or "e" in literal or "E" in literal:
                tokens.append(make("float", float(literal), start, m.end()))
            else:
                tokens.append(make("int", int(literal), start, m.end()))
            pos = m.end()
            continue
        m = _NAME.match(text, pos)
        if m:
            tokens.append(make("name", m.group(0), start, m.end()))
            pos = m.end()
            continue
        m = _VAR.match(text, pos)
        if m:
            tokens.append(make("var", m.group(0), start, m.end()))
            pos = m.end()
            continue
        for p in PUNCT:
            if text.startswith(p, pos):
                tokens.append(make("punct", p, start, start + len(p)))
                pos += len(p)
                break
        else:
            raise TermSyntaxError(f"unexpected character {ch!r}", pos, text)
    tokens.append(Token("eof", None, n, line, n - line_start + 1))
    return tokens


def line_col(text: str, offset: int) -> tuple[int, int]:
    return _line_col(text, offset)
