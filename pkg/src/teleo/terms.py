"""Term data model, the Pedro text codec, substitution and one-sided matching.

Terms are immutable. A ``Bindings`` is a plain ``dict`` from variable name to
ground term; functions here never mutate one they were given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple, Union

from .errors import InternalError, TermSyntaxError
from .lexer import Token, tokenize


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True, eq=False)
class Number:
    """Integer or float literal. ``10`` and ``10.0`` are different terms."""

    value: Union[int, float]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Number)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((type(self.value), self.value))

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Str:
    value: str

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class List:
    items: Tuple["Term", ...] = ()

    def __post_init__(self):
        if not isinstance(self.items, tuple):
            object.__setattr__(self, "items", tuple(self.items))

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Compound:
    functor: str
    args: Tuple["Term", ...]

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("a compound needs at least one argument; use Atom")

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Atom, Number, Str, Var, List, Compound]
Bindings = Dict[str, Term]

# binding strength of the infix operators understood on the wire
OPERATORS = {
    "&": 1,
    ">": 2, ">=": 2, "==": 2, "<=": 2, "<": 2,
    "+": 3, "-": 3,
    "*": 4, "/": 4,
}
COMPARISONS = frozenset({">", ">=", "==", "<=", "<"})


def functor_of(t: Term) -> Optional[Tuple[str, int]]:
    """``(name, arity)`` of an atom or compound, else None."""
    if isinstance(t, Compound):
        return t.functor, len(t.args)
    if isinstance(t, Atom):
        return t.name, 0
    return None


def term_args(t: Term) -> Tuple[Term, ...]:
    return t.args if isinstance(t, Compound) else ()


# ---------------------------------------------------------------- parsing


class _TermParser:
    def __init__(self, text: str, tokens: list[Token], pos: int = 0):
        self.text = text
        self.tokens = tokens
        self.pos = pos

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise TermSyntaxError(message, tok.offset, self.text)

    def is_punct(self, value: str) -> bool:
        t = self.tok
        return t.kind == "punct" and t.value == value

    def expect(self, value: str) -> Token:
        if not self.is_punct(value):
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            self.error(f"expected {value!r}, found {found}")
        tok = self.tok
        self.pos += 1
        return tok

    def term(self, level: int = 1) -> Term:
        left = self.primary()
        return self.infix(left, level)

    def infix(self, left: Term, level: int) -> Term:
        while True:
            t = self.tok
            if t.kind != "punct" or t.value not in OPERATORS:
                return left
            prec = OPERATORS[t.value]
            if prec < level:
                return left
            self.pos += 1
            # comparisons do not chain; everything else is left-associative
            right = self.term(prec + 1)
            left = Compound(t.value, (left, right))
            if prec == 2 and self.tok.kind == "punct" and OPERATORS.get(self.tok.value) == 2:
                self.error("comparison operators do not associate")

    def primary(self) -> Term:
        t = self.tok
        if t.kind in ("int", "float"):
            self.pos += 1
            if t.kind == "float" and not math.isfinite(t.value):
                self.error("number out of range", t)
            return Number(t.value)
        if t.kind == "string":
            self.pos += 1
            return Str(t.value)
        if t.kind == "var":
            self.pos += 1
            return Var(t.value)
        if t.kind == "name":
            self.pos += 1
            if self.is_punct("("):
                self.pos += 1
                if self.is_punct(")"):
                    self.pos += 1
                    return Atom(t.value)
                args = [self.term()]
                while self.is_punct(","):
                    self.pos += 1
                    args.append(self.term())
                self.expect(")")
                return Compound(t.value, tuple(args))
            return Atom(t.value)
        if self.is_punct("["):
            self.pos += 1
            items = []
            if not self.is_punct("]"):
                items.append(self.term())
                while self.is_punct(","):
                    self.pos += 1
                    items.append(self.term())
            self.expect("]")
            return List(tuple(items))
        if self.is_punct("("):
            self.pos += 1
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind == "eof":
            self.error("unexpected end of input")
        self.error(f"unexpected token {t.text!r}")


def parse_term(text: str) -> Term:
    """Parse one complete term; trailing input is an error."""
    tokens = tokenize(text)
    p = _TermParser(text, tokens)
    if tokens[0].kind == "eof":
        p.error("empty input")
    try:
        t = p.term()
    except RecursionError:
        raise TermSyntaxError("nesting too deep", p.tok.offset, text) from None
    if p.tok.kind != "eof":
        p.error(f"unexpected trailing {p.tok.text!r}")
    return t


# ---------------------------------------------------------------- formatting


def _format_str(s: str) -> str:
    body = (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
        .replace("\r", "\\r")
    )
    return f'"{body}"'


def _format(t: Term, level: int) -> str:
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Number):
        return repr(t.value)
    if isinstance(t, Str):
        return _format_str(t.value)
    if isinstance(t, List):
        return "[" + ",".join(_format(i, 1) for i in t.items) + "]"
    if isinstance(t, Compound):
        prec = OPERATORS.get(t.functor)
        if prec is not None and len(t.args) == 2:
            lhs_level = prec + 1 if prec == 2 else prec
            text = f"{_format(t.args[0], lhs_level)}{t.functor}{_format(t.args[1], prec + 1)}"
            return f"({text})" if prec < level else text
        return t.functor + "(" + ",".join(_format(a, 1) for a in t.args) + ")"
    raise TypeError(f"not a term: {t!r}")


def format_term(t: Term) -> str:
    """Canonical text: no whitespace, operators infix, minimal parentheses."""
    return _format(t, 1)


# ---------------------------------------------------------------- substitution


def substitute(t: Term, b: Bindings) -> Term:
    if isinstance(t, Var):
        return b.get(t.name, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(substitute(a, b) for a in t.args))
    if isinstance(t, List):
        return List(tuple(substitute(i, b) for i in t.items))
    return t


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Compound):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, List):
        return all(is_ground(i) for i in t.items)
    return True


def variables(t: Term) -> Iterator[str]:
    """Variable names in left-to-right order, repeats included."""
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, Compound):
        for a in t.args:
            yield from variables(a)
    elif isinstance(t, List):
        for i in t.items:
            yield from variables(i)


# ---------------------------------------------------------------- matching


def _match(q: Term, g: Term, b: Bindings) -> Optional[Bindings]:
    # b may be extended in place; callers pass a private copy
    if isinstance(q, Var):
        bound = b.get(q.name)
        if bound is None:
            b[q.name] = g
            return b
        return b if bound == g else None
    if isinstance(q, Compound):
        if not isinstance(g, Compound) or q.functor != g.functor or len(q.args) != len(g.args):
            return None
        for x, y in zip(q.args, g.args):
            if _match(x, y, b) is None:
                return None
        return b
    if isinstance(q, List):
        if not isinstance(g, List) or len(q.items) != len(g.items):
            return None
        for x, y in zip(q.items, g.items):
            if _match(x, y, b) is None:
                return None
        return b
    return b if q == g else None


def match_unchecked(query: Term, ground: Term, b: Bindings) -> Optional[Bindings]:
    """Like :func:`match` but trusts ``ground`` to be ground; None on failure."""
    return _match(query, ground, dict(b))


def match(query: Term, ground: Term, b: Bindings) -> Tuple[bool, Optional[Bindings]]:
    """Match ``query`` (may hold variables) against a ground term.

    Returns ``(True, out)`` where ``out`` extends ``b`` minimally, or
    ``(False, None)``. Variables already in ``b`` must agree with ``ground``.
    """
    if not is_ground(ground):
        raise InternalError(f"match against non-ground term {format_term(ground)}")
    out = _match(query, ground, dict(b))
    if out is None:
        return False, None
    return True, out
