"""AST for TR programs and a debug printer that re-parses to an equal AST."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

from .terms import Term, format_term, functor_of, variables

DECLARATION_KINDS = ("percept", "belief", "durative", "discrete")
BELIEF_ACTIONS = ("remember", "forget")


@dataclass(frozen=True, slots=True)
class Loc:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def _loc() -> Optional[Loc]:
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------- types


@dataclass(frozen=True, slots=True)
class AtomDisjunction:
    atoms: Tuple[str, ...]


@dataclass(frozen=True, slots=True)
class TypeUnion:
    types: Tuple[str, ...]


@dataclass(frozen=True, slots=True)
class IntRange:
    min: int
    max: int


TypeBody = Union[AtomDisjunction, TypeUnion, IntRange]


@dataclass(frozen=True, slots=True)
class TypeDef:
    name: str
    body: TypeBody
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True, slots=True)
class Declaration:
    kind: str
    name: str
    arg_types: Tuple[str, ...] = ()
    loc: Optional[Loc] = _loc()


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True, slots=True)
class NumberLit:
    value: Union[int, float]


@dataclass(frozen=True, slots=True)
class VarRef:
    name: str


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[NumberLit, VarRef, BinOp]


def expr_vars(e: Expr):
    if isinstance(e, VarRef):
        yield e.name
    elif isinstance(e, BinOp):
        yield from expr_vars(e.lhs)
        yield from expr_vars(e.rhs)


# ---------------------------------------------------------------- conditions


@dataclass(frozen=True, slots=True)
class Query:
    term: Term
    loc: Optional[Loc] = _loc()

    @property
    def functor(self) -> Tuple[str, int]:
        return functor_of(self.term)


@dataclass(frozen=True, slots=True)
class NegatedQuery:
    query: Query
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True, slots=True)
class Comparison:
    lhs: Expr
    op: str
    rhs: Expr
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True, slots=True)
class TrueLiteral:
    loc: Optional[Loc] = _loc()


Condition = Union[Query, NegatedQuery, Comparison, TrueLiteral]


def condition_vars(c: Condition):
    if isinstance(c, Query):
        yield from variables(c.term)
    elif isinstance(c, NegatedQuery):
        yield from variables(c.query.term)
    elif isinstance(c, Comparison):
        yield from expr_vars(c.lhs)
        yield from expr_vars(c.rhs)


# ---------------------------------------------------------------- rules


class ActionKind(enum.Enum):
    PROC_CALL = "ProcCall"
    ACTION_TUPLE = "ActionTuple"


@dataclass(frozen=True, slots=True)
class RuleAction:
    """Right-hand side: one procedure call or a (possibly empty) action tuple."""

    items: Tuple[Term, ...] = ()
    locs: Tuple[Loc, ...] = field(default=(), compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Rule:
    guard: Tuple[Condition, ...]
    rhs: RuleAction
    while_cond: Tuple[Condition, ...] = ()
    while_min: Union[int, float] = 0
    until_cond: Tuple[Condition, ...] = ()
    until_min: Union[int, float] = 0
    loc: Optional[Loc] = _loc()

    @property
    def has_continuation(self) -> bool:
        """True when any while/until clause differs from its default."""
        return bool(self.while_cond or self.until_cond or self.while_min or self.until_min)


@dataclass(frozen=True, slots=True)
class Procedure:
    name: str
    params: Tuple[str, ...]
    rules: Tuple[Rule, ...]
    loc: Optional[Loc] = _loc()


@dataclass
class Program:
    type_defs: Tuple[TypeDef, ...] = ()
    declarations: Tuple[Declaration, ...] = ()
    proc_sigs: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    procedures: Dict[str, Procedure] = field(default_factory=dict)
    sig_locs: Dict[str, Loc] = field(default_factory=dict, compare=False, repr=False)

    def declaration(self, name: str) -> Optional[Declaration]:
        for d in self.declarations:
            if d.name == name:
                return d
        return None

    def is_procedure(self, name: str) -> bool:
        return name in self.proc_sigs or name in self.procedures


def rule_action_kind(rule: Rule, program: Program) -> ActionKind:
    items = rule.rhs.items
    if len(items) == 1:
        f = functor_of(items[0])
        if f is not None and program.is_procedure(f[0]):
            return ActionKind.PROC_CALL
    return ActionKind.ACTION_TUPLE


# ---------------------------------------------------------------- printing

_EXPR_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_expr(e: Expr, level: int = 0) -> str:
    if isinstance(e, NumberLit):
        return repr(e.value)
    if isinstance(e, VarRef):
        return e.name
    prec = _EXPR_PREC[e.op]
    text = f"{format_expr(e.lhs, prec)} {e.op} {format_expr(e.rhs, prec + 1)}"
    return f"({text})" if prec < level else text


def format_condition(c: Condition) -> str:
    if isinstance(c, Query):
        return format_term(c.term)
    if isinstance(c, NegatedQuery):
        return "not " + format_term(c.query.term)
    if isinstance(c, Comparison):
        return f"{format_expr(c.lhs)} {c.op} {format_expr(c.rhs)}"
    return "true"


def _conds(cs) -> str:
    return " & ".join(format_condition(c) for c in cs)


def format_rule(r: Rule) -> str:
    parts = [_conds(r.guard) if r.guard else "true"]
    if r.while_cond or r.while_min:
        parts.append("while")
        if r.while_cond:
            parts.append(_conds(r.while_cond))
        if r.while_min:
            parts.append(f"min {r.while_min!r}")
    if r.until_cond or r.until_min:
        parts.append("until")
        if r.until_cond:
            parts.append(_conds(r.until_cond))
        if r.until_min:
            parts.append(f"min {r.until_min!r}")
    rhs = ", ".join(format_term(t) for t in r.rhs.items) if r.rhs.items else "()"
    return " ".join(parts) + " ~> " + rhs


def _type_list(types) -> str:
    return "(" + ", ".join(types) + ")"


def format_program(p: Program) -> str:
    lines = []
    for td in p.type_defs:
        b = td.body
        if isinstance(b, AtomDisjunction):
            body = " | ".join(b.atoms)
        elif isinstance(b, TypeUnion):
            body = " || ".join(b.types)
        else:
            body = f"({b.min} .. {b.max})"
        lines.append(f"{td.name} ::= {body}")
    for d in p.declarations:
        lines.append(f"{d.kind} {d.name} : {_type_list(d.arg_types)}")
    for name, types in p.proc_sigs.items():
        lines.append(f"{name} : {_type_list(types)} ~>")
    for proc in p.procedures.values():
        lines.append(f"{proc.name}({', '.join(proc.params)}){{")
        for r in proc.rules:
            lines.append("  " + format_rule(r))
        lines.append("}")
    return "\n".join(lines) + "\n"
