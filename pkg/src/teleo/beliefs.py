"""The BeliefStore and evaluation of guard conditions against it."""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Iterable, Iterator, List as PyList, Sequence, Tuple

from .errors import EvalError
from .syntax import (
    BinOp,
    Comparison,
    Condition,
    Expr,
    NegatedQuery,
    NumberLit,
    Query,
    TrueLiteral,
    VarRef,
)
from .terms import Bindings, Compound, Number, Term, format_term, is_ground, match_unchecked


def _dedupe(facts: Iterable[Term]) -> Tuple[Term, ...]:
    return tuple(dict.fromkeys(facts))


@dataclass(frozen=True)
class BeliefStore:
    """Ground facts: the current percepts followed by remembered beliefs.

    Each partition keeps insertion order without duplicates. Query answers are
    enumerated in that order, so the first answer is deterministic.
    """

    percepts: Tuple[Term, ...] = ()
    remembered: Tuple[Term, ...] = ()

    def __post_init__(self):
        for f in self.percepts + self.remembered:
            if not is_ground(f):
                raise ValueError(f"belief store facts must be ground: {format_term(f)}")
        object.__setattr__(self, "percepts", _dedupe(self.percepts))
        object.__setattr__(self, "remembered", _dedupe(self.remembered))

    def __iter__(self) -> Iterator[Term]:
        yield from self.percepts
        yield from self.remembered

    def __len__(self) -> int:
        return len(self.percepts) + len(self.remembered)

    def __contains__(self, fact: Term) -> bool:
        return fact in self.percepts or fact in self.remembered

    def with_percepts(self, percepts: Iterable[Term]) -> "BeliefStore":
        """Replace the whole percept partition; remembered facts persist."""
        return BeliefStore(tuple(percepts), self.remembered)

    def remember(self, fact: Term) -> "BeliefStore":
        if fact in self.remembered:
            return self
        return BeliefStore(self.percepts, self.remembered + (fact,))

    def forget(self, fact: Term) -> "BeliefStore":
        if fact not in self.remembered:
            return self
        return BeliefStore(self.percepts, tuple(f for f in self.remembered if f != fact))


# ---------------------------------------------------------------- evaluation


def evaluate_query(cond: Term, store: BeliefStore, vars: Bindings) -> Tuple[bool, PyList[Bindings]]:
    """Every extension of ``vars`` under which ``cond`` matches a fact, in store order."""
    out = []
    for fact in store:
        b = match_unchecked(cond, fact, vars)
        if b is not None:
            out.append(b)
    return bool(out), out


_ARITH = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}
_COMPARE = {
    ">": operator.gt, ">=": operator.ge, "==": operator.eq,
    "<=": operator.le, "<": operator.lt,
}


def evaluate_expr(e: Expr, vars: Bindings):
    if isinstance(e, NumberLit):
        return e.value
    if isinstance(e, VarRef):
        if e.name not in vars:
            raise EvalError(f"variable {e.name} is not instantiated")
        value = vars[e.name]
        if not isinstance(value, Number):
            raise EvalError(f"variable {e.name} is bound to non-number {format_term(value)}")
        return value.value
    if isinstance(e, BinOp):
        lhs = evaluate_expr(e.lhs, vars)
        rhs = evaluate_expr(e.rhs, vars)
        if e.op == "/" and rhs == 0:
            raise EvalError("division by zero")
        return _ARITH[e.op](lhs, rhs)
    raise EvalError(f"not an expression: {e!r}")


def evaluate_condition(cond: Condition, store: BeliefStore, vars: Bindings) -> Tuple[bool, PyList[Bindings]]:
    if isinstance(cond, Query):
        return evaluate_query(cond.term, store, vars)
    if isinstance(cond, NegatedQuery):
        found, _ = evaluate_query(cond.query.term, store, vars)
        return (False, []) if found else (True, [vars])
    if isinstance(cond, Comparison):
        lhs = evaluate_expr(cond.lhs, vars)
        rhs = evaluate_expr(cond.rhs, vars)
        return (True, [vars]) if _COMPARE[cond.op](lhs, rhs) else (False, [])
    if isinstance(cond, TrueLiteral):
        return True, [vars]
    raise EvalError(f"invalid condition {cond!r}")


def evaluate_conjunction(
    conds: Sequence[Condition], store: BeliefStore, vars: Bindings
) -> Tuple[bool, PyList[Bindings]]:
    """Thread bindings left to right through ``conds``.

    The result list is ordered: the first element is the first answer
    substitution in store order.
    """
    current = [vars]
    for c in conds:
        nxt = []
        for b in current:
            _, found = evaluate_condition(c, store, b)
            nxt.extend(found)
        if not nxt:
            return False, []
        current = nxt
    return True, current


def first_answer(conds: Sequence[Condition], store: BeliefStore, vars: Bindings):
    """First answer substitution of a conjunction, or None. Stops early."""
    def search(i: int, b: Bindings):
        if i == len(conds):
            return b
        _, found = evaluate_condition(conds[i], store, b)
        for nb in found:
            r = search(i + 1, nb)
            if r is not None:
                return r
        return None

    return search(0, vars)


def apply_belief_updates(actions: Sequence[Term], store: BeliefStore) -> Tuple[PyList[Term], BeliefStore]:
    """Execute remember/forget actions; return the remaining primitive actions."""
    remaining = []
    for a in actions:
        if isinstance(a, Compound) and a.functor == "remember" and len(a.args) == 1:
            store = store.remember(a.args[0])
        elif isinstance(a, Compound) and a.functor == "forget" and len(a.args) == 1:
            store = store.forget(a.args[0])
        else:
            remaining.append(a)
    return remaining, store
