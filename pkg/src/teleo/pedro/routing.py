"""Subscription bodies and notification routing.

Bodies use a small language: ``true``, arithmetic comparisons whose operands
may include ``length(V)`` for a list-bound ``V``, and ``&`` conjunctions.
"""

from __future__ import annotations

import logging
import operator
from dataclasses import dataclass
from typing import Any, List as PyList, Sequence, Tuple

from ..terms import (
    COMPARISONS,
    Atom,
    Bindings,
    Compound,
    List,
    Number,
    Term,
    Var,
    format_term,
    match_unchecked,
)

log = logging.getLogger(__name__)

_ARITH = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}
_COMPARE = {
    ">": operator.gt, ">=": operator.ge, "==": operator.eq,
    "<=": operator.le, "<": operator.lt,
}


class BodyError(ValueError):
    pass


@dataclass(frozen=True)
class Subscription:
    id: int
    head: Term
    body: Term
    rock: int
    owner: Any = None  # broker-side session handle


def valid_body(body: Term) -> bool:
    """Static check that ``body`` is in the body language."""
    if body == Atom("true"):
        return True
    if isinstance(body, Compound) and body.functor == "&" and body.arity == 2:
        return all(valid_body(b) for b in body.args)
    if isinstance(body, Compound) and body.functor in COMPARISONS and body.arity == 2:
        return all(_valid_expr(e) for e in body.args)
    return False


def _valid_expr(e: Term) -> bool:
    if isinstance(e, (Number, Var)):
        return True
    if isinstance(e, Compound):
        if e.functor == "length" and e.arity == 1:
            return isinstance(e.args[0], (Var, List))
        if e.functor in _ARITH and e.arity == 2:
            return all(_valid_expr(a) for a in e.args)
    return False


def _expr(e: Term, s: Bindings):
    if isinstance(e, Number):
        return e.value
    if isinstance(e, Var):
        if e.name not in s:
            raise BodyError(f"unbound variable {e.name}")
        return _expr(s[e.name], s)
    if isinstance(e, Compound) and e.functor == "length" and e.arity == 1:
        v = e.args[0]
        v = s.get(v.name) if isinstance(v, Var) else v
        if not isinstance(v, List):
            raise BodyError("length of a non-list")
        return len(v.items)
    if isinstance(e, Compound) and e.functor in _ARITH and e.arity == 2:
        lhs, rhs = _expr(e.args[0], s), _expr(e.args[1], s)
        if e.functor == "/" and rhs == 0:
            raise BodyError("division by zero")
        return _ARITH[e.functor](lhs, rhs)
    raise BodyError(f"not an expression: {format_term(e)}")


def _eval(body: Term, s: Bindings) -> bool:
    if body == Atom("true"):
        return True
    if isinstance(body, Compound) and body.functor == "&" and body.arity == 2:
        return _eval(body.args[0], s) and _eval(body.args[1], s)
    if isinstance(body, Compound) and body.functor in COMPARISONS and body.arity == 2:
        return _COMPARE[body.functor](_expr(body.args[0], s), _expr(body.args[1], s))
    raise BodyError(f"not a body condition: {format_term(body)}")


def evaluate_body(body: Term, sigma: Bindings) -> bool:
    """Truth of a subscription body under ``sigma``; evaluation errors count as false."""
    try:
        return _eval(body, sigma)
    except BodyError as e:
        log.debug("body %s is not a match: %s", format_term(body), e)
        return False


def broker_route(n: Term, subs: Sequence[Subscription]) -> PyList[Tuple[Subscription, Term]]:
    """Subscriptions that receive notification ``n``, in creation order."""
    out = []
    for sub in subs:
        sigma = match_unchecked(sub.head, n, {})
        if sigma is not None and evaluate_body(sub.body, sigma):
            out.append((sub, n))
    return out


def delivery_line(rock: int, payload: Term) -> bytes:
    return f"{rock} : {format_term(payload)}\n".encode("utf-8")
