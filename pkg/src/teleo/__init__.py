"""Teleo-reactive agent toolkit: TR program front end, interpreter, Pedro messaging and simulators."""

from .terms import Atom, Compound, List, Number, Str, Var, format_term, match, parse_term, substitute
from .parser import parse_program
from .typecheck import check_program
from .beliefs import BeliefStore
from .engine import Engine, call_procedure, continuation_holds, get_action

__all__ = [
    "Atom", "Compound", "List", "Number", "Str", "Var",
    "format_term", "match", "parse_term", "substitute",
    "parse_program", "check_program", "BeliefStore",
    "Engine", "call_procedure", "continuation_holds", "get_action",
]
