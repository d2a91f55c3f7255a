"""Type hierarchy, membership checking and whole-program validation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List as PyList, Optional, Sequence, Tuple

from .errors import DuplicateDefinition, InvalidTypeDefinition, UndefinedType
from .syntax import (
    BELIEF_ACTIONS,
    AtomDisjunction,
    Comparison,
    Condition,
    IntRange,
    Loc,
    NegatedQuery,
    Program,
    Query,
    Rule,
    TrueLiteral,
    TypeDef,
    TypeUnion,
    expr_vars,
)
from .terms import Atom, Compound, Number, Str, Term, Var, format_term, functor_of, variables

BUILTIN_PARENTS: Dict[str, Optional[str]] = {
    "atomic": None,
    "num": "atomic",
    "int": "num",
    "nat": "int",
    "atom": "atomic",
    "string": "atomic",
}
RESERVED_NAMES = frozenset({"remember", "forget", "true", "not", "while", "until", "min"})


class TypeHierarchy:
    """Built-in types plus user definitions, ordered by a parent relation.

    Union types sit under the lowest common ancestor of their members, which
    is ``atom`` for the usual union of atom disjunctions.
    """

    def __init__(self, defs: Dict[str, object], parents: Dict[str, Optional[str]]):
        self.defs = defs
        self.parents = parents

    def __contains__(self, name: str) -> bool:
        return name in self.parents

    def ancestors(self, name: str) -> PyList[str]:
        """``name`` followed by its ancestors up to ``atomic``."""
        if name not in self.parents:
            raise UndefinedType(name)
        out = []
        cur: Optional[str] = name
        while cur is not None:
            out.append(cur)
            cur = self.parents[cur]
        return out

    def is_subtype(self, sub: str, sup: str) -> bool:
        if sub == sup:
            return True
        if sup in self.ancestors(sub):
            return True
        # a union is above each of its branches even when not their tree parent
        body = self.defs.get(sup)
        if isinstance(body, TypeUnion):
            return any(self.is_subtype(sub, m) for m in body.types)
        return False


def build_hierarchy(defs: Iterable[TypeDef]) -> TypeHierarchy:
    bodies: Dict[str, object] = {}
    parents: Dict[str, Optional[str]] = dict(BUILTIN_PARENTS)
    for td in defs:
        if td.name in parents:
            raise DuplicateDefinition(td.name, *(td.loc.line, td.loc.col) if td.loc else (0, 0))
        body = td.body
        if isinstance(body, AtomDisjunction):
            parent = "atom"
        elif isinstance(body, IntRange):
            if body.min > body.max:
                raise InvalidTypeDefinition(f"range type {td.name} has min > max")
            parent = "int"
        elif isinstance(body, TypeUnion):
            for m in body.types:
                if m not in parents:
                    raise UndefinedType(m)
            parent = _common_ancestor(parents, body.types)
        else:
            raise InvalidTypeDefinition(f"bad definition for {td.name}")
        bodies[td.name] = body
        parents[td.name] = parent
    return TypeHierarchy(bodies, parents)


def _common_ancestor(parents: Dict[str, Optional[str]], members: Sequence[str]) -> str:
    def chain(n):
        out = []
        while n is not None:
            out.append(n)
            n = parents[n]
        return out

    chains = [chain(m) for m in members]
    common = set(chains[0]).intersection(*chains[1:])
    for name in chains[0]:
        if name in common and name not in members:
            return name
    return "atomic"


def check_type(thing: Term, expected: str, h: TypeHierarchy) -> bool:
    """Membership of a ground value (or any Var) in a named type."""
    if isinstance(thing, Var):
        return True
    if expected in BUILTIN_PARENTS:
        return _primitive(thing, expected)
    if expected not in h.defs:
        raise UndefinedType(expected)
    body = h.defs[expected]
    if isinstance(body, AtomDisjunction):
        return isinstance(thing, Atom) and thing.name in body.atoms
    if isinstance(body, TypeUnion):
        return any(check_type(thing, m, h) for m in body.types)
    if isinstance(body, IntRange):
        return (
            isinstance(thing, Number)
            and type(thing.value) is int
            and body.min <= thing.value <= body.max
        )
    raise InvalidTypeDefinition(f"invalid type definition for {expected}")


def _primitive(thing: Term, name: str) -> bool:
    if name == "atomic":
        return isinstance(thing, (Atom, Number, Str))
    if name == "atom":
        return isinstance(thing, Atom)
    if name == "string":
        return isinstance(thing, Str)
    if not isinstance(thing, Number):
        return False
    if name == "num":
        return True
    if name == "int":
        return type(thing.value) is int
    return type(thing.value) is int and thing.value >= 0  # nat


# ---------------------------------------------------------------- programs


@dataclass(frozen=True)
class Signature:
    sort: str  # percept | belief | durative | discrete | procedure
    arg_types: Tuple[str, ...]


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str
    severity: str = "error"
    path: str = "<program>"

    def render(self, path: Optional[str] = None) -> str:
        return f"{path or self.path}:{self.line}:{self.col}: {self.severity}: {self.message}"

    def __str__(self) -> str:
        return self.render()


def signature_table(program: Program) -> Dict[str, Signature]:
    table: Dict[str, Signature] = {}
    for d in program.declarations:
        if d.name in table:
            raise DuplicateDefinition(d.name)
        table[d.name] = Signature(d.kind, d.arg_types)
    for name, types in program.proc_sigs.items():
        if name in table:
            raise DuplicateDefinition(name)
        table[name] = Signature("procedure", types)
    return table


class _Checker:
    def __init__(self, program: Program, path: str):
        self.program = program
        self.path = path
        self.diags: PyList[Diagnostic] = []
        self.h: Optional[TypeHierarchy] = None
        self.table: Dict[str, Signature] = {}

    def report(self, loc: Optional[Loc], message: str):
        line, col = (loc.line, loc.col) if loc else (0, 0)
        self.diags.append(Diagnostic(line, col, message, path=self.path))

    def run(self) -> PyList[Diagnostic]:
        p = self.program
        try:
            self.h = build_hierarchy(p.type_defs)
        except (UndefinedType, InvalidTypeDefinition, DuplicateDefinition) as e:
            self.report(p.type_defs[0].loc if p.type_defs else None, str(e))
            return self.diags
        self.table = signature_table(p)
        for name in self.table:
            if name in RESERVED_NAMES:
                loc = p.sig_locs.get(name) or getattr(p.declaration(name), "loc", None)
                self.report(loc, f"{name!r} clashes with a built-in name")
        for d in p.declarations:
            self.check_type_names(d.arg_types, d.loc)
        for name, types in p.proc_sigs.items():
            self.check_type_names(types, p.sig_locs.get(name))
        for proc in p.procedures.values():
            sig = p.proc_sigs.get(proc.name)
            if sig is None:
                self.report(proc.loc, f"procedure {proc.name!r} has no type signature")
                continue
            if len(sig) != len(proc.params):
                self.report(
                    proc.loc,
                    f"procedure {proc.name!r} has {len(proc.params)} parameters "
                    f"but its signature declares {len(sig)}",
                )
                continue
            env = dict(zip(proc.params, sig))
            for rule in proc.rules:
                self.check_rule(rule, env)
        return self.diags

    def check_type_names(self, types: Sequence[str], loc: Optional[Loc]):
        for t in types:
            if t not in self.h:
                self.report(loc, f"undefined type {t!r}")

    # variable environment: name -> type name of its binding site

    def check_conditions(self, conds: Sequence[Condition], env: Dict[str, str]):
        for c in conds:
            if isinstance(c, TrueLiteral):
                continue
            if isinstance(c, Query):
                self.check_query(c, env, bind=True)
            elif isinstance(c, NegatedQuery):
                self.check_query(c.query, env, bind=False)
            elif isinstance(c, Comparison):
                for v in list(expr_vars(c.lhs)) + list(expr_vars(c.rhs)):
                    if v not in env:
                        self.report(c.loc, f"variable {v} in comparison is not bound by an earlier query or parameter")
                    elif env[v] in self.h and not self.h.is_subtype(env[v], "num"):
                        self.report(c.loc, f"variable {v} of type {env[v]} used in an arithmetic comparison")

    def check_query(self, q: Query, env: Dict[str, str], bind: bool):
        f = functor_of(q.term)
        if f is None:
            self.report(q.loc, f"{format_term(q.term)} is not a query")
            return
        name, arity = f
        sig = self.table.get(name)
        if sig is None:
            self.report(q.loc, f"{name} is not a declared percept or belief")
            return
        if sig.sort not in ("percept", "belief"):
            self.report(q.loc, f"{name} is a {sig.sort}, not a percept or belief")
            return
        self.check_args(q.term, sig.arg_types, env, q.loc, bind=bind)

    def check_args(self, term: Term, types: Sequence[str], env: Dict[str, str], loc, bind: bool,
                   need_bound: bool = False):
        name, arity = functor_of(term)
        if arity != len(types):
            self.report(loc, f"{name} expects {len(types)} argument(s), given {arity}")
            return
        args = term.args if isinstance(term, Compound) else ()
        for arg, t in zip(args, types):
            if t not in self.h:
                continue  # already reported at the declaration
            if isinstance(arg, Var):
                if arg.name in env:
                    if need_bound and env[arg.name] in self.h and not self.h.is_subtype(env[arg.name], t):
                        self.report(loc, f"variable {arg.name} of type {env[arg.name]} passed where {t} is expected")
                elif bind:
                    env[arg.name] = t
                continue
            try:
                ok = check_type(arg, t, self.h)
            except (UndefinedType, InvalidTypeDefinition) as e:
                self.report(loc, str(e))
                continue
            if not ok:
                self.report(loc, f"type error: {format_term(arg)} is not of type {t} in {format_term(term)}")

    def check_rule(self, rule: Rule, params: Dict[str, str]):
        env = dict(params)
        self.check_conditions(rule.guard, env)
        # while/until conditions see the guard's bindings; their own do not leak
        self.check_conditions(rule.while_cond, dict(env))
        self.check_conditions(rule.until_cond, dict(env))
        items = rule.rhs.items
        locs = rule.rhs.locs or (rule.loc,) * len(items)
        for item, loc in zip(items, locs):
            f = functor_of(item)
            if f is None:
                self.report(loc, f"{format_term(item)} is not an action")
                continue
            name, arity = f
            for v in dict.fromkeys(variables(item)):
                if v not in env:
                    self.report(loc, f"unbound RHS variable {v}")
            if name in BELIEF_ACTIONS:
                self.check_belief_action(item, env, loc)
                continue
            sig = self.table.get(name)
            if sig is None:
                self.report(loc, f"{name} is not a declared action or procedure")
                continue
            if sig.sort == "procedure":
                if len(items) != 1:
                    self.report(loc, f"procedure call {name} must be the only item on the right-hand side")
            elif sig.sort not in ("durative", "discrete"):
                self.report(loc, f"{name} is a {sig.sort}, not an action")
                continue
            self.check_args(item, sig.arg_types, env, loc, bind=False, need_bound=True)

    def check_belief_action(self, item: Term, env: Dict[str, str], loc):
        name, arity = functor_of(item)
        if arity != 1:
            self.report(loc, f"{name} takes exactly one belief")
            return
        belief = item.args[0]
        f = functor_of(belief)
        sig = self.table.get(f[0]) if f else None
        if sig is None or sig.sort != "belief":
            self.report(loc, f"{name} argument {format_term(belief)} is not a declared belief")
            return
        self.check_args(belief, sig.arg_types, env, loc, bind=False, need_bound=True)


def check_program(program: Program, path: str = "<program>") -> PyList[Diagnostic]:
    """All static problems in ``program``; an empty list means well-typed."""
    return _Checker(program, path).run()
