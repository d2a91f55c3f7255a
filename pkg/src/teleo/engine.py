"""The TR interpreter: rule selection, while/until continuation and the main loop.

One ``Engine`` owns the firing stack, the remembered beliefs and the last
emitted controls. ``Engine.step`` runs one perception-action cycle; ``run_task``
drives it from an I/O object until the percept stream ends.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Iterable, List as PyList, Optional, Protocol, Sequence, Tuple

from .beliefs import BeliefStore, apply_belief_updates, first_answer
from .errors import ExceededRecursionDepth, NoFirableRule, UnboundAction
from .syntax import ActionKind, NegatedQuery, Procedure, Program, Query, Rule, rule_action_kind
from .terms import Bindings, Compound, Term, format_term, functor_of, is_ground, substitute
from .typecheck import build_hierarchy, check_type, signature_table

log = logging.getLogger(__name__)

Functor = Tuple[str, int]


@dataclass(frozen=True)
class FiringRecord:
    depth: int
    proc: str
    args: Tuple[Term, ...]
    rule_index: int
    bindings: Dict[str, Term] = field(compare=True, hash=False)
    first_fired: float = 0.0
    actions: Tuple[Term, ...] = ()

    def describe(self) -> str:
        call = self.proc + ("(" + ",".join(format_term(a) for a in self.args) + ")" if self.args else "")
        return f"{call}#{self.rule_index}"


# ---------------------------------------------------------------- continuation


def expired(limit: float, first_fired: float, now: float) -> bool:
    """More than ``limit`` seconds since first firing; a zero limit is always expired."""
    return limit == 0 or (now - first_fired) > limit


def _inferable(conds, store: BeliefStore, vars: Bindings) -> bool:
    if not conds:
        return False  # omitted while/until conditions default to false
    return first_answer(conds, store, vars) is not None


def continuation_holds(firing: FiringRecord, rule: Rule, store: BeliefStore, now: float) -> bool:
    """Whether an already-fired rule keeps firing under its frozen bindings."""
    b = firing.bindings
    if _inferable(rule.guard, store, b):
        return True
    wc = _inferable(rule.while_cond, store, b) or not expired(rule.while_min, firing.first_fired, now)
    if not wc:
        return False
    return not _inferable(rule.until_cond, store, b) or not expired(rule.until_min, firing.first_fired, now)


# ---------------------------------------------------------------- rule selection


def _fire(procedure: Procedure, index: int, store: BeliefStore, vars: Bindings, now: float,
          depth: int, args: Tuple[Term, ...]) -> Optional[FiringRecord]:
    rule = procedure.rules[index]
    answer = first_answer(rule.guard, store, vars)
    if answer is None:
        return None
    actions = tuple(substitute(a, answer) for a in rule.rhs.items)
    for a in actions:
        if not is_ground(a):
            raise UnboundAction(f"action {format_term(a)} of {procedure.name} rule {index} is not ground")
    return FiringRecord(depth, procedure.name, args, index, answer, now, actions)


def get_action(store: BeliefStore, procedure: Procedure, vars: Bindings, now: float,
               prev_firing: Optional[FiringRecord] = None, depth: int = 1,
               args: Optional[Tuple[Term, ...]] = None) -> FiringRecord:
    """Choose the rule that fires in ``procedure`` this cycle.

    Rules above the previously fired one keep their priority. If none of them
    is inferable and the previous firing's continuation condition holds, the
    previous firing continues unchanged (same bindings, same first-fired time).
    Otherwise rules are scanned top-down from the previous rule's position.
    """
    if args is None:
        args = tuple(vars[p] for p in procedure.params)
    start = 0
    if prev_firing is not None:
        r = prev_firing.rule_index
        for i in range(r):
            rec = _fire(procedure, i, store, vars, now, depth, args)
            if rec is not None:
                return rec
        if continuation_holds(prev_firing, procedure.rules[r], store, now):
            return prev_firing
        start = r
    for i in range(start, len(procedure.rules)):
        rec = _fire(procedure, i, store, vars, now, depth, args)
        if rec is not None:
            return rec
    raise NoFirableRule(f"no-firable-rule in {procedure.name}")


def call_procedure(program: Program, proc: str, args: Sequence[Term], store: BeliefStore, now: float,
                   fired_rules: Sequence[FiringRecord], max_depth: int,
                   depth: int = 1) -> Tuple[Tuple[Term, ...], PyList[FiringRecord]]:
    """Descend from ``proc`` to a tuple of primitive actions.

    ``fired_rules[d-1]`` is the record at depth ``d``. A record whose rule or
    actions change invalidates every deeper record.
    """
    fired = list(fired_rules)
    args = tuple(args)
    while True:
        if depth > max_depth:
            raise ExceededRecursionDepth(f"exceeded-recursion-depth: depth {depth} > {max_depth}")
        procedure = program.procedures[proc]
        vars = dict(zip(procedure.params, args))
        prev = fired[depth - 1] if len(fired) >= depth else None
        if prev is not None and (prev.proc != proc or prev.args != args):
            prev = None
        if prev is None:
            del fired[depth - 1:]
        new = get_action(store, procedure, vars, now, prev, depth, args)
        if prev is None:
            fired.append(new)
        else:
            if new.rule_index != prev.rule_index or new.actions != prev.actions:
                del fired[depth:]
            elif new is not prev:
                # same rule, same ground actions: the same firing
                new = replace(new, first_fired=prev.first_fired)
            fired[depth - 1] = new
        rule = procedure.rules[new.rule_index]
        if rule_action_kind(rule, program) is ActionKind.PROC_CALL:
            target = new.actions[0]
            proc, args = functor_of(target)[0], (target.args if isinstance(target, Compound) else ())
            depth += 1
            continue
        del fired[depth:]
        return new.actions, fired


# ---------------------------------------------------------------- dependencies


@dataclass(frozen=True, order=True)
class DependencySign:
    sign: str  # "++" or "--"
    name: str
    arity: int = 0

    def __str__(self) -> str:
        return f"{self.sign}{self.name}"


def _guard_functors(rule: Rule):
    for c in rule.guard:
        if isinstance(c, Query):
            yield True, functor_of(c.term)
        elif isinstance(c, NegatedQuery):
            yield False, functor_of(c.query.term)


def local_dependent_predicates(procedure: Procedure, rule_index: int) -> PyList[DependencySign]:
    """Signed functors whose change could stop rule ``rule_index`` (0-based) firing.

    ``--f`` for each query of the fired rule, ``++f`` for each query of every
    earlier rule. A negated query contributes the opposite sign.
    """
    if not 0 <= rule_index < len(procedure.rules):
        raise IndexError(f"{procedure.name} has no rule {rule_index}")
    out: Dict[DependencySign, None] = {}
    for positive, (name, arity) in _guard_functors(procedure.rules[rule_index]):
        out[DependencySign("--" if positive else "++", name, arity)] = None
    for rule in procedure.rules[:rule_index]:
        for positive, (name, arity) in _guard_functors(rule):
            out[DependencySign("++" if positive else "--", name, arity)] = None
    return list(out)


def dependent_predicates(fired_rules: Sequence[FiringRecord], program: Program) -> PyList[DependencySign]:
    """Union of the local lists over the firing stack.

    Ordered by depth; within one record the ``++`` entries come first.
    """
    out: Dict[DependencySign, None] = {}
    for rec in fired_rules:
        local = local_dependent_predicates(program.procedures[rec.proc], rec.rule_index)
        for d in sorted(local, key=lambda d: d.sign != "++"):
            out[d] = None
    return list(out)


@dataclass(frozen=True)
class Delta:
    added: FrozenSet[Functor] = frozenset()
    removed: FrozenSet[Functor] = frozenset()

    def __bool__(self) -> bool:
        return bool(self.added or self.removed)


def store_delta(old: Iterable[Term], new: Iterable[Term]) -> Delta:
    old_set, new_set = set(old), set(new)
    return Delta(
        frozenset(functor_of(f) for f in new_set - old_set),
        frozenset(functor_of(f) for f in old_set - new_set),
    )


def update_is_relevant(delta: Delta, deps: Iterable[DependencySign]) -> bool:
    for d in deps:
        key = (d.name, d.arity)
        if d.sign == "++" and key in delta.added:
            return True
        if d.sign == "--" and key in delta.removed:
            return True
    return False


# ---------------------------------------------------------------- main loop


@dataclass
class CycleResult:
    actions: Tuple[Term, ...]  # primitive actions chosen this cycle
    controls: Optional[Tuple[Term, ...]]  # set when the action set changed
    fired: Tuple[FiringRecord, ...]
    reevaluated: bool = True


class Engine:
    """Stateful interpreter for one task call."""

    def __init__(self, program: Program, task: Term, max_depth: int = 64,
                 optimise: bool = True, validate_percepts: bool = True):
        f = functor_of(task)
        if f is None or f[0] not in program.procedures:
            raise ValueError(f"task {format_term(task)} does not name a procedure")
        if not is_ground(task):
            raise ValueError("task call must be ground")
        self.program = program
        self.task = task
        self.task_proc = f[0]
        self.task_args = task.args if isinstance(task, Compound) else ()
        if len(self.task_args) != len(program.procedures[f[0]].params):
            raise ValueError(f"task {format_term(task)} has the wrong number of arguments")
        self.max_depth = max_depth
        self.optimise = optimise
        self.validate_percepts = validate_percepts
        self.fired: PyList[FiringRecord] = []
        self.remembered: Tuple[Term, ...] = ()
        self.last_actions: Optional[Tuple[Term, ...]] = None
        self._all_actions: Tuple[Term, ...] = ()
        self._last_store: Optional[BeliefStore] = None
        self._hierarchy = build_hierarchy(program.type_defs) if validate_percepts else None
        self._table = signature_table(program) if validate_percepts else {}
        self._warned: set = set()

    # -- percept validation

    def valid_percept(self, fact: Term) -> bool:
        f = functor_of(fact)
        sig = self._table.get(f[0]) if f else None
        if sig is None or sig.sort != "percept" or len(sig.arg_types) != f[1]:
            self._warn(("undeclared", f), f"ignoring undeclared percept {format_term(fact)}")
            return False
        args = fact.args if isinstance(fact, Compound) else ()
        if is_ground(fact) and all(check_type(a, t, self._hierarchy) for a, t in zip(args, sig.arg_types)):
            return True
        self._warn(("ill-typed", fact), f"rejecting ill-typed percept {format_term(fact)}")
        return False

    def _warn(self, key, message: str):
        if key not in self._warned:
            self._warned.add(key)
            log.warning(message)

    # -- one cycle

    def _can_skip(self, store: BeliefStore) -> bool:
        if not (self.optimise and self.fired and self._last_store is not None):
            return False
        for rec in self.fired:
            if self.program.procedures[rec.proc].rules[rec.rule_index].has_continuation:
                return False
        delta = store_delta(self._last_store, store)
        return not update_is_relevant(delta, dependent_predicates(self.fired, self.program))

    def step(self, percepts: Iterable[Term], now: float) -> CycleResult:
        percepts = [p for p in percepts if not self.validate_percepts or self.valid_percept(p)]
        store = BeliefStore(tuple(percepts), self.remembered)
        reevaluated = not self._can_skip(store)
        if reevaluated:
            actions, fired = call_procedure(
                self.program, self.task_proc, self.task_args, store, now,
                self.fired, self.max_depth,
            )
            self.fired = fired
            self._all_actions = actions
        self._last_store = store
        primitives, updated = apply_belief_updates(self._all_actions, store)
        self.remembered = updated.remembered
        primitives = tuple(primitives)
        controls = None
        if self.last_actions is None or set(primitives) != set(self.last_actions):
            controls = primitives
            self.last_actions = primitives
        return CycleResult(primitives, controls, tuple(self.fired), reevaluated)


def controls_term(actions: Sequence[Term]) -> Term:
    from .terms import List

    return Compound("controls", (List(tuple(actions)),))


class AgentIO(Protocol):
    def receive(self) -> Optional[Sequence[Term]]:
        """Block for the next percept list; None ends the run."""

    def send_controls(self, actions: Tuple[Term, ...]) -> None: ...

    def now(self) -> float: ...


def format_trace_line(cycle: int, result: CycleResult) -> str:
    stack = ",".join(r.describe() for r in result.fired) or "-"
    controls = format_term(controls_term(result.controls)) if result.controls is not None else "-"
    return f"T={cycle} F={stack} C={controls}"


def run_task(program: Program, task_call: Term, max_depth: int, io: AgentIO,
             trace: Optional[Callable[[str], None]] = None, optimise: bool = True) -> int:
    """Run cycles until the percept stream ends; returns the number of cycles.

    Engine failures (exceeded-recursion-depth, no-firable-rule) propagate.
    """
    engine = Engine(program, task_call, max_depth=max_depth, optimise=optimise)
    cycle = 0
    while True:
        percepts = io.receive()
        if percepts is None:
            return cycle
        result = engine.step(percepts, io.now())
        if result.controls is not None:
            io.send_controls(result.controls)
        if trace is not None:
            trace(format_trace_line(cycle, result))
        cycle += 1
