"""Tick loops tying a world to an agent: in-process lockstep or over a broker.

Trace lines read ``T=<tick> P=<percepts term> C=<controls term or ->``; the
same format is accepted as a replay file by the agent.
"""

from __future__ import annotations

import logging
import queue
import re
import threading
import time
from dataclasses import dataclass
from typing import Callable, FrozenSet, Iterable, Iterator, List as PyList, Optional, Sequence, TextIO, Tuple

from ..terms import Atom, Compound, List, Term, format_term, functor_of, parse_term
from . import asteroids, thermostat
from .config import AsteroidsConfig, ThermostatConfig

log = logging.getLogger(__name__)

KINDS = {
    "thermostat": (ThermostatConfig, thermostat, thermostat.ThermostatWorld),
    "asteroids": (AsteroidsConfig, asteroids, asteroids.AsteroidsWorld),
}

PERCEPTS_HEAD = Compound("percepts", (Atom("P"),))


def percepts_term(facts: Sequence[Term]) -> Term:
    return Compound("percepts", (List(tuple(facts)),))


def controls_term(actions: Sequence[Term]) -> Term:
    return Compound("controls", (List(tuple(actions)),))


def action_names(actions: Iterable[Term]) -> FrozenSet[str]:
    return frozenset(functor_of(a)[0] for a in actions if functor_of(a) is not None)


def controls_delta(previous: FrozenSet[str], actions: Iterable[Term]) -> Tuple[FrozenSet[str], FrozenSet[str], FrozenSet[str]]:
    """``(started, stopped, current)`` for a new full controls set."""
    current = action_names(actions)
    return current - previous, previous - current, current


def format_trace_line(tick: int, percepts: Sequence[Term], controls: Optional[Sequence[Term]]) -> str:
    c = format_term(controls_term(controls)) if controls is not None else "-"
    return f"T={tick} P={format_term(percepts_term(percepts))} C={c}"


_TRACE = re.compile(r"^T=(\d+) P=(.*) C=(\S+)$")


def parse_trace_line(line: str) -> Tuple[int, PyList[Term], Optional[PyList[Term]]]:
    m = _TRACE.match(line.strip())
    if not m:
        raise ValueError(f"not a trace line: {line!r}")
    p = parse_term(m.group(2))
    if not (isinstance(p, Compound) and p.functor == "percepts" and isinstance(p.args[0], List)):
        raise ValueError(f"trace percepts must be percepts([...]): {line!r}")
    controls = None
    if m.group(3) != "-":
        c = parse_term(m.group(3))
        controls = list(c.args[0].items)
    return int(m.group(1)), list(p.args[0].items), controls


def read_trace(lines: Iterable[str]) -> Iterator[Tuple[int, PyList[Term], Optional[PyList[Term]]]]:
    for line in lines:
        if line.strip() and not line.lstrip().startswith("#"):
            yield parse_trace_line(line)


@dataclass
class LockstepResult:
    world: object
    ticks: int
    lines: PyList[str]


def run_lockstep(kind: str, cfg, engine, ticks: int, world=None,
                 stop: Optional[Callable[[object], bool]] = None) -> LockstepResult:
    """Sense, decide and act in one thread; identical inputs give identical traces."""
    _, mod, world_cls = KINDS[kind]
    world = world if world is not None else world_cls.initial(cfg)
    stop = stop or mod.finished
    active: FrozenSet[str] = frozenset()
    lines = []
    t = 0
    for t in range(ticks):
        if stop(world):
            break
        percepts = mod.observe(world, cfg)
        result = engine.step(percepts, t / cfg.tick_rate)
        started = stopped = frozenset()
        if result.controls is not None:
            started, stopped, active = controls_delta(active, result.controls)
        lines.append(format_trace_line(t, percepts, result.controls))
        world = mod.step(world, (started, stopped), cfg)
    else:
        t = ticks
    return LockstepResult(world, t, lines)


def publish_cycle(world, session, cfg, kind: str) -> PyList[Term]:
    """Send the full percept list for ``world`` as one notification."""
    facts = KINDS[kind][1].observe(world, cfg)
    session.notify(percepts_term(facts))
    return facts


def run_networked(kind: str, cfg, session, ticks: Optional[int] = None, trace: Optional[TextIO] = None,
                  stop_event: Optional[threading.Event] = None,
                  on_tick: Optional[Callable[[int, object], None]] = None) -> object:
    """Real-time loop: apply controls received since the last tick, advance, publish.

    The caller must already have subscribed ``session`` to ``controls(X)``.
    """
    _, mod, world_cls = KINDS[kind]
    world = world_cls.initial(cfg)
    period = 1.0 / cfg.tick_rate
    active: FrozenSet[str] = frozenset()
    ticks = cfg.ticks if ticks is None else ticks
    deadline = time.monotonic()
    for t in range(ticks):
        if stop_event is not None and stop_event.is_set():
            break
        started, stopped = set(), set()
        applied = None
        while True:
            try:
                _rock, msg = session.deliveries.get_nowait()
            except queue.Empty:
                break
            if not (isinstance(msg, Compound) and msg.functor == "controls" and isinstance(msg.args[0], List)):
                continue
            s, p, active = controls_delta(active, msg.args[0].items)
            # an action started and stopped inside one tick still fires once
            started = (started - p) | s
            stopped = (stopped - s) | p
            applied = list(msg.args[0].items)
        world = mod.step(world, (frozenset(started), frozenset(stopped)), cfg)
        facts = publish_cycle(world, session, cfg, kind)
        if trace is not None:
            trace.write(format_trace_line(t, facts, applied) + "\n")
            trace.flush()
        if on_tick is not None:
            on_tick(t, world)
        if mod.finished(world):
            break
        deadline += period
        delay = deadline - time.monotonic()
        if delay > 0:
            time.sleep(delay)
    return world
