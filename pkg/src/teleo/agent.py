"""Percept sources and control sinks for ``run_task``: trace replay and a live broker."""

from __future__ import annotations

import queue
import threading
import time
from typing import Callable, Iterable, List as PyList, Optional, Sequence, TextIO, Tuple

from .engine import controls_term
from .sim.harness import PERCEPTS_HEAD, read_trace
from .terms import Atom, Compound, List, Term


class ReplayIO:
    """Feeds recorded percept lists; time advances ``tick_seconds`` per cycle."""

    def __init__(self, percept_lists: Iterable[Sequence[Term]], tick_seconds: float = 0.05):
        self._it = iter(percept_lists)
        self.tick_seconds = tick_seconds
        self.cycle = -1
        self.sent: PyList[Tuple[int, Tuple[Term, ...]]] = []

    @classmethod
    def from_trace(cls, lines: Iterable[str], tick_seconds: float = 0.05) -> "ReplayIO":
        return cls((p for _t, p, _c in read_trace(lines)), tick_seconds)

    def receive(self) -> Optional[Sequence[Term]]:
        try:
            percepts = next(self._it)
        except StopIteration:
            return None
        self.cycle += 1
        return percepts

    def send_controls(self, actions: Tuple[Term, ...]) -> None:
        self.sent.append((self.cycle, actions))

    def now(self) -> float:
        return self.cycle * self.tick_seconds


class PedroIO:
    """Live agent I/O over a broker session.

    Percept notifications that pile up while a cycle runs are coalesced: only
    the latest is evaluated.
    """

    def __init__(self, session, stop_event: Optional[threading.Event] = None,
                 clock: Callable[[], float] = time.monotonic):
        self.session = session
        self.stop_event = stop_event or threading.Event()
        self._clock = clock
        self._start = clock()
        if not session.subscribe(PERCEPTS_HEAD, Atom("true"), 0):
            from .errors import TransportError

            raise TransportError("broker refused the percepts subscription")

    @staticmethod
    def _facts(msg: Term) -> Optional[Tuple[Term, ...]]:
        if isinstance(msg, Compound) and msg.functor == "percepts" and isinstance(msg.args[0], List):
            return msg.args[0].items
        return None

    def receive(self) -> Optional[Sequence[Term]]:
        latest = None
        while latest is None:
            if self.stop_event.is_set():
                return None
            try:
                _rock, msg = self.session.deliveries.get(timeout=0.1)
            except queue.Empty:
                if self.session.closed.is_set():
                    return None
                continue
            latest = self._facts(msg)
        while True:
            try:
                _rock, msg = self.session.deliveries.get_nowait()
            except queue.Empty:
                return latest
            latest = self._facts(msg) or latest

    def send_controls(self, actions: Tuple[Term, ...]) -> None:
        self.session.notify(controls_term(actions))

    def now(self) -> float:
        return self._clock() - self._start


def trace_writer(out: Optional[TextIO]) -> Optional[Callable[[str], None]]:
    if out is None:
        return None

    def write(line: str):
        out.write(line + "\n")
        out.flush()

    return write
