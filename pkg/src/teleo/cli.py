"""Command-line entry points: check, analyze, run-agent, run-broker, run-sim.

Exit codes: 0 ok, 1 type/semantic errors or bad arguments, 2 syntax errors,
3 no-firable-rule, 4 exceeded-recursion-depth, 5 transport failure,
6 any other runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import ExitStack
from pathlib import Path
from typing import List as PyList, Optional, Sequence

from .errors import (
    DuplicateDefinition,
    EngineError,
    EvalError,
    ExceededRecursionDepth,
    NoFirableRule,
    ProgramSyntaxError,
    TermSyntaxError,
    TransportError,
)
from .syntax import Program

EXIT_OK, EXIT_TYPE, EXIT_SYNTAX = 0, 1, 2
EXIT_NO_FIRABLE_RULE, EXIT_RECURSION, EXIT_TRANSPORT, EXIT_RUNTIME = 3, 4, 5, 6

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 4550

log = logging.getLogger("teleo")


def _err(msg: str):
    print(msg, file=sys.stderr)


def broker_address(host: Optional[str], port: Optional[int]):
    host = host or os.environ.get("TELEO_BROKER_HOST") or DEFAULT_HOST
    port = port if port is not None else int(os.environ.get("TELEO_BROKER_PORT", DEFAULT_PORT))
    return host, port


class _StaticError(Exception):
    def __init__(self, code: int):
        self.code = code


def load_program(path: str, typecheck: bool = True) -> Program:
    """Parse (and by default type-check) ``path``; reports and raises _StaticError."""
    from .parser import parse_program
    from .typecheck import check_program

    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        _err(f"{path}: {e}")
        raise _StaticError(EXIT_TYPE) from None
    try:
        program = parse_program(source)
    except ProgramSyntaxError as e:
        _err(f"{path}:{e.line}:{e.col}: error: {e.message}")
        raise _StaticError(EXIT_SYNTAX) from None
    except DuplicateDefinition as e:
        _err(f"{path}:{e.line}:{e.col}: error: {e}")
        raise _StaticError(EXIT_TYPE) from None
    if typecheck:
        diags = check_program(program, path)
        for d in diags:
            _err(d.render())
        if diags:
            raise _StaticError(EXIT_TYPE)
    return program


# ---------------------------------------------------------------- commands


def cmd_check(path: str) -> int:
    try:
        load_program(path)
    except _StaticError as e:
        return e.code
    print(f"{path}: ok")
    return EXIT_OK


def _signs(deps) -> str:
    return " ".join(str(d) for d in deps)


def cmd_analyze(path: str, proc: Optional[str] = None, rule: Optional[int] = None,
                all_rules: bool = False, stack: Sequence[str] = ()) -> int:
    """Print dependent predicates. Rule numbers are 1-based, as read in the source."""
    from .engine import FiringRecord, dependent_predicates, local_dependent_predicates

    try:
        program = load_program(path, typecheck=False)
    except _StaticError as e:
        return e.code
    if stack:
        records = []
        for depth, item in enumerate(stack, 1):
            name, _, num = item.partition(":")
            p = program.procedures.get(name)
            if p is None or not num.isdigit() or not 1 <= int(num) <= len(p.rules):
                _err(f"bad stack entry {item!r}; expected proc:rule with a valid 1-based rule number")
                return EXIT_TYPE
            records.append(FiringRecord(depth, name, (), int(num) - 1, {}))
        print(_signs(dependent_predicates(records, program)))
        return EXIT_OK
    if proc is None:
        _err("analyze needs --proc (or --stack)")
        return EXIT_TYPE
    p = program.procedures.get(proc)
    if p is None:
        _err(f"unknown procedure {proc!r}")
        return EXIT_TYPE
    if all_rules:
        for i in range(len(p.rules)):
            print(f"{proc} rule {i + 1}: {_signs(local_dependent_predicates(p, i))}")
        return EXIT_OK
    if rule is None or not 1 <= rule <= len(p.rules):
        _err(f"{proc} has rules 1..{len(p.rules)}")
        return EXIT_TYPE
    print(_signs(local_dependent_predicates(p, rule - 1)))
    return EXIT_OK


def _engine_exit(e: Exception) -> int:
    _err(f"error: {e}")
    if isinstance(e, NoFirableRule):
        return EXIT_NO_FIRABLE_RULE
    if isinstance(e, ExceededRecursionDepth):
        return EXIT_RECURSION
    if isinstance(e, TransportError):
        return EXIT_TRANSPORT
    return EXIT_RUNTIME


def cmd_run_agent(path: str, task: str, max_depth: int = 64, host: Optional[str] = None,
                  port: Optional[int] = None, trace: Optional[str] = None,
                  percepts_from: Optional[str] = None, tick_seconds: float = 0.05,
                  optimise: bool = True) -> int:
    from .agent import PedroIO, ReplayIO, trace_writer
    from .engine import run_task
    from .terms import functor_of, is_ground, parse_term

    try:
        program = load_program(path)
    except _StaticError as e:
        return e.code
    try:
        task_call = parse_term(task)
    except TermSyntaxError as e:
        _err(f"bad task call {task!r}: {e}")
        return EXIT_SYNTAX
    f = functor_of(task_call)
    if f is None or not is_ground(task_call) or f[0] not in program.procedures \
            or len(program.procedures[f[0]].params) != f[1]:
        _err(f"task call {task!r} must be a ground call of a procedure in {path}")
        return EXIT_TYPE
    with ExitStack() as stack:
        out = stack.enter_context(open(trace, "w", encoding="utf-8")) if trace else None
        try:
            if percepts_from:
                src = stack.enter_context(open(percepts_from, encoding="utf-8"))
                io = ReplayIO.from_trace(src, tick_seconds)
            else:
                from .pedro import connect

                session = stack.enter_context(connect(*broker_address(host, port)))
                io = PedroIO(session)
            cycles = run_task(program, task_call, max_depth, io, trace=trace_writer(out), optimise=optimise)
        except KeyboardInterrupt:
            return EXIT_OK
        except (EngineError, EvalError, TransportError) as e:
            return _engine_exit(e)
        except ValueError as e:  # malformed replay file
            _err(f"error: {e}")
            return EXIT_RUNTIME
    log.info("agent stopped after %d cycles", cycles)
    return EXIT_OK


def cmd_run_broker(host: Optional[str] = None, port: Optional[int] = None) -> int:
    from .pedro import Broker

    host, port = broker_address(host, port)
    try:
        broker = Broker(host, port)
    except OSError as e:
        _err(f"cannot listen on {host}:{port}: {e}")
        return EXIT_TRANSPORT
    print(f"broker listening on {host}:{broker.port}", flush=True)
    try:
        broker.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        broker.stop()
    return EXIT_OK


def cmd_run_sim(kind: str, cfg_path: Optional[str] = None, host: Optional[str] = None,
                port: Optional[int] = None, ticks: Optional[int] = None,
                trace: Optional[str] = None) -> int:
    from .pedro import connect
    from .sim.config import load_config
    from .sim.harness import KINDS, run_networked
    from .terms import parse_term

    cfg_cls = KINDS[kind][0]
    try:
        cfg = load_config(cfg_cls, cfg_path) if cfg_path else cfg_cls()
    except (OSError, ValueError) as e:
        _err(f"bad config: {e}")
        return EXIT_TYPE
    with ExitStack() as stack:
        out = stack.enter_context(open(trace, "w", encoding="utf-8")) if trace else None
        try:
            session = stack.enter_context(connect(*broker_address(host, port)))
            if not session.subscribe(parse_term("controls(X)"), parse_term("true"), 0):
                raise TransportError("broker refused the controls subscription")
            world = run_networked(kind, cfg, session, ticks, out)
        except KeyboardInterrupt:
            return EXIT_OK
        except TransportError as e:
            return _engine_exit(e)
    print(f"simulation stopped at tick {world.tick}", flush=True)
    return EXIT_OK


# ---------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="teleo", description="Teleo-reactive agent toolkit.")
    ap.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and type-check a TR program")
    p.add_argument("program")

    p = sub.add_parser("analyze", help="print dependent predicates")
    p.add_argument("program")
    p.add_argument("--proc", help="procedure name")
    p.add_argument("--rule", type=int, help="1-based rule number")
    p.add_argument("--all", action="store_true", help="every rule of --proc")
    p.add_argument("--stack", nargs="+", default=(), metavar="PROC:RULE",
                   help="firing stack, outermost first, for the union of local lists")

    def broker_args(p):
        p.add_argument("--host", help="broker host (env TELEO_BROKER_HOST)")
        p.add_argument("--port", type=int, help="broker port (env TELEO_BROKER_PORT, default 4550)")

    p = sub.add_parser("run-agent", help="run a task against a broker or a recorded trace")
    p.add_argument("program")
    p.add_argument("task", help="task call, e.g. thermostat_task or regulate_temperature(18)")
    p.add_argument("--max-depth", type=int, default=64)
    p.add_argument("--trace", help="write one line per cycle here")
    p.add_argument("--percepts-from", help="replay a simulator trace instead of connecting")
    p.add_argument("--tick-seconds", type=float, default=0.05, help="replay clock step")
    p.add_argument("--no-optimise", action="store_true", help="always re-evaluate every guard")
    broker_args(p)

    p = sub.add_parser("run-broker", help="run the message broker")
    broker_args(p)

    p = sub.add_parser("run-sim", help="run a simulator against a broker")
    p.add_argument("kind", choices=["thermostat", "asteroids"])
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--ticks", type=int, help="stop after this many ticks")
    p.add_argument("--trace", help="write one line per tick here")
    broker_args(p)
    return ap


def main(argv: Optional[PyList[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "check":
        return cmd_check(args.program)
    if args.command == "analyze":
        return cmd_analyze(args.program, args.proc, args.rule, args.all, args.stack)
    if args.command == "run-agent":
        return cmd_run_agent(args.program, args.task, args.max_depth, args.host, args.port,
                             args.trace, args.percepts_from, args.tick_seconds, not args.no_optimise)
    if args.command == "run-broker":
        return cmd_run_broker(args.host, args.port)
    return cmd_run_sim(args.kind, args.config, args.host, args.port, args.ticks, args.trace)


if __name__ == "__main__":
    sys.exit(main())
