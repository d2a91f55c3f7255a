"""Run the thermostat in lockstep and compare the observed swing with the predicted band.

The heater only reacts after ``latency_ticks`` ticks, so the temperature can
overshoot the switching point by at most (latency_ticks + 1) * rate.
"""

import argparse

from teleo.engine import Engine
from teleo.parser import parse_program
from teleo.sim.config import ThermostatConfig, load_config
from teleo.sim.harness import parse_trace_line, run_lockstep
from teleo.terms import parse_term

from _common import corpus_path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--target", type=float, default=18)
    ap.add_argument("--ticks", type=int, default=600)
    ap.add_argument("--settle", type=int, default=100, help="ignore ticks before this one")
    ap.add_argument("--trace", help="write the tick trace here")
    args = ap.parse_args()

    cfg = load_config(ThermostatConfig, args.config) if args.config else ThermostatConfig()
    program = parse_program(open(corpus_path("regulate_temperature.tr")).read())
    target = int(args.target) if args.target == int(args.target) else args.target
    res = run_lockstep("thermostat", cfg, Engine(program, parse_term(f"regulate_temperature({target})")), args.ticks)
    temps = [parse_trace_line(l)[1][0].args[0].value for l in res.lines]
    tail = temps[args.settle:]
    print(f"predicted band h = {cfg.band:.3f}")
    print(f"observed after tick {args.settle}: min {min(tail):.3f} max {max(tail):.3f} "
          f"max deviation {max(abs(t - args.target) for t in tail):.3f}")
    switches = sum(1 for l in res.lines if not l.endswith("C=-")) - 1
    print(f"{switches} heater switches in {len(res.lines)} ticks")
    if args.trace:
        with open(args.trace, "w") as f:
            f.write("\n".join(res.lines) + "\n")


if __name__ == "__main__":
    main()
