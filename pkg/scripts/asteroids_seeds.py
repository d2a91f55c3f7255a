"""Ticks needed by a program to clear the asteroid field, per seed (lockstep, deterministic).

    python3 scripts/asteroids_seeds.py --seeds 0-7 --margin 1.5
"""

import argparse
import math
import statistics

from teleo.engine import Engine
from teleo.parser import parse_program
from teleo.sim.config import AsteroidsConfig, load_config
from teleo.sim.harness import run_lockstep
from teleo.terms import parse_term

from _common import corpus_path


def seed_range(text):
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--program", default=corpus_path("asteroids_proc3.tr"))
    ap.add_argument("--task", default="proc3")
    ap.add_argument("--config")
    ap.add_argument("--seeds", type=seed_range, default=seed_range("0-7"))
    ap.add_argument("--max-ticks", type=int, default=2000)
    ap.add_argument("--margin", type=float, default=1.5, help="threshold multiplier for the first seed")
    args = ap.parse_args()

    program = parse_program(open(args.program).read())
    task = parse_term(args.task)
    results = {}
    for seed in args.seeds:
        cfg = load_config(AsteroidsConfig, args.config, seed=seed) if args.config else AsteroidsConfig(seed=seed)
        res = run_lockstep("asteroids", cfg, Engine(program, task), args.max_ticks)
        left = len(res.world.asteroids)
        results[seed] = res.ticks if left == 0 else None
        print(f"seed {seed}: {'cleared' if left == 0 else f'{left} left'} after {res.ticks} ticks")
    done = [t for t in results.values() if t is not None]
    if done:
        print(f"cleared {len(done)}/{len(results)}; median {statistics.median(done)} max {max(done)}")
    first = next(iter(results))
    if results[first] is not None:
        print(f"threshold for seed {first}: {math.floor(results[first] * args.margin)} "
              f"({results[first]} x {args.margin})")


if __name__ == "__main__":
    main()
