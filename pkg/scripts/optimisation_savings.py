"""How often the dependency guard lets a cycle skip guard re-evaluation, on random programs.

Also re-checks that the controls emitted with and without the guard agree.
"""

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from generators import percept_stream, random_program  # noqa: E402

from teleo.engine import Engine  # noqa: E402
from teleo.errors import EngineError  # noqa: E402
from teleo.parser import parse_program  # noqa: E402
from teleo.terms import parse_term  # noqa: E402


def run(program, task, stream, optimise):
    eng = Engine(program, parse_term(task), optimise=optimise)
    controls, skipped = [], 0
    for c, facts in enumerate(stream):
        try:
            r = eng.step([parse_term(f) for f in facts], c * 0.05)
        except EngineError as e:
            controls.append(type(e).__name__)
            break
        controls.append(r.controls)
        skipped += not r.reevaluated
    return controls, skipped


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--programs", type=int, default=200)
    ap.add_argument("--cycles", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    cycles = skipped = mismatched = 0
    for _ in range(args.programs):
        src, task = random_program(rng)
        stream = percept_stream(rng, args.cycles)
        program = parse_program(src)
        on, s = run(program, task, stream, True)
        off, _ = run(program, task, stream, False)
        mismatched += on != off
        cycles += len(on)
        skipped += s
    print(f"{args.programs} programs, {cycles} cycles, {skipped} skipped ({100 * skipped / max(cycles, 1):.1f}%)")
    print(f"programs whose controls differ: {mismatched}")


if __name__ == "__main__":
    main()
