"""Seeded random generators for terms, stores, conjunctions and TR programs."""

from __future__ import annotations

import random
import string
from typing import List, Optional, Tuple

from teleo.syntax import BinOp, Comparison, NegatedQuery, NumberLit, Query, TrueLiteral, VarRef
from teleo.terms import OPERATORS, Atom, Compound, List as TList, Number, Str, Var

ATOMS = ["a", "b", "c", "asteroid", "left", "right", "dead_centre", "x1", "true", "nil", "_g1"]
FUNCTORS = ["f", "g", "see", "controls", "percepts", "h2"]
VARS = ["X", "Y", "Z", "Dir", "D2", "Var_1"]
STRING_CHARS = string.ascii_letters + " \"\\\n\t\r,()[]:é✓"


def random_number(rng: random.Random) -> Number:
    r = rng.random()
    if r < 0.5:
        return Number(rng.randint(-1000, 1000))
    if r < 0.8:
        return Number(round(rng.uniform(-100, 100), rng.randint(0, 6)))
    return Number(rng.choice([0.0, -0.0, 1e-7, 2.5e20, -3e-12, 1e16]))


def random_term(rng: random.Random, depth: int = 3, ground: bool = False):
    """Any term, including infix operator compounds and strings."""
    leaf = depth <= 0 or rng.random() < 0.3
    if leaf:
        kinds = ["atom", "num", "str"] + ([] if ground else ["var"])
        k = rng.choice(kinds)
        if k == "atom":
            return Atom(rng.choice(ATOMS))
        if k == "num":
            return random_number(rng)
        if k == "str":
            return Str("".join(rng.choice(STRING_CHARS) for _ in range(rng.randint(0, 6))))
        return Var(rng.choice(VARS))
    k = rng.random()
    if k < 0.2:
        return TList(tuple(random_term(rng, depth - 1, ground) for _ in range(rng.randint(0, 3))))
    if k < 0.45:
        op = rng.choice(sorted(OPERATORS))
        return Compound(op, (random_term(rng, depth - 1, ground), random_term(rng, depth - 1, ground)))
    return Compound(rng.choice(FUNCTORS), tuple(random_term(rng, depth - 1, ground) for _ in range(rng.randint(1, 3))))


# ---------------------------------------------------------------- matching pairs

SMALL_ATOMS = ["a", "b", "c"]


def small_ground(rng: random.Random, depth: int = 3):
    if depth <= 0 or rng.random() < 0.35:
        return Atom(rng.choice(SMALL_ATOMS)) if rng.random() < 0.6 else Number(rng.choice([1, 2, 1.0]))
    if rng.random() < 0.25:
        return TList(tuple(small_ground(rng, depth - 1) for _ in range(rng.randint(0, 2))))
    return Compound(rng.choice(["f", "g"]), tuple(small_ground(rng, depth - 1) for _ in range(rng.randint(1, 3))))


def _abstract(rng: random.Random, t, names: List[str]):
    if rng.random() < 0.25:
        return Var(rng.choice(names))
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_abstract(rng, a, names) for a in t.args))
    if isinstance(t, TList):
        return TList(tuple(_abstract(rng, i, names) for i in t.items))
    return t


def match_pair(rng: random.Random):
    """(query, ground, prior bindings); the query has at most three variables.

    Half the queries are abstracted from the ground term itself, so both
    outcomes are common; the rest come from an unrelated term.
    """
    g = small_ground(rng)
    names = ["X", "Y", "Z"][: rng.randint(1, 3)]
    source = g if rng.random() < 0.5 else small_ground(rng)
    q = _abstract(rng, source, names)
    b = {}
    if rng.random() < 0.3:
        b[rng.choice(names)] = small_ground(rng, 1)
    return q, g, b


# ---------------------------------------------------------------- conjunctions

def random_store_facts(rng: random.Random, n: int) -> List:
    facts = []
    for _ in range(n):
        kind = rng.random()
        if kind < 0.4:
            facts.append(Compound("p", (Atom(rng.choice("ab")), Number(rng.randint(1, 4)))))
        elif kind < 0.8:
            facts.append(Compound("q", (Number(rng.randint(1, 4)),)))
        else:
            facts.append(Atom("r"))
    return list(dict.fromkeys(facts))


def random_conjunction(rng: random.Random, size: int, bound: Optional[set] = None) -> List:
    """Conditions over p/2, q/1 and r; comparisons only use variables already bound."""
    bound = set(bound or ())
    conds = []
    for _ in range(size):
        k = rng.random()
        nums = [v for v in bound if v in ("N", "M")]
        if k < 0.25:
            kvar = rng.choice(["K", "a", "b"])
            nvar = rng.choice(["N", "M", "2"])
            args = tuple(Var(x) if x[0].isupper() else (Number(int(x)) if x.isdigit() else Atom(x)) for x in (kvar, nvar))
            conds.append(Query(Compound("p", args)))
            bound |= {x for x in (kvar, nvar) if x[0].isupper()}
        elif k < 0.5:
            v = rng.choice(["N", "M", "3"])
            conds.append(Query(Compound("q", (Var(v) if v[0].isupper() else Number(int(v)),))))
            bound |= {v} if v[0].isupper() else set()
        elif k < 0.65:
            conds.append(Query(Atom("r")) if rng.random() < 0.5 else NegatedQuery(Query(Atom("r"))))
        elif k < 0.8:
            v = rng.choice(["N", "M", "K", "1"])
            arg = Var(v) if v[0].isupper() else Number(int(v))
            conds.append(NegatedQuery(Query(Compound("q", (arg,)) if v != "K" else Compound("p", (arg, Var("N"))))))
        elif nums:
            lhs = VarRef(rng.choice(nums))
            rhs = rng.choice([NumberLit(rng.randint(1, 4)), VarRef(rng.choice(nums)),
                              BinOp("+", VarRef(rng.choice(nums)), NumberLit(1))])
            conds.append(Comparison(lhs, rng.choice([">", ">=", "==", "<=", "<"]), rhs))
        else:
            conds.append(TrueLiteral())
    return conds


# ---------------------------------------------------------------- programs

HEADER = """\
percept a : (), b : (num), c : (kind, num)
belief bel : (kind)
durative m1 : (), m2 : (), m3 : (), mv : (num)
kind ::= x | y
"""

PERCEPT_UNIVERSE = (
    ["a"] + [f"b({n})" for n in range(1, 5)] + [f"c({k},{n})" for k in "xy" for n in range(1, 5)]
)


def _guard(rng: random.Random, bound_nums: List[str]) -> Tuple[str, List[str]]:
    if rng.random() < 0.15:
        return "true", bound_nums
    parts = []
    nums = list(bound_nums)
    fresh = iter(["V1", "V2", "V3", "V4"])
    kvars = []
    for _ in range(rng.randint(1, 3)):
        k = rng.random()
        if k < 0.2:
            parts.append(rng.choice(["a", "not a"]))
        elif k < 0.45:
            v = next(fresh, None)
            if v is None:
                parts.append("a")
                continue
            parts.append(f"b({v})")
            nums.append(v)
        elif k < 0.65:
            v = next(fresh, None)
            if v is None:
                parts.append("not a")
                continue
            kind = rng.choice(["x", "y", "K"])
            parts.append(f"c({kind},{v})")
            nums.append(v)
            if kind == "K":
                kvars.append(kind)
        elif k < 0.75:
            parts.append(f"not b({rng.randint(1, 4)})" if rng.random() < 0.5 else "not c(x,2)")
        elif k < 0.85:
            parts.append(rng.choice(["bel(x)", "not bel(y)", "bel(y)"]))
        elif nums:
            lhs = rng.choice(nums)
            rhs = rng.choice(nums + [str(rng.randint(1, 4))])
            parts.append(f"{lhs} {rng.choice(['<', '>', '>=', '<=', '=='])} {rhs}")
        else:
            parts.append("a")
    return " & ".join(parts), nums


def random_program(rng: random.Random) -> Tuple[str, str]:
    """Source text and the root task. Procedure i only calls procedures j > i."""
    n_procs = rng.randint(1, 3)
    arities = [0] + [rng.randint(0, 1) for _ in range(n_procs - 1)]
    lines = [HEADER]
    for i in range(n_procs):
        params = ["P"] if arities[i] else []
        sig = "(num)" if params else "()"
        lines.append(f"p{i} : {sig} ~>")
        lines.append(f"p{i}({','.join(params)}){{")
        n_rules = rng.randint(1, 4)
        for r in range(n_rules):
            guard, nums = _guard(rng, params)
            if r == n_rules - 1 and rng.random() < 0.7:
                guard, nums = "true", params
            k = rng.random()
            if i + 1 < n_procs and k < 0.35:
                j = rng.randint(i + 1, n_procs - 1)
                if arities[j]:
                    arg = rng.choice(nums) if nums else str(rng.randint(1, 4))
                    rhs = f"p{j}({arg})"
                else:
                    rhs = f"p{j}()"
            else:
                acts = rng.sample(["m1", "m2", "m3"], rng.randint(0, 2))
                if nums and rng.random() < 0.4:
                    acts.append(f"mv({rng.choice(nums)})")
                if rng.random() < 0.2:
                    acts.append(rng.choice(["remember(bel(x))", "forget(bel(x))", "remember(bel(y))", "forget(bel(y))"]))
                rhs = ", ".join(acts) if acts else "()"
            lines.append(f"{guard} ~> {rhs}")
        lines.append("}")
    return "\n".join(lines) + "\n", "p0"


def percept_stream(rng: random.Random, cycles: int) -> List[List[str]]:
    """Percept sets that drift a few facts at a time, with the odd burst."""
    current = set(rng.sample(PERCEPT_UNIVERSE, rng.randint(0, 4)))
    out = []
    for _ in range(cycles):
        r = rng.random()
        if r < 0.35:
            pass
        elif r < 0.9:
            for f in rng.sample(PERCEPT_UNIVERSE, rng.randint(1, 2)):
                current ^= {f}
        else:
            current = set(rng.sample(PERCEPT_UNIVERSE, rng.randint(0, 5)))
        out.append(sorted(current, key=PERCEPT_UNIVERSE.index))
    return out
