import itertools

import pytest

from teleo.errors import DuplicateDefinition, UndefinedType
from teleo.parser import parse_program
from teleo.syntax import AtomDisjunction, IntRange, TypeDef, TypeUnion
from teleo.terms import Atom, Number, Str, Var
from teleo.typecheck import build_hierarchy, check_program, check_type

from conftest import load


def h_with(*defs):
    return build_hierarchy([TypeDef(n, b) for n, b in defs])


def test_builtins_only():
    h = build_hierarchy([])
    assert h.ancestors("nat") == ["nat", "int", "num", "atomic"]
    assert h.ancestors("string") == ["string", "atomic"]


def test_union_sits_above_members():
    h = h_with(
        ("legume", AtomDisjunction(("pea", "bean"))),
        ("tuber", AtomDisjunction(("potato",))),
        ("plant", TypeUnion(("legume", "tuber"))),
    )
    assert h.is_subtype("legume", "plant") and h.is_subtype("tuber", "plant")
    assert h.is_subtype("plant", "atom")
    assert check_type(Atom("potato"), "plant", h)
    assert not check_type(Atom("rock"), "plant", h)


def test_range_under_int():
    h = h_with(("age", IntRange(0, 120)))
    assert h.ancestors("age")[:2] == ["age", "int"]
    for v, ok in [(-1, False), (0, True), (120, True), (121, False)]:
        assert check_type(Number(v), "age", h) is ok
    assert not check_type(Number(5.0), "age", h)


def test_thing_membership():
    h = h_with(("thing", AtomDisjunction(("box", "shoe", "cat"))))
    assert check_type(Atom("cat"), "thing", h)
    assert not check_type(Atom("dog"), "thing", h)
    assert check_type(Var("T"), "thing", h)


def test_errors():
    with pytest.raises(UndefinedType):
        h_with(("plant", TypeUnion(("legume",))))
    with pytest.raises(UndefinedType):
        check_type(Atom("a"), "nope", build_hierarchy([]))
    with pytest.raises(DuplicateDefinition):
        h_with(("int", AtomDisjunction(("a",))))


def test_membership_is_monotone_and_matches_enumeration():
    h = h_with(
        ("small", IntRange(0, 3)),
        ("colour", AtomDisjunction(("red", "green"))),
        ("shade", AtomDisjunction(("dark",))),
        ("tone", TypeUnion(("colour", "shade"))),
    )
    universe = [Atom(a) for a in ("red", "green", "dark", "blue")] + [Number(i) for i in range(-2, 6)] \
        + [Number(1.5), Number(2.0), Str("s")]
    expected = {
        "small": lambda v: isinstance(v, Number) and type(v.value) is int and 0 <= v.value <= 3,
        "colour": lambda v: v in (Atom("red"), Atom("green")),
        "tone": lambda v: v in (Atom("red"), Atom("green"), Atom("dark")),
        "nat": lambda v: isinstance(v, Number) and type(v.value) is int and v.value >= 0,
        "int": lambda v: isinstance(v, Number) and type(v.value) is int,
        "num": lambda v: isinstance(v, Number),
        "atom": lambda v: isinstance(v, Atom),
        "string": lambda v: isinstance(v, Str),
        "atomic": lambda v: True,
    }
    for v, (t, oracle) in itertools.product(universe, expected.items()):
        assert check_type(v, t, h) == oracle(v), (v, t)
        if check_type(v, t, h):
            for anc in h.ancestors(t):
                assert check_type(v, anc, h), (v, t, anc)


def test_dog_program_has_one_diagnostic():
    diags = check_program(load("dog.tr"), "dog.tr")
    assert len(diags) == 1
    assert "dog" in diags[0].message and "thing" in diags[0].message
    assert diags[0].render().startswith("dog.tr:")


@pytest.mark.parametrize("name", [
    "face_thing.tr", "thermostat_task.tr", "regulate_temperature.tr", "thermostat_behaviour.tr",
    "asteroids_proc1.tr", "asteroids_proc2.tr", "asteroids_proc3.tr", "asteroids_proc4.tr",
])
def test_corpus_programs_are_well_typed(name):
    assert check_program(load(name)) == []


HEAD = "percept see : (atom, num)\ndurative turn : (atom), go : ()\nbelief seen : (atom)\n"


@pytest.mark.parametrize("body, fragment", [
    ("true ~> turn(Dir)", "unbound RHS variable Dir"),
    ("X > 3 ~> go", "not bound"),
    ("see(A) ~> go", "expects 2"),
    ("nope ~> go", "not a declared"),
    ("see(A,D) ~> fly", "not a declared action"),
    ("see(A,D) ~> remember(see(A,D))", "not a declared belief"),
    ("see(A,D) & A > 1 ~> go", "arithmetic"),
    ("not see(A,D) ~> turn(A)", "unbound RHS variable A"),
    ("see(A,D) ~> turn(D)", "passed where atom"),
])
def test_rule_level_diagnostics(body, fragment):
    p = parse_program(HEAD + "q : () ~>\nq(){\n" + body + "\n}\n")
    diags = check_program(p)
    assert diags and any(fragment in d.message for d in diags), diags


def test_missing_signature():
    diags = check_program(parse_program("durative go : ()\nq(){ true ~> go }"))
    assert any("no type signature" in d.message for d in diags)


def test_remember_of_belief_is_fine():
    p = parse_program(HEAD + "q : () ~>\nq(){\nsee(A,D) ~> remember(seen(A)), go\n}\n")
    assert check_program(p) == []
