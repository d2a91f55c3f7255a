import math

import pytest
from hypothesis import given, strategies as st

from teleo.engine import Engine
from teleo.pedro import Broker, connect
from teleo.sim import thermostat
from teleo.sim.asteroids import AsteroidState, AsteroidsWorld, ShipState, bucket, normalize_bearing, sense, step
from teleo.sim.config import AsteroidsConfig, ThermostatConfig, load_config
from teleo.sim.harness import (
    controls_delta, format_trace_line, parse_trace_line, publish_cycle, run_lockstep,
)
from teleo.terms import Atom, parse_term

from conftest import load

P = parse_term
CFG = AsteroidsConfig()
NONE = (frozenset(), frozenset())


def rock_at(bearing, dist, ship=ShipState(400, 300)):
    a = ship.heading + bearing
    return AsteroidState(ship.x + dist * math.cos(a), ship.y + dist * math.sin(a), 0, 0, 10)


def see_terms(percepts):
    return [p for p in percepts if p.functor == "see"]


def test_sense_examples():
    ship = ShipState(400, 300)
    assert see_terms(sense(ship, [rock_at(0, 301)], CFG)) == []
    assert see_terms(sense(ship, [rock_at(0, 100)], CFG)) == [P("see(asteroid,dead_centre,100)")]
    assert see_terms(sense(ship, [rock_at(0.4, 150)], CFG)) == [P("see(asteroid,left,150)")]
    assert see_terms(sense(ship, [rock_at(-0.4, 150)], CFG)) == [P("see(asteroid,right,150)")]
    assert see_terms(sense(ship, [rock_at(math.pi, 50)], CFG)) == []
    assert sense(ship, [], CFG) == [P("facing_direction(0.0)"), P("speed(0.0)")]
    assert len(see_terms(sense(ship, [rock_at(0.1, 80), rock_at(-1.0, 200)], CFG))) == 2


def test_sense_wraps_around_edges():
    ship = ShipState(790, 300)
    rock = AsteroidState(40, 300, 0, 0, 10)  # 50 px ahead across the seam
    assert see_terms(sense(ship, [rock], CFG)) == [P("see(asteroid,dead_centre,50)")]


@given(st.floats(-math.pi, math.pi, exclude_min=True))
def test_buckets_partition_the_forward_field(b):
    names = [n for n in ("dead_centre", "centre", "left", "right")
             if bucket(b, CFG) == n]
    assert len(names) == (1 if abs(b) < CFG.side else 0)


def test_normalize_bearing():
    assert normalize_bearing(3 * math.pi) == pytest.approx(math.pi)
    assert normalize_bearing(-math.pi) == pytest.approx(math.pi)
    assert normalize_bearing(0.5 - 2 * math.pi) == pytest.approx(0.5)


def test_friction_decay():
    w = AsteroidsWorld(ShipState(100, 100, 0, 5.0), ())
    cfg = AsteroidsConfig(friction=0.98)
    w1 = step(w, NONE, cfg)
    assert w1.ship.speed == pytest.approx(4.9)
    wn = w
    for _ in range(10):
        wn = step(wn, NONE, cfg)
    assert wn.ship.speed == pytest.approx(5 * 0.98 ** 10)


def test_turning_half_circle():
    cfg = AsteroidsConfig(turn_rate=math.pi / 40)
    w = AsteroidsWorld(ShipState(100, 100, 0.5), ())
    w = step(w, (frozenset({"turn_left"}), frozenset()), cfg)
    for _ in range(39):
        w = step(w, NONE, cfg)
    assert w.ship.heading == pytest.approx(0.5 + math.pi)


def test_speed_decreases_after_thrust_stops():
    w = AsteroidsWorld(ShipState(100, 100), ())
    w = step(w, (frozenset({"move_forward"}), frozenset()), CFG)
    for _ in range(9):
        w = step(w, NONE, CFG)
    speeds = []
    w = step(w, (frozenset(), frozenset({"move_forward"})), CFG)
    for _ in range(20):
        speeds.append(w.ship.speed)
        w = step(w, NONE, CFG)
    assert all(a > b for a, b in zip(speeds, speeds[1:]))


def test_shooting_destroys_asteroid_ahead(caplog):
    w = AsteroidsWorld(ShipState(100, 100), (AsteroidState(200, 100, 0, 0, 20),))
    w = step(w, (frozenset({"shoot", "warp"}), frozenset()), CFG)
    for _ in range(15):
        w = step(w, NONE, CFG)
    assert w.asteroids == ()
    assert "warp" in caplog.text


def test_controls_delta():
    started, stopped, cur = controls_delta(frozenset({"a", "b"}), [P("b"), P("c")])
    assert started == {"c"} and stopped == {"a"} and cur == {"b", "c"}


def test_trace_lines_round_trip():
    line = format_trace_line(3, [P("temperature(15)")], [P("turn_on_heating")])
    assert line == "T=3 P=percepts([temperature(15)]) C=controls([turn_on_heating])"
    assert parse_trace_line(line) == (3, [P("temperature(15)")], [P("turn_on_heating")])
    assert parse_trace_line("T=0 P=percepts([]) C=-") == (0, [], None)


def test_config_file(tmp_path):
    f = tmp_path / "sim.cfg"
    f.write_text("# comment\nseed = 4\nturn_rate=0.2\n\nvision_range = 250  # px\n")
    cfg = load_config(AsteroidsConfig, f)
    assert (cfg.seed, cfg.turn_rate, cfg.vision_range) == (4, 0.2, 250.0)
    f.write_text("bogus = 1\n")
    with pytest.raises(ValueError):
        load_config(AsteroidsConfig, f)
    with pytest.raises(ValueError):
        AsteroidsConfig(dead_centre=0.5, centre=0.3)


def test_thermostat_band():
    cfg = ThermostatConfig(heat_rate=0.1, cool_rate=0.05, latency_ticks=3)
    assert cfg.band == pytest.approx(0.4)


def test_lockstep_is_deterministic():
    prog = load("asteroids_proc3.tr")
    runs = [run_lockstep("asteroids", CFG, Engine(prog, Atom("proc3")), 300).lines for _ in range(2)]
    assert runs[0] == runs[1]


def test_thermostat_lockstep_holds_band():
    cfg = ThermostatConfig()
    prog = load("regulate_temperature.tr")
    temps = []
    res = run_lockstep("thermostat", cfg, Engine(prog, P("regulate_temperature(18)")), 400)
    for line in res.lines[100:]:
        _, percepts, _ = parse_trace_line(line)
        temps.append(percepts[0].args[0].value)
    assert all(abs(t - 18) <= cfg.band for t in temps)


def test_publish_cycle():
    with Broker(port=0) as b, connect(port=b.port) as sim, connect(port=b.port) as agent:
        assert agent.subscribe(P("percepts(X)"), Atom("true"), 0)
        publish_cycle(thermostat.ThermostatWorld(15.0), sim, ThermostatConfig(), "thermostat")
        assert agent.next_delivery(5) == (0, P("percepts([temperature(15)])"))
        publish_cycle(AsteroidsWorld(ShipState(400, 300), ()), sim, CFG, "asteroids")
        assert agent.next_delivery(5) == (0, P("percepts([facing_direction(0.0),speed(0.0)])"))
