"""Asteroids-lite: a ship, drifting circular asteroids and bullets on a torus.

Coordinates are y-up pixels; heading 0 is east and turning left increases it.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, replace
from typing import FrozenSet, List as PyList, Optional, Tuple

from ..terms import Atom, Compound, Number, Term
from .config import AsteroidsConfig

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
ACTIONS = frozenset({"turn_left", "turn_right", "move_forward", "move_backward", "shoot", "nothing"})


@dataclass(frozen=True)
class ShipState:
    x: float
    y: float
    heading: float = 0.0
    speed: float = 0.0
    active_controls: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class AsteroidState:
    x: float
    y: float
    vx: float
    vy: float
    radius: float


@dataclass(frozen=True)
class Bullet:
    x: float
    y: float
    vx: float
    vy: float
    ttl: int


@dataclass(frozen=True)
class AsteroidsWorld:
    ship: ShipState
    asteroids: Tuple[AsteroidState, ...]
    bullets: Tuple[Bullet, ...] = ()
    tick: int = 0

    @classmethod
    def initial(cls, cfg: AsteroidsConfig) -> "AsteroidsWorld":
        """Ship in the middle facing east; asteroids placed by ``cfg.seed``."""
        rng = random.Random(cfg.seed)
        ship = ShipState(cfg.width / 2, cfg.height / 2)
        rocks = []
        while len(rocks) < cfg.asteroid_count:
            x, y = rng.uniform(0, cfg.width), rng.uniform(0, cfg.height)
            if math.hypot(*_wrapped_offset(ship.x, ship.y, x, y, cfg)) < cfg.min_spawn_distance:
                continue
            angle = rng.uniform(0, TWO_PI)
            rocks.append(AsteroidState(
                x, y, cfg.asteroid_speed * math.cos(angle), cfg.asteroid_speed * math.sin(angle), cfg.asteroid_radius,
            ))
        return cls(ship, tuple(rocks))


def normalize_bearing(a: float) -> float:
    """Angle folded into (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


def _wrapped_offset(x0: float, y0: float, x1: float, y1: float, cfg: AsteroidsConfig) -> Tuple[float, float]:
    dx = (x1 - x0 + cfg.width / 2) % cfg.width - cfg.width / 2
    dy = (y1 - y0 + cfg.height / 2) % cfg.height - cfg.height / 2
    return dx, dy


def bucket(bearing: float, cfg: AsteroidsConfig) -> Optional[str]:
    """Direction bucket for a bearing (positive = left); None when out of view."""
    b = abs(bearing)
    if b < cfg.dead_centre:
        return "dead_centre"
    if b < cfg.centre:
        return "centre"
    if b < cfg.side:
        return "left" if bearing > 0 else "right"
    return None


def sense(ship: ShipState, asteroids, cfg: AsteroidsConfig) -> PyList[Term]:
    out: PyList[Term] = []
    for a in asteroids:
        dx, dy = _wrapped_offset(ship.x, ship.y, a.x, a.y, cfg)
        dist = math.hypot(dx, dy)
        if dist > cfg.vision_range:
            continue
        direction = bucket(normalize_bearing(math.atan2(dy, dx) - ship.heading), cfg) if dist > 0 else "dead_centre"
        if direction is None:
            continue
        out.append(Compound("see", (Atom("asteroid"), Atom(direction), Number(int(round(dist))))))
    out.append(Compound("facing_direction", (Number(round(ship.heading, 4)),)))
    out.append(Compound("speed", (Number(round(ship.speed, 4)),)))
    return out


def _wrap(x: float, size: float) -> float:
    return x % size


def step(world: AsteroidsWorld, delta: Tuple[FrozenSet[str], FrozenSet[str]], cfg: AsteroidsConfig) -> AsteroidsWorld:
    """Advance one tick after applying the start/stop sets in ``delta``."""
    started, stopped = delta
    for name in started - ACTIONS:
        log.warning("ignoring unknown action %s", name)
    active = (world.ship.active_controls - stopped) | (started & ACTIONS)

    ship = world.ship
    heading, speed = ship.heading, ship.speed
    if "turn_left" in active:
        heading += cfg.turn_rate
    if "turn_right" in active:
        heading -= cfg.turn_rate
    heading %= TWO_PI
    if "move_forward" in active:
        speed = min(speed + cfg.thrust, cfg.max_speed)
    if "move_backward" in active:
        speed = max(speed - cfg.thrust, 0.0)
    speed *= cfg.friction
    x = _wrap(ship.x + speed * math.cos(heading), cfg.width)
    y = _wrap(ship.y + speed * math.sin(heading), cfg.height)
    ship = ShipState(x, y, heading, speed, frozenset(active))

    bullets = [
        Bullet(_wrap(b.x + b.vx, cfg.width), _wrap(b.y + b.vy, cfg.height), b.vx, b.vy, b.ttl - 1)
        for b in world.bullets if b.ttl > 1
    ]
    if "shoot" in active:
        bullets.append(Bullet(x, y, cfg.bullet_speed * math.cos(heading), cfg.bullet_speed * math.sin(heading), cfg.bullet_ttl))
    rocks = [
        replace(a, x=_wrap(a.x + a.vx, cfg.width), y=_wrap(a.y + a.vy, cfg.height)) for a in world.asteroids
    ]

    # circle-overlap collisions; each bullet destroys at most one asteroid
    hit_rocks, spent = set(), set()
    for i, b in enumerate(bullets):
        for j, a in enumerate(rocks):
            if j in hit_rocks:
                continue
            if math.hypot(*_wrapped_offset(a.x, a.y, b.x, b.y, cfg)) <= a.radius:
                hit_rocks.add(j)
                spent.add(i)
                break
    return AsteroidsWorld(
        ship,
        tuple(a for j, a in enumerate(rocks) if j not in hit_rocks),
        tuple(b for i, b in enumerate(bullets) if i not in spent),
        world.tick + 1,
    )


def observe(world: AsteroidsWorld, cfg: AsteroidsConfig) -> PyList[Term]:
    return sense(world.ship, world.asteroids, cfg)


def finished(world: AsteroidsWorld) -> bool:
    return not world.asteroids
