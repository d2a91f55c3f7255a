"""Simulator settings as dataclasses, loadable from ``key = value`` files."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Type, TypeVar

C = TypeVar("C")


@dataclass(frozen=True)
class ThermostatConfig:
    tick_rate: float = 20.0  # Hz
    initial_temperature: float = 15.0
    heat_rate: float = 0.1  # degrees per tick while heating
    cool_rate: float = 0.05  # degrees per tick otherwise
    latency_ticks: int = 3  # allowed delay between a percept and the control it provokes
    ticks: int = 600
    seed: int = 0

    def __post_init__(self):
        if self.tick_rate <= 0 or self.heat_rate <= 0 or self.cool_rate <= 0 or self.latency_ticks < 0:
            raise ValueError("thermostat rates must be positive")

    @property
    def band(self) -> float:
        """Worst-case distance from the target once the room has warmed up.

        The controller switches as soon as it sees the target crossed; during the
        latency window plus the tick in which the crossing happens, the
        temperature keeps moving by at most one rate step per tick.
        """
        return (self.latency_ticks + 1) * max(self.heat_rate, self.cool_rate)


@dataclass(frozen=True)
class AsteroidsConfig:
    tick_rate: float = 20.0
    width: float = 800.0
    height: float = 600.0
    vision_range: float = 300.0
    dead_centre: float = 0.05  # bucket half-angles, radians
    centre: float = 0.3
    side: float = math.pi / 2
    thrust: float = 0.3  # speed gained per tick of move_forward
    turn_rate: float = 0.08  # radians per tick
    friction: float = 0.98  # speed multiplier per tick
    max_speed: float = 6.0
    bullet_speed: float = 10.0
    bullet_ttl: int = 40
    asteroid_count: int = 3
    asteroid_radius: float = 25.0
    asteroid_speed: float = 0.5
    min_spawn_distance: float = 120.0
    ticks: int = 2000
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.dead_centre < self.centre < self.side <= math.pi:
            raise ValueError("bucket cutoffs must satisfy 0 < dead_centre < centre < side <= pi")
        if self.asteroid_radius <= 0 or not 0 < self.friction <= 1:
            raise ValueError("asteroid radius must be positive and friction in (0, 1]")


def load_config(cls: Type[C], path: str | Path, **overrides) -> C:
    """Read ``key = value`` lines (``#`` comments) into ``cls``; unknown keys are errors."""
    defaults = cls()
    known = {f.name: type(getattr(defaults, f.name)) for f in fields(cls)}
    values = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or key not in known:
            raise ValueError(f"{path}:{n}: expected one of {sorted(known)} as key = value")
        values[key] = known[key](value)
    values.update(overrides)
    return replace(defaults, **values)
