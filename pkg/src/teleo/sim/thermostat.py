"""A one-room heating world driven by turn_on_heating / turn_off_heating."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import List as PyList, Tuple

from ..terms import Compound, Number, Term
from .config import ThermostatConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThermostatWorld:
    temperature: float
    heating: bool = False
    tick: int = 0

    @classmethod
    def initial(cls, cfg: ThermostatConfig) -> "ThermostatWorld":
        return cls(cfg.initial_temperature)


def sense(world: ThermostatWorld, cfg: ThermostatConfig) -> PyList[Term]:
    t = round(world.temperature, 6)
    return [Compound("temperature", (Number(int(t) if t == int(t) else t),))]


def step(world: ThermostatWorld, delta: Tuple[frozenset, frozenset], cfg: ThermostatConfig) -> ThermostatWorld:
    started, _stopped = delta
    heating = world.heating
    for name in sorted(started):
        if name == "turn_on_heating":
            heating = True
        elif name == "turn_off_heating":
            heating = False
        else:
            log.warning("thermostat ignores unknown action %s", name)
    rate = cfg.heat_rate if heating else -cfg.cool_rate
    return replace(world, temperature=world.temperature + rate, heating=heating, tick=world.tick + 1)


observe = sense


def finished(world: ThermostatWorld) -> bool:
    return False
