"""Base-station energy model with sleep states and SSB occasions.

Per-slot power splits into a static part (always drawn while the cell is
powered), a dynamic part scaling linearly with slot utilization, and an SSB
transmission cost on beacon-bearing slots. Idle runs let the cell descend
into light and then deep sleep after configurable entry thresholds; SSB
transmission interrupts idle runs, which is exactly why removing SSB from a
secondary cell unlocks sleep and saves energy at low load.

Power figures are relative units; every reported gain is a ratio and is
invariant to scaling all of them by a common factor.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

SLEEP_STATES = ("active", "light", "deep")


@dataclass(frozen=True)
class PowerModel:
    p_active_static: float = 55.0
    p_light_sleep: float = 25.0
    p_deep_sleep: float = 1.0
    p_dynamic_per_util: float = 100.0   # added at 100% slot utilization
    ssb_slot_cost: float = 25.0
    light_sleep_entry_slots: int = 2    # consecutive idle slots required
    deep_sleep_entry_slots: int = 10

    def __post_init__(self):
        powers = (self.p_active_static, self.p_light_sleep, self.p_deep_sleep,
                  self.p_dynamic_per_util, self.ssb_slot_cost)
        if any(p < 0 for p in powers):
            raise ValueError("power figures must be non-negative")
        if not (self.p_deep_sleep <= self.p_light_sleep <= self.p_active_static):
            raise ValueError("need p_deep_sleep <= p_light_sleep <= p_active_static")
        if not 0 <= self.light_sleep_entry_slots <= self.deep_sleep_entry_slots:
            raise ValueError("sleep entry thresholds must be ordered")

    def scaled(self, factor: float) -> "PowerModel":
        return PowerModel(
            p_active_static=self.p_active_static * factor,
            p_light_sleep=self.p_light_sleep * factor,
            p_deep_sleep=self.p_deep_sleep * factor,
            p_dynamic_per_util=self.p_dynamic_per_util * factor,
            ssb_slot_cost=self.ssb_slot_cost * factor,
            light_sleep_entry_slots=self.light_sleep_entry_slots,
            deep_sleep_entry_slots=self.deep_sleep_entry_slots,
        )


@dataclass(frozen=True)
class SsbConfig:
    periodicity_slots: int = 40         # one burst per 20 ms at 30 kHz SCS
    ssb_slots_per_burst: int = 1

    def __post_init__(self):
        if self.periodicity_slots < 1 or self.ssb_slots_per_burst < 1:
            raise ValueError("SSB period and burst length must be positive")
        if self.ssb_slots_per_burst > self.periodicity_slots:
            raise ValueError("burst cannot exceed the period")

    def is_ssb_slot(self, slot: int) -> bool:
        return slot % self.periodicity_slots < self.ssb_slots_per_burst


def ssb_mask(ssb: SsbConfig, ssb_mode: str, horizon: int) -> list[bool]:
    """Which slots carry SSB; none at all for an SSB-less cell."""
    if ssb_mode == "ssb_less":
        return [False] * horizon
    return [ssb.is_ssb_slot(t) for t in range(horizon)]


def slot_power(model: PowerModel, utilization: float, ssb_this_slot: bool,
               sleep_state: str) -> float:
    """Watts drawn in one slot given activity and sleep state."""
    if not 0.0 <= utilization <= 1.0:
        raise ValueError("utilization must be within [0, 1]")
    if sleep_state == "deep":
        return model.p_deep_sleep
    if sleep_state == "light":
        return model.p_light_sleep
    return (model.p_active_static
            + utilization * model.p_dynamic_per_util
            + (model.ssb_slot_cost if ssb_this_slot else 0.0))


def sleep_tracker(utilization: Sequence[float], ssb_slots: Sequence[bool],
                  model: PowerModel) -> list[str]:
    """Per-slot sleep state from an activity trace.

    A slot is busy when it serves traffic or carries SSB; busy slots are
    active and reset the idle counter. After ``light_sleep_entry_slots``
    consecutive idle slots the cell is in light sleep, after
    ``deep_sleep_entry_slots`` in deep sleep.
    """
    states: list[str] = []
    idle_run = 0
    for util, ssb in zip(utilization, ssb_slots):
        busy = util > 0.0 or ssb
        if busy:
            idle_run = 0
            states.append("active")
            continue
        if idle_run >= model.deep_sleep_entry_slots:
            states.append("deep")
        elif idle_run >= model.light_sleep_entry_slots:
            states.append("light")
        else:
            states.append("active")
        idle_run += 1
    return states


@dataclass(frozen=True)
class EnergyTrace:
    sleep_states: tuple[str, ...]
    watts_per_slot: tuple[float, ...]
    slot_seconds: float

    @property
    def energy_joules(self) -> float:
        return sum(self.watts_per_slot) * self.slot_seconds

    @property
    def mean_watts(self) -> float:
        return sum(self.watts_per_slot) / len(self.watts_per_slot)


def energy_of_trace(utilization: Sequence[float], ssb_slots: Sequence[bool],
                    model: PowerModel, slot_seconds: float) -> EnergyTrace:
    """Evaluate the power model over one activity trace."""
    states = sleep_tracker(utilization, ssb_slots, model)
    watts = tuple(
        slot_power(model, u, ssb, state)
        for u, ssb, state in zip(utilization, ssb_slots, states)
    )
    return EnergyTrace(tuple(states), watts, slot_seconds)


def trace_saving_gain(utilization: Sequence[float], ssb: SsbConfig,
                      model: PowerModel, slot_seconds: float) -> float:
    """Energy saving of dropping SSB, on one fixed utilization trace."""
    horizon = len(utilization)
    with_ssb = energy_of_trace(utilization, ssb_mask(ssb, "with_ssb", horizon),
                               model, slot_seconds)
    ssb_less = energy_of_trace(utilization, ssb_mask(ssb, "ssb_less", horizon),
                               model, slot_seconds)
    return 1.0 - ssb_less.energy_joules / with_ssb.energy_joules


def energy_saving_gain(scenario, ru_target: float, seed: int):
    """Calibrated with-SSB vs SSB-less comparison on a full scenario run.

    Defined with the experiment drivers; re-exported here because it is the
    headline energy figure. See :func:`flexca.sweeps.energy_saving_gain`.
    """
    from .sweeps import energy_saving_gain as _impl
    return _impl(scenario, ru_target, seed)
