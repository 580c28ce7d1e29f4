"""Slot-driven simulation loop.

One World advances tick by tick: lifecycle directives, traffic arrivals,
PDCCH grants, per-UE transmitter placement, data serving over shared
carrier time, and per-cell energy accounting. Mixed subcarrier spacings run
on a common tick equal to the shortest slot; wider-slot carriers prorate
their symbol fractions over the ticks they span.

Runs are pure functions of (scenario, seed): every random draw flows from
the seed, UE order rotates deterministically, and tie-breaks are fixed, so
repeated runs are byte-identical.
"""

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .energy import PowerModel, SsbConfig, slot_power
from .errors import ScenarioInvalid
from .lifecycle import CellTable, ConfigPlan, activate, apply_config
from .pdcch import (
    Allocator,
    CoresetModel,
    DciSpec,
    dci_payload_bits,
    select_aggregation_level,
)
from .seeding import generator
from .spectrum import Carrier, Catalog, slot_direction, validate_cell
from .traffic import TrafficModel, generate_traffic
from .txswitch import SwitchingConfig, pair_key

_SE_KEY = 0x5E
_CQ_KEY = 0xC0
IDLE = ()   # per-UE band occupancy when not transmitting


@dataclass(frozen=True)
class LinkConfig:
    """Per-(UE, carrier) spectral efficiency: sampled once per run."""

    se_distribution: str = "log_uniform"     # or "fixed"
    se_min: float = 0.5
    se_max: float = 6.0
    fixed_se: Mapping[str, float] = field(default_factory=dict)   # carrier -> SE
    control_quality_range: tuple[float, float] = (0.35, 0.9)

    def __post_init__(self):
        if self.se_distribution not in ("log_uniform", "fixed"):
            raise ValueError("se_distribution must be log_uniform or fixed")
        object.__setattr__(self, "fixed_se", dict(self.fixed_se))


@dataclass(frozen=True)
class Scenario:
    """Complete description of one simulation run."""

    name: str
    experiment: str                      # txswitch_upt | scell_energy | pdcch_blocking | generic
    catalog: Catalog
    plan: ConfigPlan
    traffic: TrafficModel
    power: PowerModel = PowerModel()
    ssb: SsbConfig = SsbConfig()
    switching: Optional[SwitchingConfig] = None
    coreset: Optional[CoresetModel] = None
    link: LinkConfig = LinkConfig()
    horizon: int = 2000
    seed: int = 0
    mc_dci: bool = True
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))


@dataclass(frozen=True)
class MetricsReport:
    mean_upt_mbps: float
    blocking_rate: float
    cce_saving: float
    energy_joules: float
    energy_per_cell: dict[str, float]
    ru_per_cell: dict[str, float]
    completed_files: int
    incomplete_files: int
    arrived_bits: float
    served_bits: float
    pending_bits: float
    seed: int
    config_digest: str

    def to_dict(self) -> dict:
        return {
            "mean_upt_mbps": self.mean_upt_mbps,
            "blocking_rate": self.blocking_rate,
            "cce_saving": self.cce_saving,
            "energy_joules": self.energy_joules,
            "energy_per_cell": dict(sorted(self.energy_per_cell.items())),
            "ru_per_cell": dict(sorted(self.ru_per_cell.items())),
            "completed_files": self.completed_files,
            "incomplete_files": self.incomplete_files,
            "arrived_bits": self.arrived_bits,
            "served_bits": self.served_bits,
            "pending_bits": self.pending_bits,
            "seed": self.seed,
            "config_digest": self.config_digest,
        }


def config_digest(scenario: Scenario, seed: int) -> str:
    """Stable fingerprint of (scenario, seed) for reproducibility records."""
    blob = json.dumps(_scenario_fingerprint(scenario) | {"seed": seed},
                      sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _scenario_fingerprint(s: Scenario) -> dict:
    return {
        "name": s.name,
        "experiment": s.experiment,
        "bands": sorted(s.catalog.bands),
        "carriers": sorted(
            (c.carrier_id, c.band_id, c.direction, c.center_freq_mhz,
             c.bandwidth_mhz, c.scs_khz,
             None if c.slot_pattern is None else
             (c.slot_pattern.slots, c.slot_pattern.special_split))
            for c in s.catalog.carriers.values()),
        "cells": sorted(
            (c.cell_id, c.role, c.dl_carrier, c.ul_carrier, c.mode,
             c.tag_id, c.ssb_mode) for c in s.plan.configured_cells),
        "setting": s.plan.setting,
        "directives": [(d.slot, d.cell_id, d.action, d.shape)
                       for d in s.plan.activation_directives],
        "traffic": (s.traffic.direction, s.traffic.arrival_rate_per_slot,
                    s.traffic.file_size_bits, s.traffic.n_ues,
                    s.traffic.serving_cells),
        "power": (s.power.p_active_static, s.power.p_light_sleep,
                  s.power.p_deep_sleep, s.power.p_dynamic_per_util,
                  s.power.ssb_slot_cost, s.power.light_sleep_entry_slots,
                  s.power.deep_sleep_entry_slots),
        "ssb": (s.ssb.periodicity_slots, s.ssb.ssb_slots_per_burst),
        "switching": None if s.switching is None else (
            s.switching.bands, s.switching.framework, s.switching.ul_mode,
            sorted(s.switching.switch_gap_us.items()),
            s.switching.default_gap_us, s.switching.indication_latency_slots,
            s.switching.reindication_margin,
            s.switching.reindication_window_slots, s.switching.preview_slots),
        "coreset": None if s.coreset is None else (
            s.coreset.total_cces, sorted(s.coreset.candidates_per_al.items()),
            s.coreset.blind_decode_budget),
        "link": (s.link.se_distribution, s.link.se_min, s.link.se_max,
                 sorted(s.link.fixed_se.items()),
                 s.link.control_quality_range),
        "horizon": s.horizon,
        "mc_dci": s.mc_dci,
        "params": dict(s.params),
    }


def validate_scenario(scenario: Scenario) -> list[str]:
    """Aggregate every model violation in the scenario; empty means clean."""
    diags = [str(v) for v in scenario.catalog.validate().violations]
    for cell in scenario.plan.configured_cells:
        try:
            report = validate_cell(cell, scenario.catalog)
            diags.extend(f"{cell.cell_id}: {v}" for v in report.violations)
        except Exception as exc:
            diags.append(f"{cell.cell_id}: {exc}")
    if scenario.traffic.direction == "ul" and scenario.switching is None:
        diags.append("ul traffic requires a switching config")
    if scenario.switching is not None:
        for band in scenario.switching.bands:
            if band not in scenario.catalog.bands:
                diags.append(f"switching band {band} not in catalog")
    if scenario.horizon < 1:
        diags.append("horizon must be >= 1")
    return diags


@dataclass
class _FileEntry:
    size_bits: float
    remaining_bits: float
    arrival_tick: int


class _UeState:
    __slots__ = ("ue_id", "files", "queue_bits", "tx_tuning", "active_pair",
                 "pending_pair", "pending_tick", "control_quality", "rate",
                 "se")

    def __init__(self, ue_id: int, control_quality: float):
        self.ue_id = ue_id
        self.files: deque[_FileEntry] = deque()
        self.queue_bits = 0.0
        # band each transmitter is currently tuned to; retuning cost is paid
        # against this even after idle ticks (the RF chain stays tuned)
        self.tx_tuning: list = [None, None]
        self.active_pair: Optional[frozenset[str]] = None
        self.pending_pair: Optional[frozenset[str]] = None
        self.pending_tick = 0
        self.control_quality = control_quality
        self.rate: dict[str, float] = {}   # band -> full 2-layer bits/s


class World:
    """Mutable simulation state; advance with :meth:`step`."""

    def __init__(self, scenario: Scenario, seed: int):
        diags = validate_scenario(scenario)
        if diags:
            raise ScenarioInvalid(diags)
        self.scenario = scenario
        self.seed = seed
        self.tick = 0

        carriers = scenario.catalog.carriers
        self.tick_seconds = min(c.slot_seconds for c in carriers.values())
        self._frac: dict[str, tuple[tuple[float, ...], tuple[float, ...]]] = {}
        for cid, carrier in carriers.items():
            self._frac[cid] = self._fraction_tables(carrier)

        self.table: CellTable = apply_config(scenario.plan, scenario.catalog)
        self._pending_directives = sorted(
            scenario.plan.activation_directives, key=lambda d: (d.slot,))
        self._directive_idx = 0
        self._srs_block: dict[str, int] = {}    # cell -> tick its UL carries SRS

        tm = scenario.traffic
        self.arrivals = generate_traffic(tm, scenario.horizon, seed)
        self.file_size = tm.file_size_bits

        self.ues: list[_UeState] = []
        cq_lo, cq_hi = scenario.link.control_quality_range
        for ue in range(tm.n_ues):
            rng = generator(seed, _CQ_KEY, ue)
            self.ues.append(_UeState(ue, float(rng.uniform(cq_lo, cq_hi))))
        self._sample_link_qualities()

        # accounting
        self.arrived_bits = 0.0
        self.served_bits = 0.0
        self.upt_values: list[float] = []
        self.completed_files = 0
        self.dcis_total = 0
        self.dcis_blocked = 0
        self.cce_demand_actual = 0
        self.cce_demand_single_cell = 0
        self.energy_per_cell: dict[str, float] = {}
        self.ru_used: dict[str, float] = {}
        self.ru_avail: dict[str, float] = {}
        self._idle_runs: dict[str, int] = {}
        self._rebuild_active()

    # -- construction helpers ------------------------------------------------

    def _fraction_tables(self, carrier: Carrier):
        ticks_per_slot = max(1, round(carrier.slot_seconds / self.tick_seconds))
        if carrier.slot_pattern is None:
            dl = (1.0,) if carrier.direction in ("DL", "bidirectional") else (0.0,)
            ul = (1.0,) if carrier.direction in ("UL", "bidirectional") else (0.0,)
            return (dl * ticks_per_slot, ul * ticks_per_slot)
        dl_list, ul_list = [], []
        for i in range(len(carrier.slot_pattern)):
            d, _, u = slot_direction(carrier.slot_pattern, i)
            dl_list.extend([d / 14.0] * ticks_per_slot)
            ul_list.extend([u / 14.0] * ticks_per_slot)
        return (tuple(dl_list), tuple(ul_list))

    def _sample_link_qualities(self):
        link = self.scenario.link
        carrier_ids = sorted(self.scenario.catalog.carriers)
        for ue_state in self.ues:
            ue_state.se = {}
            rng = generator(self.seed, _SE_KEY, ue_state.ue_id)
            draws = rng.uniform(0.0, 1.0, len(carrier_ids))
            for i, cid in enumerate(carrier_ids):
                if link.se_distribution == "fixed":
                    se = link.fixed_se.get(cid, link.se_min)
                else:
                    lo, hi = math.log(link.se_min), math.log(link.se_max)
                    se = math.exp(lo + (hi - lo) * draws[i])
                ue_state.se[cid] = se

    def _rebuild_active(self):
        """Refresh carrier maps after lifecycle changes."""
        tm = self.scenario.traffic
        serving = set(tm.serving_cells) or None
        self.ul_bands: dict[str, tuple[str, str]] = {}   # band -> (cell, carrier)
        self.dl_pools: list[tuple[str, str]] = []        # (cell, carrier)
        switching = self.scenario.switching
        allowed_bands = set(switching.bands) if switching else None
        for rec in self.table.active_cells():
            cid = rec.cell.cell_id
            if rec.exposes_ul:
                carrier = self.scenario.catalog.carrier(rec.ul_carrier)
                band = carrier.band_id
                if allowed_bands is None or band in allowed_bands:
                    if (serving is None or cid in serving) and band not in self.ul_bands:
                        self.ul_bands[band] = (cid, rec.ul_carrier)
            if rec.exposes_dl and (serving is None or cid in serving):
                self.dl_pools.append((cid, rec.dl_carrier))
        self.dl_pools.sort()
        self._window_cache = {}
        for ue_state in self.ues:
            ue_state.rate = {
                band: (self.scenario.catalog.carrier(carrier).bandwidth_mhz
                       * 1e6 * ue_state.se[carrier])
                for band, (_, carrier) in self.ul_bands.items()
            }
            if (self.scenario.switching is not None
                    and ue_state.active_pair is None):
                initial = (self.scenario.switching.frozen_pair
                           or self.scenario.switching.bands[:2])
                ue_state.active_pair = frozenset(initial)

    # -- per-tick fractions ----------------------------------------------------

    def _ul_seconds(self, carrier_id: str, tick: int) -> float:
        table = self._frac[carrier_id][1]
        return self.tick_seconds * table[tick % len(table)]

    def _dl_seconds(self, carrier_id: str, tick: int) -> float:
        table = self._frac[carrier_id][0]
        return self.tick_seconds * table[tick % len(table)]

    def _ul_window(self, band: str, tick: int) -> float:
        """UL seconds a held transmitter sees on this band over the next
        preview window, cached per pattern phase."""
        _, carrier = self.ul_bands[band]
        period = len(self._frac[carrier][1])
        phase = tick % period
        key = (band, phase)
        cached = self._window_cache.get(key)
        if cached is None:
            k_max = self.scenario.switching.preview_slots
            cached = sum(self._ul_seconds(carrier, tick + k)
                         for k in range(1, k_max + 1))
            self._window_cache[key] = cached
        return cached

    # -- main loop ---------------------------------------------------------------

    def step(self):
        t = self.tick
        self._apply_directives(t)
        self._inject_arrivals(t)

        used_time: dict[tuple[str, str], float] = {}
        alloc = (Allocator(self.scenario.coreset, seed=self.seed, slot=t)
                 if self.scenario.coreset is not None else None)

        if self.scenario.traffic.direction == "ul":
            self._serve_uplink(t, alloc, used_time)
        else:
            self._serve_downlink(t, alloc, used_time)

        self._account_energy(t, used_time)
        self.tick += 1

    def run_to_end(self):
        while self.tick < self.scenario.horizon:
            self.step()

    def _apply_directives(self, t: int):
        changed = False
        while (self._directive_idx < len(self._pending_directives)
               and self._pending_directives[self._directive_idx].slot <= t):
            directive = self._pending_directives[self._directive_idx]
            events = activate(self.table, directive)
            for ev in events:
                if ev.kind == "srs_or_prach":
                    self._srs_block[ev.cell_id] = ev.slot
            self._directive_idx += 1
            changed = True
        if changed:
            self._rebuild_active()

    def _inject_arrivals(self, t: int):
        for ue_state in self.ues:
            n = int(self.arrivals[ue_state.ue_id][t])
            for _ in range(n):
                ue_state.files.append(_FileEntry(self.file_size, self.file_size, t))
                ue_state.queue_bits += self.file_size
                self.arrived_bits += self.file_size

    # -- uplink serving -----------------------------------------------------------

    def _ul_candidates(self, bands: list[str], switching: SwitchingConfig):
        states: list[tuple[str, ...]] = [IDLE]
        states.extend((b,) for b in bands)
        for i, a in enumerate(bands):
            for b in bands[i:]:
                if switching.ul_mode == "switchedUL" and a != b:
                    continue
                states.append((a, b))
        return states

    def _maybe_reindicate(self, ue_state: _UeState, t: int,
                          switching: SwitchingConfig):
        if ue_state.pending_pair is not None:
            if ue_state.pending_tick <= t:
                ue_state.active_pair = ue_state.pending_pair
                ue_state.pending_pair = None
            else:
                return
        if switching.frozen_pair is not None or ue_state.queue_bits <= 0:
            return
        if t % switching.reindication_period_slots != 0:
            return
        bands = sorted(self.ul_bands)
        if len(bands) < 3:
            return
        latency = switching.indication_latency_slots
        window = switching.reindication_window_slots

        def potential(pair) -> float:
            total = 0.0
            for k in range(latency, latency + window):
                tk = t + k
                best = 0.0
                for band in pair:
                    cell, carrier = self.ul_bands[band]
                    cap = ue_state.rate[band] * self._ul_seconds(carrier, tk)
                    if cap > best:
                        best = cap
                total += best
            return total

        current = potential(sorted(ue_state.active_pair & set(bands)))
        best_pair, best_value = None, current
        for i, a in enumerate(bands):
            for b in bands[i + 1:]:
                if frozenset((a, b)) == ue_state.active_pair:
                    continue
                value = potential((a, b))
                if value > best_value:
                    best_pair, best_value = frozenset((a, b)), value
        if (best_pair is not None
                and best_value > current * (1.0 + switching.reindication_margin)):
            ue_state.pending_pair = best_pair
            ue_state.pending_tick = t + latency

    def _serve_uplink(self, t: int, alloc, used_time):
        switching = self.scenario.switching
        remaining: dict[str, float] = {}
        for band, (cell, carrier) in self.ul_bands.items():
            if self._srs_block.get(cell) == t:
                remaining[band] = 0.0   # SRS occasion occupies the UL part
            else:
                remaining[band] = self._ul_seconds(carrier, t)

        backlogged = [u for u in self.ues if u.files]
        backlogged.sort(key=lambda u: (u.files[0].arrival_tick, u.ue_id))
        for ue_state in backlogged:
            if switching.framework == "F2_indicated_pair":
                self._maybe_reindicate(ue_state, t, switching)
                allowed = [b for b in self.ul_bands
                           if b in ue_state.active_pair and remaining[b] > 0]
            else:
                allowed = [b for b in self.ul_bands if remaining[b] > 0]
            allowed.sort()
            if not allowed:
                continue

            chosen, per_band = self._pick_ul_state(ue_state, allowed,
                                                   remaining, t, switching)
            if not chosen:
                continue

            cells = sorted({self.ul_bands[b][0] for b in chosen})
            if not self._grant(alloc, ue_state, cells):
                # blocked control channel: grant retried next tick
                continue

            for band, (time_used, bits) in per_band.items():
                cell, carrier = self.ul_bands[band]
                remaining[band] -= time_used
                key = (cell, carrier)
                used_time[key] = used_time.get(key, 0.0) + time_used
                self._consume_queue(ue_state, bits, t)
            self._retune(ue_state, chosen)

    def _pick_ul_state(self, ue_state: _UeState, allowed: list[str],
                       remaining: dict[str, float], t: int,
                       switching: SwitchingConfig):
        """Best band occupancy for this UE given leftover carrier time."""
        best_key = None
        best: tuple[tuple[str, ...], dict[str, tuple[float, float]]] = (IDLE, {})
        tuned = ue_state.tx_tuning
        queue = ue_state.queue_bits

        for state in self._ul_candidates(allowed, switching):
            per_band: dict[str, tuple[float, float]] = {}
            bits_now = 0.0
            q_left = queue
            counts: dict[str, int] = {}
            for band in state:
                counts[band] = counts.get(band, 0) + 1
            # transmitters already tuned to the band retune for free; the
            # others pay the gap against their current tuning (idle ticks do
            # not reset it); a never-tuned transmitter starts for free
            leftover = [b for b in tuned]
            for band in state:
                if band in leftover:
                    leftover.remove(band)
            leftover.sort(key=lambda b: (b is None, b))
            moved = 0
            for band in sorted(counts):
                n_tx = counts[band]
                movers = max(0, n_tx - tuned.count(band))
                gap_s = 0.0
                for _ in range(movers):
                    if leftover:
                        src = leftover.pop(0)
                        if src is not None:
                            gap_s = max(gap_s,
                                        switching.gap_us(src, band) * 1e-6)
                            moved += 1
                cell, carrier = self.ul_bands[band]
                window = max(0.0, self._ul_seconds(carrier, t) - gap_s)
                window = min(window, remaining[band])
                rate = ue_state.rate[band] * (n_tx / 2.0)
                if rate <= 0 or window <= 0 or q_left <= 0:
                    continue
                time_needed = min(window, q_left / rate)
                bits = rate * time_needed
                per_band[band] = (time_needed, bits)
                bits_now += bits
                q_left -= bits

            preview = 0.0
            if q_left > 0 and state:
                cap = 0.0
                for band, n_tx in counts.items():
                    cap += (ue_state.rate[band] * (n_tx / 2.0)
                            * self._ul_window(band, t))
                preview = min(q_left, cap)

            # maximize bits served this tick; the hold preview breaks ties,
            # then fewer retunes and fewer occupied bands
            key = (bits_now, preview, -moved, -len(counts))
            if best_key is None or key > best_key:
                best_key = key
                best = (state, per_band)
        return best

    def _retune(self, ue_state: _UeState, chosen: tuple[str, ...]):
        """Update per-Tx tuning after transmitting on ``chosen`` bands."""
        tuned = ue_state.tx_tuning
        new = list(chosen)
        keep = []
        for band in tuned:
            if band in new:
                new.remove(band)
                keep.append(band)
        # unused transmitters keep their tuning; retuned ones take the new
        # bands, never-tuned slots fill first
        spare = [b for b in tuned if b is not None and b not in keep]
        while len(keep) < 2:
            if new:
                keep.append(new.pop(0))
            elif spare:
                keep.append(spare.pop(0))
            else:
                keep.append(None)
        ue_state.tx_tuning = keep

    # -- downlink serving -----------------------------------------------------------

    def _serve_downlink(self, t: int, alloc, used_time):
        remaining: dict[tuple[str, str], float] = {}
        for cell, carrier in self.dl_pools:
            rec = self.table[cell]
            blocked = (rec.cell.ssb_mode == "with_ssb"
                       and self.scenario.ssb.is_ssb_slot(t))
            remaining[(cell, carrier)] = (
                0.0 if blocked else self._dl_seconds(carrier, t))

        n_ues = len(self.ues)
        order = [(t + i) % n_ues for i in range(n_ues)]
        for idx in order:
            ue_state = self.ues[idx]
            if ue_state.queue_bits <= 0:
                continue
            pools = sorted(
                (p for p in remaining if remaining[p] > 0),
                key=lambda p: -ue_state.se[p[1]])
            if not pools:
                continue
            plan: list[tuple[tuple[str, str], float, float]] = []
            q_left = ue_state.queue_bits
            for pool in pools:
                if q_left <= 0:
                    break
                cell, carrier = pool
                rate = (self.scenario.catalog.carrier(carrier).bandwidth_mhz
                        * 1e6 * ue_state.se[carrier])
                time_needed = min(remaining[pool], q_left / rate)
                if time_needed <= 0:
                    continue
                bits = rate * time_needed
                plan.append((pool, time_needed, bits))
                q_left -= bits
            if not plan:
                continue
            cells = sorted({pool[0][0] for pool in plan})
            if not self._grant(alloc, ue_state, cells):
                continue
            for pool, time_needed, bits in plan:
                remaining[pool] -= time_needed
                used_time[pool] = used_time.get(pool, 0.0) + time_needed
                self._consume_queue(ue_state, bits, t)

    # -- shared helpers ----------------------------------------------------------

    def _grant(self, alloc, ue_state: _UeState, cells: list[str]) -> bool:
        """Place the control message(s) for this UE; False when blocked."""
        if alloc is None:
            return True
        q = ue_state.control_quality
        sc_al = select_aggregation_level(60, q)
        if self.scenario.mc_dci or len(cells) == 1:
            bits = dci_payload_bits(len(cells))
            al = select_aggregation_level(bits, q)
            dci = DciSpec(tuple(cells), bits, al, ue_state.ue_id)
            self.dcis_total += 1
            self.cce_demand_actual += al
            self.cce_demand_single_cell += sc_al * len(cells)
            if alloc.try_place(dci) is None:
                self.dcis_blocked += 1
                return False
            return True
        placed_all = True
        for cell in cells:
            dci = DciSpec((cell,), 60, sc_al, ue_state.ue_id)
            self.dcis_total += 1
            self.cce_demand_actual += sc_al
            self.cce_demand_single_cell += sc_al
            if alloc.try_place(dci) is None:
                self.dcis_blocked += 1
                placed_all = False
        return placed_all

    def _consume_queue(self, ue_state: _UeState, bits: float, t: int):
        self.served_bits += bits
        ue_state.queue_bits -= bits
        remaining = bits
        while remaining > 1e-9 and ue_state.files:
            head = ue_state.files[0]
            take = min(head.remaining_bits, remaining)
            head.remaining_bits -= take
            remaining -= take
            if head.remaining_bits <= 1e-9:
                ue_state.files.popleft()
                if not ue_state.files:
                    ue_state.queue_bits = 0.0
                duration = (t - head.arrival_tick + 1) * self.tick_seconds
                self.upt_values.append(head.size_bits / duration)
                self.completed_files += 1

    def _account_energy(self, t: int, used_time):
        ssb_tick = self.scenario.ssb.is_ssb_slot(t)
        for rec in self.table.active_cells():
            cid = rec.cell.cell_id
            avail = 0.0
            used = 0.0
            if rec.exposes_dl:
                avail += self._dl_seconds(rec.dl_carrier, t)
                used += used_time.get((cid, rec.dl_carrier), 0.0)
            if rec.exposes_ul:
                avail += self._ul_seconds(rec.ul_carrier, t)
                used += used_time.get((cid, rec.ul_carrier), 0.0)
            util = min(1.0, used / avail) if avail > 0 else 0.0
            has_ssb = (ssb_tick and rec.exposes_dl
                       and rec.cell.ssb_mode == "with_ssb")

            busy = util > 0.0 or has_ssb
            run = 0 if busy else self._idle_runs.get(cid, 0)
            model = self.scenario.power
            if busy:
                state = "active"
            elif run >= model.deep_sleep_entry_slots:
                state = "deep"
            elif run >= model.light_sleep_entry_slots:
                state = "light"
            else:
                state = "active"
            self._idle_runs[cid] = 0 if busy else run + 1

            watts = slot_power(model, util, has_ssb, state)
            self.energy_per_cell[cid] = (self.energy_per_cell.get(cid, 0.0)
                                         + watts * self.tick_seconds)
            self.ru_used[cid] = self.ru_used.get(cid, 0.0) + used
            self.ru_avail[cid] = self.ru_avail.get(cid, 0.0) + avail

    # -- reporting ------------------------------------------------------------------

    def metrics(self) -> MetricsReport:
        pending = sum(u.queue_bits for u in self.ues)
        mean_upt = (sum(self.upt_values) / len(self.upt_values) / 1e6
                    if self.upt_values else 0.0)
        ru = {cid: (self.ru_used[cid] / self.ru_avail[cid]
                    if self.ru_avail.get(cid) else 0.0)
              for cid in self.ru_used}
        saving = (1.0 - self.cce_demand_actual / self.cce_demand_single_cell
                  if self.cce_demand_single_cell else 0.0)
        return MetricsReport(
            mean_upt_mbps=mean_upt,
            blocking_rate=(self.dcis_blocked / self.dcis_total
                           if self.dcis_total else 0.0),
            cce_saving=max(0.0, saving),
            energy_joules=sum(self.energy_per_cell.values()),
            energy_per_cell=dict(self.energy_per_cell),
            ru_per_cell=ru,
            completed_files=self.completed_files,
            incomplete_files=sum(len(u.files) for u in self.ues),
            arrived_bits=self.arrived_bits,
            served_bits=self.served_bits,
            pending_bits=pending,
            seed=self.seed,
            config_digest=config_digest(self.scenario, self.seed),
        )


def run(scenario: Scenario, seed: Optional[int] = None) -> MetricsReport:
    """Execute one deterministic run and return its metrics."""
    world = World(scenario, scenario.seed if seed is None else seed)
    world.run_to_end()
    return world.metrics()
