"""Uplink transmitter switching across 2 to 4 bands with 2 transmitters.

Two frameworks are modeled. The dynamic framework (F1) lets the UE move its
transmitters across every configured band slot by slot. The indicated-pair
framework (F2) confines switching to a 2-band pair the network indicates
via DCI or MAC-CE; the pair changes only after a configurable indication
latency, and Rel-17 style switching applies inside the pair. A 2-band
baseline is F2 with the pair frozen.

switchedUL forbids simultaneous transmission on two bands, dualUL allows
it. Moving a transmitter between bands costs a retuning gap that eats UL
symbols at the start of the destination slot.
"""

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import NotF2, PairNotConfigured
from .spectrum import Carrier, slot_direction

FRAMEWORKS = ("F1_dynamic_all", "F2_indicated_pair")
UL_MODES = ("switchedUL", "dualUL")
DEFAULT_SWITCH_GAP_US = 140.0
TX_COUNT = 2


def pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class SwitchingConfig:
    bands: tuple[str, ...]
    framework: str = "F1_dynamic_all"
    ul_mode: str = "dualUL"
    switch_gap_us: Mapping[tuple[str, str], float] = field(default_factory=dict)
    default_gap_us: float = DEFAULT_SWITCH_GAP_US
    indication_latency_slots: int = 4
    reindication_margin: float = 0.10
    reindication_window_slots: int = 10
    reindication_period_slots: int = 10  # how often the network re-evaluates
    preview_slots: int = 10              # lookahead window while holding a state
    tx_count: int = TX_COUNT
    frozen_pair: Optional[tuple[str, str]] = None   # pins F2 (2-band baseline)

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))
        if self.frozen_pair is not None:
            pair = tuple(self.frozen_pair)
            if len(pair) != 2 or not set(pair) <= set(self.bands):
                raise ValueError("frozen_pair must be two configured bands")
            object.__setattr__(self, "frozen_pair", pair)
        if not 2 <= len(self.bands) <= 4:
            raise ValueError("configure between 2 and 4 bands")
        if len(set(self.bands)) != len(self.bands):
            raise ValueError("band ids must be distinct")
        if self.framework not in FRAMEWORKS:
            raise ValueError(f"framework must be in {FRAMEWORKS}")
        if self.ul_mode not in UL_MODES:
            raise ValueError(f"ul_mode must be in {UL_MODES}")
        if self.tx_count != TX_COUNT:
            raise ValueError("exactly 2 transmitters are modeled")
        gaps = {pair_key(*k): float(v) for k, v in self.switch_gap_us.items()}
        object.__setattr__(self, "switch_gap_us", gaps)

    def gap_us(self, band_a: str, band_b: str) -> float:
        if band_a == band_b:
            return 0.0
        return self.switch_gap_us.get(pair_key(band_a, band_b),
                                      self.default_gap_us)


Assignment = Optional[tuple[str, str]]     # (band_id, carrier_id) or idle


def _assign_key(a: Assignment):
    return (1, "", "") if a is None else (0, a[0], a[1])


@dataclass(frozen=True)
class TxState:
    """Per-slot placement of the two transmitters, canonically ordered."""

    assignments: tuple[Assignment, Assignment]
    active_pair: Optional[frozenset[str]] = None   # indicated pair, F2 only

    def __post_init__(self):
        ordered = tuple(sorted(self.assignments, key=_assign_key))
        object.__setattr__(self, "assignments", ordered)
        if self.active_pair is not None:
            object.__setattr__(self, "active_pair", frozenset(self.active_pair))

    @property
    def bands(self) -> tuple[str, ...]:
        return tuple(a[0] for a in self.assignments if a is not None)

    @property
    def idle(self) -> bool:
        return all(a is None for a in self.assignments)

    def sort_key(self):
        return tuple(_assign_key(a) for a in self.assignments)


IDLE_STATE = TxState((None, None))


def legal_states(config: SwitchingConfig,
                 ul_available: Mapping[str, Sequence[str]],
                 active_pair: Optional[frozenset[str]] = None) -> list[TxState]:
    """Every transmitter placement legal in this slot, canonically sorted.

    ``ul_available`` maps band id to the UL carriers usable this slot; a
    band whose slot carries no UL symbols must map to an empty list (or be
    absent). F2 enumeration stays inside ``active_pair``.
    """
    if config.framework == "F2_indicated_pair":
        if active_pair is None:
            raise NotF2("F2 enumeration needs the currently indicated pair")
        allowed = [b for b in config.bands if b in active_pair]
    else:
        allowed = list(config.bands)

    options: list[tuple[str, str]] = [
        (band, carrier)
        for band in allowed
        for carrier in ul_available.get(band, ())
    ]
    pair = frozenset(active_pair) if active_pair is not None else None

    states = {TxState((None, None), pair)}
    for opt in options:
        states.add(TxState((opt, None), pair))
    for a, b in itertools.combinations_with_replacement(options, 2):
        if config.ul_mode == "switchedUL" and a[0] != b[0]:
            continue
        states.add(TxState((a, b), pair))
    return sorted(states, key=TxState.sort_key)


@dataclass(frozen=True)
class TransitionCost:
    gap_us: float
    moved: tuple[tuple[str, str], ...]    # (from band, to band) per moved Tx

    @property
    def affected_bands(self) -> frozenset[str]:
        return frozenset(itertools.chain.from_iterable(self.moved))


def _match_moves(old_bands: Sequence[str], new_bands: Sequence[str]
                 ) -> list[tuple[str, str]]:
    """Pair off old and new band occupancies, keeping stays in place."""
    old = list(old_bands)
    new = list(new_bands)
    for band in list(old):
        if band in new:
            old.remove(band)
            new.remove(band)
    return list(zip(sorted(old), sorted(new)))


def transition(from_state: TxState, to_state: TxState,
               config: SwitchingConfig) -> TransitionCost:
    """Retuning cost of changing transmitter placement between slots.

    Transmitters keeping their band cost nothing; a transmitter appearing
    from idle or going idle costs nothing either. The slot-level gap is the
    maximum over moved transmitters.
    """
    moves = _match_moves(from_state.bands, to_state.bands)
    gaps = [config.gap_us(a, b) for a, b in moves if a != b]
    return TransitionCost(
        gap_us=max(gaps) if gaps else 0.0,
        moved=tuple((a, b) for a, b in moves if a != b),
    )


def per_band_gap(from_state: TxState, to_state: TxState,
                 config: SwitchingConfig) -> dict[str, float]:
    """Gap each destination band pays at its slot start, per moved Tx."""
    out: dict[str, float] = {}
    for a, b in _match_moves(from_state.bands, to_state.bands):
        if a != b:
            out[b] = max(out.get(b, 0.0), config.gap_us(a, b))
    return out


@dataclass(frozen=True)
class PairIndication:
    new_pair: frozenset[str]
    indicated_at_slot: int
    effective_slot: int
    changed: bool


def indicate_pair(config: SwitchingConfig, current_pair: frozenset[str],
                  new_pair: Iterable[str], slot: int) -> PairIndication:
    """Schedule an indicated-pair change; a same-pair indication is a no-op."""
    if config.framework != "F2_indicated_pair":
        raise NotF2("pair indication only applies to the indicated-pair framework")
    pair = frozenset(new_pair)
    if len(pair) != 2 or not pair <= set(config.bands):
        raise PairNotConfigured(
            f"pair {sorted(pair)} is not two configured bands of {config.bands}")
    if pair == frozenset(current_pair):
        return PairIndication(pair, slot, slot, changed=False)
    return PairIndication(pair, slot,
                          slot + config.indication_latency_slots, changed=True)


# -- per-band capacity profiles --------------------------------------------------

@dataclass(frozen=True)
class UlCarrierLink:
    """Capacity view of one UL carrier for the switching scheduler."""

    band_id: str
    carrier_id: str
    rate_bps: float                    # two-layer rate while transmitting
    ul_fraction: tuple[float, ...]     # periodic per-slot UL time fraction

    def fraction(self, slot: int) -> float:
        return self.ul_fraction[slot % len(self.ul_fraction)]


def link_from_carrier(carrier: Carrier, spectral_efficiency: float,
                      ) -> UlCarrierLink:
    """Build a capacity profile from a catalog carrier and a link SE."""
    if carrier.slot_pattern is None:
        fractions = (1.0,)
    else:
        fractions = tuple(
            slot_direction(carrier.slot_pattern, i)[2] / 14.0
            for i in range(len(carrier.slot_pattern))
        )
    return UlCarrierLink(
        band_id=carrier.band_id,
        carrier_id=carrier.carrier_id,
        rate_bps=carrier.bandwidth_mhz * 1e6 * spectral_efficiency,
        ul_fraction=fractions,
    )


# -- greedy horizon scheduler -----------------------------------------------------

@dataclass
class ScheduleResult:
    states: list[TxState]
    served_per_slot: list[dict[str, float]]    # bits served per band
    total_served_bits: float
    gap_us_paid: float
    indications: list[PairIndication]
    final_queues: dict[str, float]

    def served_in_band(self, band_id: str) -> float:
        return sum(s.get(band_id, 0.0) for s in self.served_per_slot)


def _tx_gap_lists(prev_state: TxState, state: TxState,
                  config: SwitchingConfig) -> tuple[dict[str, list[float]], int]:
    """Per destination band, one retuning gap per transmitter serving it.

    Transmitters staying on their band and transmitters appearing from idle
    contribute 0. Returns the gap lists and the number of moved Tx.
    """
    old = list(prev_state.bands)
    gaps: dict[str, list[float]] = {}
    incoming: list[str] = []
    for band in state.bands:
        if band in old:
            old.remove(band)
            gaps.setdefault(band, []).append(0.0)
        else:
            incoming.append(band)
    old.sort()
    moved = 0
    for i, band in enumerate(sorted(incoming)):
        if i < len(old):
            gaps.setdefault(band, []).append(config.gap_us(old[i], band))
            moved += 1
        else:
            gaps.setdefault(band, []).append(0.0)
    return gaps, moved


def _serve_with_state(state: TxState, prev_state: TxState,
                      links: Mapping[str, UlCarrierLink],
                      queues: Mapping[str, float], slot: int,
                      slot_seconds: float, config: SwitchingConfig,
                      ) -> tuple[float, dict[str, float], float, int]:
    """Bits served by holding ``state`` this slot, net of per-Tx retuning gaps."""
    gap_lists, moved = _tx_gap_lists(prev_state, state, config)
    served: dict[str, float] = {}
    max_gap = 0.0
    for band, tx_gaps in gap_lists.items():
        link = links[band]
        ul_time = slot_seconds * link.fraction(slot)
        capacity = 0.0
        for gap_us in tx_gaps:
            capacity += (link.rate_bps / TX_COUNT
                         * max(0.0, ul_time - gap_us * 1e-6))
            max_gap = max(max_gap, gap_us)
        served[band] = min(queues.get(band, 0.0), capacity)
    return sum(served.values()), served, max_gap, moved


def _hold_preview(state: TxState, links: Mapping[str, UlCarrierLink],
                  queues: dict[str, float], slot: int, slot_seconds: float,
                  horizon: int, preview: int) -> float:
    """Bits the state would serve over the next few slots if held (no gaps)."""
    remaining = dict(queues)
    total = 0.0
    tx_per_band: dict[str, int] = {}
    for a in state.assignments:
        if a is not None:
            tx_per_band[a[0]] = tx_per_band.get(a[0], 0) + 1
    for k in range(1, preview + 1):
        t = slot + k
        if t >= horizon:
            break
        for band, n_tx in tx_per_band.items():
            link = links[band]
            capacity = (link.rate_bps * (n_tx / TX_COUNT)
                        * slot_seconds * link.fraction(t))
            take = min(remaining.get(band, 0.0), capacity)
            remaining[band] = remaining.get(band, 0.0) - take
            total += take
    return total


def _pair_potential(pair: frozenset[str], links: Mapping[str, UlCarrierLink],
                    queues: Mapping[str, float], slot: int,
                    slot_seconds: float, window: int, latency: int,
                    horizon: int) -> float:
    """Demand the pair could clear over the upcoming decision window.

    Concentrates both Tx on the better band each slot (never worse under
    the per-Tx halving model) and caps each slot by the remaining queues,
    so a pair of empty bands scores nothing.
    """
    total = 0.0
    members = sorted(pair)
    remaining = {b: queues.get(b, 0.0) for b in members}
    for k in range(latency, latency + window):
        t = slot + k
        if t >= horizon:
            break
        best_band, best_take = None, 0.0
        for b in members:
            cap = links[b].rate_bps * slot_seconds * links[b].fraction(t)
            take = min(remaining[b], cap)
            if take > best_take:
                best_band, best_take = b, take
        if best_band is not None:
            remaining[best_band] -= best_take
            total += best_take
    return total


def schedule_ul(config: SwitchingConfig, links: Sequence[UlCarrierLink],
                arrivals: Mapping[str, Sequence[float]], horizon: int,
                slot_seconds: float,
                frozen_pair: Optional[Iterable[str]] = None) -> ScheduleResult:
    """Greedy per-slot transmitter placement over a demand trace.

    ``arrivals[band][slot]`` are bits entering that band's queue. Each slot
    the scheduler picks the legal state maximizing bits served now plus a
    short hold-state preview, so a retuning gap is only paid when the move
    wins over the preview window. Under F2 a pair re-indication is issued
    when another pair's windowed capacity beats the current pair's by the
    hysteresis margin; ``frozen_pair`` disables re-indication (the 2-band
    baseline).
    """
    by_band = {l.band_id: l for l in links}
    unknown = set(by_band) - set(config.bands)
    if unknown:
        raise ValueError(f"links cover unconfigured bands {sorted(unknown)}")

    queues: dict[str, float] = {b: 0.0 for b in by_band}
    is_f2 = config.framework == "F2_indicated_pair"
    if is_f2:
        active_pair = frozenset(frozen_pair if frozen_pair is not None
                                else config.bands[:2])
    else:
        active_pair = None
    pending: Optional[PairIndication] = None
    frozen = frozen_pair is not None

    prev_state = IDLE_STATE
    states: list[TxState] = []
    served_per_slot: list[dict[str, float]] = []
    indications: list[PairIndication] = []
    state_cache: dict[tuple, list[TxState]] = {}
    total_served = 0.0
    gap_paid = 0.0

    for slot in range(horizon):
        for band in queues:
            trace = arrivals.get(band)
            if trace is not None and slot < len(trace):
                queues[band] += trace[slot]

        if is_f2 and pending is not None and pending.effective_slot <= slot:
            active_pair = pending.new_pair
            pending = None

        if (is_f2 and not frozen and pending is None
                and slot % config.reindication_period_slots == 0
                and sum(queues.values()) > 0):
            best_pair, best_value = None, -1.0
            for cand in itertools.combinations(sorted(by_band), 2):
                value = _pair_potential(frozenset(cand), by_band, queues, slot,
                                        slot_seconds,
                                        config.reindication_window_slots,
                                        config.indication_latency_slots, horizon)
                if value > best_value:
                    best_pair, best_value = frozenset(cand), value
            current_value = _pair_potential(active_pair, by_band, queues, slot,
                                            slot_seconds,
                                            config.reindication_window_slots,
                                            config.indication_latency_slots,
                                            horizon)
            if (best_pair != active_pair
                    and best_value > current_value * (1 + config.reindication_margin)):
                pending = indicate_pair(config, active_pair, best_pair, slot)
                indications.append(pending)

        avail_key = (tuple(band for band, link in sorted(by_band.items())
                           if link.fraction(slot) > 0), active_pair)
        candidates = state_cache.get(avail_key)
        if candidates is None:
            avail = {band: [by_band[band].carrier_id] for band in avail_key[0]}
            candidates = legal_states(config, avail, active_pair)
            state_cache[avail_key] = candidates

        best_state, best_key = IDLE_STATE, None
        best_served: dict[str, float] = {}
        best_gap = 0.0
        for state in candidates:
            now, served, gap, moved = _serve_with_state(
                state, prev_state, by_band, queues, slot, slot_seconds, config)
            after = {b: queues[b] - served.get(b, 0.0) for b in queues}
            preview = _hold_preview(state, by_band, after, slot, slot_seconds,
                                    horizon, config.preview_slots)
            # maximize outlook over the hold window so transmitters park for
            # wide TDD bursts instead of chasing crumbs across a retuning
            # gap; bits served now break ties, then fewer moves, fewer bands
            key = (now + preview, now, -moved, -len(served))
            if best_key is None or key > best_key:
                best_state, best_key = state, key
                best_served, best_gap = served, gap

        gap_paid += best_gap
        for band, bits in best_served.items():
            queues[band] -= bits
            total_served += bits
        states.append(best_state)
        served_per_slot.append(best_served)
        prev_state = best_state

    return ScheduleResult(
        states=states,
        served_per_slot=served_per_slot,
        total_served_bits=total_served,
        gap_us_paid=gap_paid,
        indications=indications,
        final_queues=queues,
    )
