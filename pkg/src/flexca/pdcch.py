"""PDCCH resource model: DCI sizing, aggregation levels, CCE allocation.

A single-cell DCI is 60 payload bits; scheduling N cells from one DCI adds
12 bits per extra cell, capped by the 140-bit Polar encoder limit. DCIs
occupy 1/2/4/8/16 CCEs depending on the code rate the UE's channel
supports, land on per-UE randomized candidate positions inside a CORESET,
and block when no feasible placement remains. Monte-Carlo experiments
measure the blocking-rate and CCE-demand gains of multi-cell scheduling
over per-cell DCIs.
"""

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import NoFeasibleAL, PolarCapExceeded
from .seeding import generator, mix64

BASE_DCI_BITS = 60
BITS_PER_EXTRA_CELL = 12
MAX_DCI_PAYLOAD_BITS = 140          # Polar code limit, CRC excluded
AGGREGATION_LEVELS = (1, 2, 4, 8, 16)
# 6 REGs per CCE x 9 usable REs per REG x 2 bits (QPSK)
CCE_PAYLOAD_BITS = 108
DEFAULT_CANDIDATES_PER_AL = {1: 6, 2: 6, 4: 4, 8: 2, 16: 1}
DEFAULT_BLIND_DECODE_BUDGET = 44


def dci_payload_bits(n_cells: int) -> int:
    """Payload bits of a DCI scheduling ``n_cells`` cells (CRC excluded)."""
    if n_cells < 1:
        raise ValueError("a DCI schedules at least one cell")
    bits = BASE_DCI_BITS + BITS_PER_EXTRA_CELL * (n_cells - 1)
    if bits > MAX_DCI_PAYLOAD_BITS:
        raise PolarCapExceeded(
            f"{n_cells}-cell DCI needs {bits} bits > {MAX_DCI_PAYLOAD_BITS}")
    return bits


def select_aggregation_level(payload_bits: int, channel_quality: float) -> int:
    """Smallest AL whose effective code rate fits the channel.

    ``channel_quality`` is the highest code rate the UE can still decode,
    in (0, 1]. The effective rate at level L is payload / (L * 108).
    """
    if not 0.0 < channel_quality <= 1.0:
        raise ValueError("channel_quality must be in (0, 1]")
    if payload_bits > MAX_DCI_PAYLOAD_BITS:
        raise PolarCapExceeded(f"{payload_bits} bits exceed the Polar cap")
    for al in AGGREGATION_LEVELS:
        if payload_bits <= channel_quality * al * CCE_PAYLOAD_BITS:
            return al
    raise NoFeasibleAL(
        f"{payload_bits} bits at quality {channel_quality} exceed AL 16")


@dataclass(frozen=True)
class DciSpec:
    """One downlink control message awaiting CCE resources."""

    scheduled_cells: tuple[str, ...]
    payload_bits: int
    aggregation_level: int
    owner_ue: int
    candidates: Optional[tuple[int, ...]] = None   # explicit starts, for tests

    def __post_init__(self):
        object.__setattr__(self, "scheduled_cells", tuple(self.scheduled_cells))
        if not self.scheduled_cells:
            raise ValueError("scheduled_cells must be non-empty")
        expected = BASE_DCI_BITS + BITS_PER_EXTRA_CELL * (len(self.scheduled_cells) - 1)
        if self.payload_bits != expected:
            raise ValueError(
                f"payload must be {expected} bits for "
                f"{len(self.scheduled_cells)} cells, got {self.payload_bits}")
        if self.payload_bits > MAX_DCI_PAYLOAD_BITS:
            raise PolarCapExceeded(f"{self.payload_bits} bits exceed the Polar cap")
        if self.aggregation_level not in AGGREGATION_LEVELS:
            raise ValueError(f"bad aggregation level {self.aggregation_level}")
        if self.candidates is not None:
            object.__setattr__(self, "candidates", tuple(self.candidates))


def make_dci(cells: Sequence[str], owner_ue: int, channel_quality: float,
             candidates: Optional[Sequence[int]] = None) -> DciSpec:
    bits = dci_payload_bits(len(cells))
    return DciSpec(tuple(cells), bits,
                   select_aggregation_level(bits, channel_quality), owner_ue,
                   candidates=tuple(candidates) if candidates is not None else None)


def _aligned_starts(total_cces: int, al: int) -> tuple[int, ...]:
    return tuple(range(0, total_cces - al + 1, al))


@dataclass(frozen=True)
class CoresetModel:
    """CCE pool with per-AL candidate positions and a blind-decode budget.

    ``candidate_positions`` lists every start a DCI of that AL may use;
    each UE monitors only ``candidates_per_al[al]`` of them per slot,
    chosen by a seeded hash so collisions between UEs vary slot to slot.
    """

    total_cces: int
    candidates_per_al: Mapping[int, int] = field(
        default_factory=lambda: dict(DEFAULT_CANDIDATES_PER_AL))
    candidate_positions: Optional[Mapping[int, tuple[int, ...]]] = None
    blind_decode_budget: int = DEFAULT_BLIND_DECODE_BUDGET

    def __post_init__(self):
        if self.total_cces < 1:
            raise ValueError("total_cces must be positive")
        if self.blind_decode_budget < 1:
            raise ValueError("blind_decode_budget must be positive")
        if self.candidate_positions is None:
            positions = {al: _aligned_starts(self.total_cces, al)
                         for al in AGGREGATION_LEVELS if al <= self.total_cces}
        else:
            positions = {al: tuple(v)
                         for al, v in self.candidate_positions.items()}
        for al, starts in positions.items():
            for s in starts:
                if s < 0 or s + al > self.total_cces:
                    raise ValueError(
                        f"candidate {s} at AL {al} does not fit in "
                        f"{self.total_cces} CCEs")
        object.__setattr__(self, "candidate_positions", positions)
        counts = {al: min(n, len(positions.get(al, ())))
                  for al, n in self.candidates_per_al.items()}
        if sum(counts.values()) > self.blind_decode_budget:
            raise ValueError("monitored candidates exceed the blind-decode budget")
        object.__setattr__(self, "candidates_per_al", counts)

    def monitored_candidates(self, al: int, ue: int, slot: int,
                             seed: int) -> tuple[int, ...]:
        """The starts this UE monitors for ``al`` in ``slot``; evenly spread
        from a hashed offset, the same for every DCI of the UE that slot."""
        starts = self.candidate_positions.get(al, ())
        if not starts:
            return ()
        k = min(self.candidates_per_al.get(al, 0), len(starts))
        if k == 0:
            return ()
        n = len(starts)
        y = mix64(seed, slot, ue, al) % n
        return tuple(starts[(y + (m * n) // k) % n] for m in range(k))


# -- allocation ----------------------------------------------------------------

class _RepackBudgetExceeded(Exception):
    pass


def _exact_pack(option_masks: list[list[int]], total_cces: int,
                budget: int) -> Optional[list[int]]:
    """Pick one mask per item with no overlaps, or None. Raises
    _RepackBudgetExceeded when the search exceeds ``budget`` nodes."""
    order = sorted(range(len(option_masks)), key=lambda i: len(option_masks[i]))
    # CCEs still needed by items from position i onward, for pruning
    needed_after = [0] * (len(order) + 1)
    for pos in range(len(order) - 1, -1, -1):
        first = option_masks[order[pos]][0]
        needed_after[pos] = needed_after[pos + 1] + first.bit_count()
    chosen: list[int] = [0] * len(option_masks)
    nodes = 0

    def descend(pos: int, occupied: int) -> bool:
        nonlocal nodes
        if pos == len(order):
            return True
        if needed_after[pos] > total_cces - occupied.bit_count():
            return False
        nodes += 1
        if nodes > budget:
            raise _RepackBudgetExceeded
        item = order[pos]
        for mask in option_masks[item]:
            if not occupied & mask:
                chosen[item] = mask
                if descend(pos + 1, occupied | mask):
                    return True
        return False

    return chosen if descend(0, 0) else None


@dataclass
class PlacedDci:
    dci: DciSpec
    start_cce: int

    @property
    def cce_range(self) -> range:
        return range(self.start_cce, self.start_cce + self.dci.aggregation_level)


@dataclass
class AllocationResult:
    placed: list[PlacedDci]
    blocked: list[DciSpec]

    @property
    def cces_used(self) -> int:
        return sum(p.dci.aggregation_level for p in self.placed)

    @property
    def cces_demanded(self) -> int:
        return self.cces_used + sum(d.aggregation_level for d in self.blocked)


class Allocator:
    """Greedy arrival-order CCE allocator for one slot.

    Each DCI takes its first free monitored candidate. When none is free, a
    bounded exact search tries to re-pack the already-placed DCIs (each
    within its own candidates) to make room; only if that fails is the DCI
    blocked. Arrival order therefore decides who blocks, while "blocked"
    coincides with genuine infeasibility for small search spaces.
    """

    def __init__(self, coreset: CoresetModel, seed: int = 0, slot: int = 0,
                 repack_budget: int = 400, repack_max_items: int = 10):
        self.coreset = coreset
        self.seed = seed
        self.slot = slot
        self.repack_budget = repack_budget
        self.repack_max_items = repack_max_items
        self._occupied = 0
        self._entries: list[tuple[PlacedDci, list[tuple[int, int]]]] = []

    def _candidates(self, dci: DciSpec) -> list[tuple[int, int]]:
        al = dci.aggregation_level
        starts = (dci.candidates if dci.candidates is not None
                  else self.coreset.monitored_candidates(
                      al, dci.owner_ue, self.slot, self.seed))
        return [(s, ((1 << al) - 1) << s) for s in starts]

    def try_place(self, dci: DciSpec) -> Optional[PlacedDci]:
        options = self._candidates(dci)
        for start, mask in options:
            if not self._occupied & mask:
                placed = PlacedDci(dci, start)
                self._occupied |= mask
                self._entries.append((placed, options))
                return placed
        return self._repack(dci, options)

    def _repack(self, dci: DciSpec, options: list[tuple[int, int]]) -> Optional[PlacedDci]:
        if not options or len(self._entries) >= self.repack_max_items:
            return None
        total_al = (sum(e.dci.aggregation_level for e, _ in self._entries)
                    + dci.aggregation_level)
        if total_al > self.coreset.total_cces:
            return None
        masks = [[m for _, m in opts] for _, opts in self._entries]
        masks.append([m for _, m in options])
        try:
            solution = _exact_pack(masks, self.coreset.total_cces,
                                   self.repack_budget)
        except _RepackBudgetExceeded:
            return None
        if solution is None:
            return None
        occupied = 0
        for (entry, opts), mask in zip(self._entries, solution):
            entry.start_cce = next(s for s, m in opts if m == mask)
            occupied |= mask
        start = next(s for s, m in options if m == solution[-1])
        placed = PlacedDci(dci, start)
        self._occupied = occupied | solution[-1]
        self._entries.append((placed, options))
        return placed

    @property
    def placed(self) -> list[PlacedDci]:
        return [e for e, _ in self._entries]


def allocate(dcis: Iterable[DciSpec], coreset: CoresetModel, seed: int = 0,
             slot: int = 0, repack_budget: int = 400) -> AllocationResult:
    """Place DCIs in arrival order; blocking is a result, not an error."""
    alloc = Allocator(coreset, seed=seed, slot=slot, repack_budget=repack_budget)
    blocked: list[DciSpec] = []
    for dci in dcis:
        if alloc.try_place(dci) is None:
            blocked.append(dci)
    return AllocationResult(placed=alloc.placed, blocked=blocked)


# -- Monte-Carlo experiments ----------------------------------------------------

SCHEDULING_MODES = ("single_cell", "multi_cell")


@dataclass(frozen=True)
class BlockingResult:
    blocking_rate: float
    mean_cces_used: float        # placed CCEs per trial, bounded by the coreset
    mean_cces_demanded: float    # requested CCEs per trial, incl. blocked DCIs
    dcis_per_trial: int
    trials: int


def blocking_experiment(n_ues: int, n_cells_per_ue: int, mode: str,
                        coreset: CoresetModel, trials: int, seed: int,
                        quality_range: tuple[float, float] = (0.1, 0.9),
                        ) -> BlockingResult:
    """Monte-Carlo blocking run for one scheduling mode.

    single_cell issues one 60-bit DCI per scheduled cell; multi_cell issues
    one joint DCI per UE. Channel qualities are drawn per (trial, UE) from
    ``quality_range`` and are identical across modes for the same seed, so
    mode comparisons are paired.
    """
    if mode not in SCHEDULING_MODES:
        raise ValueError(f"mode must be in {SCHEDULING_MODES}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if mode == "multi_cell":
        dci_payload_bits(n_cells_per_ue)   # raises PolarCapExceeded for N > 7

    lo, hi = quality_range
    qualities = generator(seed, 0xC0FFEE).uniform(lo, hi, size=(trials, n_ues))

    sc_bits = BASE_DCI_BITS
    mc_bits = dci_payload_bits(n_cells_per_ue)
    cell_names = tuple(f"cell{k}" for k in range(n_cells_per_ue))

    blocked_total = 0
    used_total = 0
    demanded_total = 0
    dcis_per_trial = n_ues * n_cells_per_ue if mode == "single_cell" else n_ues

    for trial in range(trials):
        alloc = Allocator(coreset, seed=seed, slot=trial)
        row = qualities[trial]
        for ue in range(n_ues):
            q = row[ue]
            if mode == "single_cell":
                al = select_aggregation_level(sc_bits, q)
                for k in range(n_cells_per_ue):
                    dci = DciSpec((cell_names[k],), sc_bits, al, ue)
                    demanded_total += al
                    if alloc.try_place(dci) is None:
                        blocked_total += 1
                    else:
                        used_total += al
            else:
                al = select_aggregation_level(mc_bits, q)
                dci = DciSpec(cell_names, mc_bits, al, ue)
                demanded_total += al
                if alloc.try_place(dci) is None:
                    blocked_total += 1
                else:
                    used_total += al

    return BlockingResult(
        blocking_rate=blocked_total / (dcis_per_trial * trials),
        mean_cces_used=used_total / trials,
        mean_cces_demanded=demanded_total / trials,
        dcis_per_trial=dcis_per_trial,
        trials=trials,
    )


@dataclass(frozen=True)
class BlockingLoad:
    """Load shape shared by every point of a gain sweep."""

    n_ues: int = 10
    quality_range: tuple[float, float] = (0.1, 0.9)


@dataclass(frozen=True)
class GainRow:
    n_cells: int
    blocking_sc: float
    blocking_mc: float
    cce_sc: float               # mean demanded CCEs, single-cell DCIs
    cce_mc: float               # mean demanded CCEs, one multi-cell DCI per UE

    @property
    def blocking_gain(self) -> float:
        return self.blocking_sc - self.blocking_mc

    @property
    def blocking_gain_rel(self) -> float:
        return self.blocking_gain / self.blocking_sc if self.blocking_sc else 0.0

    @property
    def cce_saving_gain(self) -> float:
        return 1.0 - self.cce_mc / self.cce_sc if self.cce_sc else 0.0

    def csv_row(self) -> str:
        return (f"{self.n_cells},{self.blocking_sc:.6f},{self.blocking_mc:.6f},"
                f"{self.blocking_gain:.6f},{self.cce_sc:.6f},{self.cce_mc:.6f},"
                f"{self.cce_saving_gain:.6f}")


GAIN_CSV_HEADER = ("n_cells,blocking_sc,blocking_mc,blocking_gain,"
                   "cce_sc,cce_mc,cce_saving_gain")


def gain_curves(load: BlockingLoad, coreset: CoresetModel,
                n_cells_range: Iterable[int], trials: int,
                seed: int) -> list[GainRow]:
    """Blocking and CCE-demand gains of multi-cell over per-cell DCIs.

    The CCE columns report demanded (not placed) CCEs so the saving is not
    clipped by the coreset size once single-cell demand saturates it.
    """
    rows: list[GainRow] = []
    for n in n_cells_range:
        if not 2 <= n <= 7:
            raise ValueError("multi-cell sweep covers N in [2, 7]")
        sc = blocking_experiment(load.n_ues, n, "single_cell", coreset,
                                 trials, seed, load.quality_range)
        mc = blocking_experiment(load.n_ues, n, "multi_cell", coreset,
                                 trials, seed, load.quality_range)
        rows.append(GainRow(
            n_cells=n,
            blocking_sc=sc.blocking_rate, blocking_mc=mc.blocking_rate,
            cce_sc=sc.mean_cces_demanded, cce_mc=mc.mean_cces_demanded,
        ))
    return rows
