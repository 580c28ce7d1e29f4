"""Spectrum object model: bands, carriers, serving cells, TDD slot patterns.

Carriers pair into serving cells either the classic way (DL and UL from the
same band) or flexibly (cross-band association, UL-only secondary cells).
``validate_cell`` encodes which pairings are legal for each cell mode, on top
of per-band regulatory restrictions such as UL-only spectrum. All types are
immutable after construction and safe to share between concurrent runs.
"""

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import InvalidCharacter, InvalidSplit, UnknownCarrier

SYMBOLS_PER_SLOT = 14

DUPLEX_MODES = ("FDD", "TDD")
RESTRICTIONS = ("none", "ul_only", "dl_only")
DIRECTIONS = ("DL", "UL", "bidirectional")
CELL_ROLES = ("PCell", "SCell")
CELL_MODES = ("legacy", "enhanced")
CELL_STATES = ("configured", "activated", "deactivated")
SSB_MODES = ("with_ssb", "ssb_less")
SCS_VALUES = (15, 30, 60)


def _require(value, allowed, what: str) -> None:
    if value not in allowed:
        raise ValueError(f"{what} must be one of {allowed}, got {value!r}")


@dataclass(frozen=True)
class SlotPattern:
    """TDD frame pattern over {D, S, U} with a symbol split for S slots.

    The split (dl, gap, ul) applies to every S slot and must cover exactly
    the 14 symbols of a slot.
    """

    slots: str
    special_split: tuple[int, int, int]

    def __post_init__(self):
        if not self.slots:
            raise InvalidCharacter("slot pattern must not be empty")
        bad = set(self.slots) - set("DSU")
        if bad:
            raise InvalidCharacter(
                f"slot pattern may only contain D, S, U; found {sorted(bad)}"
            )
        split = tuple(int(x) for x in self.special_split)
        object.__setattr__(self, "special_split", split)
        if any(x < 0 for x in split):
            raise InvalidSplit(f"split components must be non-negative: {split}")
        if sum(split) != SYMBOLS_PER_SLOT:
            raise InvalidSplit(
                f"split must sum to {SYMBOLS_PER_SLOT} symbols, got {split}"
            )

    def __len__(self) -> int:
        return len(self.slots)


def parse_slot_pattern(text: str, split: Iterable[int]) -> SlotPattern:
    """Build a SlotPattern from a 'DDDSUDDSUU'-style string plus an S split."""
    return SlotPattern(slots=text, special_split=tuple(split))


def render_slot_pattern(pattern: SlotPattern) -> tuple[str, tuple[int, int, int]]:
    """Inverse of parse_slot_pattern; parse(render(p)) == p."""
    return pattern.slots, pattern.special_split


def slot_direction(pattern: SlotPattern, slot_index: int) -> tuple[int, int, int]:
    """Symbol counts (dl, gap, ul) of the slot at ``slot_index`` mod length."""
    kind = pattern.slots[slot_index % len(pattern.slots)]
    if kind == "D":
        return (SYMBOLS_PER_SLOT, 0, 0)
    if kind == "U":
        return (0, 0, SYMBOLS_PER_SLOT)
    return pattern.special_split


@dataclass(frozen=True)
class Band:
    band_id: str
    duplex: str
    carrier_ids: tuple[str, ...] = ()
    regulatory_restriction: str = "none"

    def __post_init__(self):
        _require(self.duplex, DUPLEX_MODES, "duplex")
        _require(self.regulatory_restriction, RESTRICTIONS, "regulatory_restriction")
        object.__setattr__(self, "carrier_ids", tuple(self.carrier_ids))


@dataclass(frozen=True)
class Carrier:
    carrier_id: str
    band_id: str
    direction: str
    center_freq_mhz: float
    bandwidth_mhz: float
    scs_khz: int
    slot_pattern: Optional[SlotPattern] = None

    def __post_init__(self):
        _require(self.direction, DIRECTIONS, "direction")
        _require(self.scs_khz, SCS_VALUES, "scs_khz")
        if self.center_freq_mhz <= 0 or self.bandwidth_mhz <= 0:
            raise ValueError("carrier frequency and bandwidth must be positive")
        if (self.direction == "bidirectional") != (self.slot_pattern is not None):
            raise ValueError(
                f"carrier {self.carrier_id}: slot_pattern present iff bidirectional"
            )

    @property
    def slot_seconds(self) -> float:
        return 1e-3 / (self.scs_khz / 15)


@dataclass(frozen=True)
class ServingCell:
    cell_id: str
    role: str
    dl_carrier: Optional[str] = None
    ul_carrier: Optional[str] = None
    mode: str = "legacy"
    state: str = "configured"
    tag_id: str = "tag0"
    ssb_mode: str = "with_ssb"

    def __post_init__(self):
        _require(self.role, CELL_ROLES, "role")
        _require(self.mode, CELL_MODES, "mode")
        _require(self.state, CELL_STATES, "state")
        _require(self.ssb_mode, SSB_MODES, "ssb_mode")


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return "ok" if self.ok else "; ".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class Catalog:
    """Immutable lookup of bands and carriers keyed by id."""

    bands: Mapping[str, Band]
    carriers: Mapping[str, Carrier]

    @classmethod
    def build(cls, bands: Iterable[Band], carriers: Iterable[Carrier]) -> "Catalog":
        carrier_map = {c.carrier_id: c for c in carriers}
        band_map = {}
        for band in bands:
            ids = band.carrier_ids or tuple(
                cid for cid, c in carrier_map.items() if c.band_id == band.band_id
            )
            band_map[band.band_id] = Band(
                band_id=band.band_id,
                duplex=band.duplex,
                carrier_ids=ids,
                regulatory_restriction=band.regulatory_restriction,
            )
        return cls(bands=band_map, carriers=carrier_map)

    def band_of(self, carrier_id: str) -> Band:
        return self.bands[self.carrier(carrier_id).band_id]

    def carrier(self, carrier_id: str) -> Carrier:
        try:
            return self.carriers[carrier_id]
        except KeyError:
            raise UnknownCarrier(f"carrier {carrier_id!r} not in catalog") from None

    def validate(self) -> ValidationReport:
        """Check band-level invariants; carrier-local ones hold by construction."""
        out: list[Violation] = []
        for band in self.bands.values():
            members = [self.carriers[cid] for cid in band.carrier_ids
                       if cid in self.carriers]
            for cid in band.carrier_ids:
                if cid not in self.carriers:
                    out.append(Violation("band-dangling-carrier",
                                         f"band {band.band_id} lists unknown carrier {cid}"))
            for c in members:
                if c.band_id != band.band_id:
                    out.append(Violation("carrier-band-mismatch",
                                         f"carrier {c.carrier_id} owned by {c.band_id}, "
                                         f"listed under {band.band_id}"))
                if (c.direction == "bidirectional") != (band.duplex == "TDD"):
                    out.append(Violation("carrier-duplex-mismatch",
                                         f"carrier {c.carrier_id} direction {c.direction} "
                                         f"inside {band.duplex} band {band.band_id}"))
            if band.duplex == "FDD":
                if not any(c.direction == "DL" for c in members):
                    out.append(Violation("fdd-missing-dl",
                                         f"FDD band {band.band_id} has no DL carrier"))
                if not any(c.direction == "UL" for c in members):
                    out.append(Violation("fdd-missing-ul",
                                         f"FDD band {band.band_id} has no UL carrier"))
            else:
                if not any(c.direction == "bidirectional" for c in members):
                    out.append(Violation("tdd-missing-bidirectional",
                                         f"TDD band {band.band_id} has no bidirectional carrier"))
            if band.regulatory_restriction == "ul_only":
                for c in members:
                    if c.direction == "DL":
                        out.append(Violation("restricted-band-dl-carrier",
                                             f"UL-only band {band.band_id} contains DL "
                                             f"carrier {c.carrier_id}"))
            if band.regulatory_restriction == "dl_only":
                for c in members:
                    if c.direction == "UL":
                        out.append(Violation("restricted-band-ul-carrier",
                                             f"DL-only band {band.band_id} contains UL "
                                             f"carrier {c.carrier_id}"))
        return ValidationReport(tuple(out))


def dl_usable(carrier: Carrier, band: Band) -> bool:
    """Carrier may carry downlink, accounting for the band restriction."""
    return (carrier.direction in ("DL", "bidirectional")
            and band.regulatory_restriction != "ul_only")


def ul_usable(carrier: Carrier, band: Band) -> bool:
    return (carrier.direction in ("UL", "bidirectional")
            and band.regulatory_restriction != "dl_only")


def validate_cell(cell: ServingCell, catalog: Catalog) -> ValidationReport:
    """Report every rule the cell breaks; empty report means the cell is legal.

    Raises UnknownCarrier for dangling references; everything else is a
    violation entry, so callers can show the full list at once.
    """
    out: list[Violation] = []

    dl = catalog.carrier(cell.dl_carrier) if cell.dl_carrier else None
    ul = catalog.carrier(cell.ul_carrier) if cell.ul_carrier else None

    if dl is None and ul is None:
        out.append(Violation("no-carriers",
                             f"cell {cell.cell_id} has neither DL nor UL carrier"))
        return ValidationReport(tuple(out))

    if dl is not None:
        band = catalog.bands[dl.band_id]
        if dl.direction not in ("DL", "bidirectional"):
            out.append(Violation("dl-direction-mismatch",
                                 f"{dl.carrier_id} ({dl.direction}) used as DL carrier"))
        elif band.regulatory_restriction == "ul_only":
            out.append(Violation("dl-in-ul-only-band",
                                 f"{dl.carrier_id} in UL-only band {band.band_id} "
                                 f"used in DL direction"))
    if ul is not None:
        band = catalog.bands[ul.band_id]
        if ul.direction not in ("UL", "bidirectional"):
            out.append(Violation("ul-direction-mismatch",
                                 f"{ul.carrier_id} ({ul.direction}) used as UL carrier"))
        elif band.regulatory_restriction == "dl_only":
            out.append(Violation("ul-in-dl-only-band",
                                 f"{ul.carrier_id} in DL-only band {band.band_id} "
                                 f"used in UL direction"))

    if cell.mode == "legacy":
        if dl is None and ul is not None:
            out.append(Violation("legacy-ul-only",
                                 f"legacy cell {cell.cell_id} cannot be UL-only"))
        if dl is not None and ul is not None:
            if dl.band_id != ul.band_id:
                out.append(Violation("legacy-cross-band",
                                     f"legacy cell {cell.cell_id} pairs carriers from "
                                     f"{dl.band_id} and {ul.band_id}"))
            elif catalog.bands[dl.band_id].duplex == "TDD" and dl.carrier_id != ul.carrier_id:
                out.append(Violation("legacy-tdd-pair",
                                     f"legacy TDD cell {cell.cell_id} must use one "
                                     f"bidirectional carrier for both directions"))

    if cell.role == "PCell":
        if dl is None or ul is None:
            out.append(Violation("pcell-missing-carrier",
                                 f"PCell {cell.cell_id} needs both DL and UL carriers"))
        if cell.ssb_mode != "with_ssb":
            out.append(Violation("pcell-ssb-less",
                                 f"PCell {cell.cell_id} must transmit SSB"))

    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class AssociationMatrix:
    """Flexible DL/UL carrier association induced by a cell list."""

    forward: Mapping[str, frozenset[str]]   # DL carrier -> UL carriers
    inverse: Mapping[str, frozenset[str]]   # UL carrier -> DL carriers

    def partners_of_dl(self, carrier_id: str) -> frozenset[str]:
        return self.forward.get(carrier_id, frozenset())

    def partners_of_ul(self, carrier_id: str) -> frozenset[str]:
        return self.inverse.get(carrier_id, frozenset())


def association_matrix(cells: Iterable[ServingCell]) -> AssociationMatrix:
    fwd: dict[str, set[str]] = {}
    inv: dict[str, set[str]] = {}
    for cell in cells:
        if cell.dl_carrier is not None:
            fwd.setdefault(cell.dl_carrier, set())
        if cell.ul_carrier is not None:
            inv.setdefault(cell.ul_carrier, set())
        if cell.dl_carrier is not None and cell.ul_carrier is not None:
            fwd[cell.dl_carrier].add(cell.ul_carrier)
            inv[cell.ul_carrier].add(cell.dl_carrier)
    return AssociationMatrix(
        forward={k: frozenset(v) for k, v in fwd.items()},
        inverse={k: frozenset(v) for k, v in inv.items()},
    )
