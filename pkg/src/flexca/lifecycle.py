"""Cell configuration and activation lifecycle.

Two configuration settings are modeled. Setting 1 configures classic
(legacy-legal) cells only and gains flexibility at activation time: a
directive may expose just the DL or just the UL carrier of a cell that was
configured with both. Setting 2 configures flexibly associated cells up
front and activation never changes any cell's carrier association, so every
directive there is ``full``.

Activating a cell that exposes UL without DL requires an already-active
DL-bearing cell in the same timing-advance group; the TA of the UL-only
cell is maintained through that sibling. The activation emits an abstract
MAC-CE event followed by an SRS-or-PRACH event that the simulation engine
charges for.
"""

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .errors import (
    NoSchedulerAvailable,
    SettingViolation,
    TagConstraintViolation,
    UnknownCell,
)
from .spectrum import Catalog, ServingCell, validate_cell

SETTINGS = ("setting1", "setting2")
ACTIVATION_SHAPES = ("full", "dl_only_part", "ul_only_part")
DIRECTIVE_ACTIONS = ("activate", "deactivate")


@dataclass(frozen=True)
class Directive:
    """One scripted lifecycle step, applied at ``slot``."""

    cell_id: str
    action: str = "activate"
    shape: str = "full"
    slot: int = 0

    def __post_init__(self):
        if self.action not in DIRECTIVE_ACTIONS:
            raise ValueError(f"unknown action {self.action!r}")
        if self.shape not in ACTIVATION_SHAPES:
            raise ValueError(f"unknown activation shape {self.shape!r}")


@dataclass(frozen=True)
class TagGroup:
    tag_id: str
    member_cells: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "member_cells", frozenset(self.member_cells))
        if not self.member_cells:
            raise ValueError(f"TAG {self.tag_id} must have members")


@dataclass(frozen=True)
class ConfigPlan:
    setting: str
    configured_cells: tuple[ServingCell, ...]
    activation_directives: tuple[Directive, ...] = ()

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise ValueError(f"unknown setting {self.setting!r}")
        object.__setattr__(self, "configured_cells", tuple(self.configured_cells))
        object.__setattr__(self, "activation_directives",
                           tuple(self.activation_directives))
        known = {c.cell_id for c in self.configured_cells}
        for d in self.activation_directives:
            if d.cell_id not in known:
                raise UnknownCell(f"directive targets unconfigured cell {d.cell_id!r}")
        if self.setting == "setting2":
            for d in self.activation_directives:
                if d.action == "activate" and d.shape != "full":
                    raise SettingViolation(
                        "setting2 activation cannot change carrier association; "
                        f"directive for {d.cell_id} has shape {d.shape}")


@dataclass(frozen=True)
class ActivationEvent:
    """Abstract procedure step emitted during activation."""

    kind: str          # "mac_ce" or "srs_or_prach"
    cell_id: str
    slot: int


@dataclass
class CellRecord:
    cell: ServingCell
    state: str = "configured"
    exposure: str = "full"          # which configured part is activated

    @property
    def dl_carrier(self) -> Optional[str]:
        if self.exposure == "ul_only_part":
            return None
        return self.cell.dl_carrier

    @property
    def ul_carrier(self) -> Optional[str]:
        if self.exposure == "dl_only_part":
            return None
        return self.cell.ul_carrier

    @property
    def active(self) -> bool:
        return self.state == "activated"

    @property
    def exposes_dl(self) -> bool:
        return self.active and self.dl_carrier is not None

    @property
    def exposes_ul(self) -> bool:
        return self.active and self.ul_carrier is not None


class CellTable:
    """Mutable cell-state table driven by the single-threaded sim loop."""

    def __init__(self, setting: str, records: dict[str, CellRecord],
                 tags: Mapping[str, TagGroup]):
        self.setting = setting
        self.records = records
        self.tags = dict(tags)

    def __getitem__(self, cell_id: str) -> CellRecord:
        try:
            return self.records[cell_id]
        except KeyError:
            raise UnknownCell(f"cell {cell_id!r} was never configured") from None

    def cells(self) -> list[CellRecord]:
        return list(self.records.values())

    def active_cells(self) -> list[CellRecord]:
        return [r for r in self.records.values() if r.active]

    def snapshot(self) -> dict[str, tuple[str, str]]:
        return {cid: (r.state, r.exposure) for cid, r in self.records.items()}

    def tag_of(self, cell_id: str) -> frozenset[str]:
        tag_id = self[cell_id].cell.tag_id
        group = self.tags.get(tag_id)
        if group is not None:
            return group.member_cells
        # implicit TAG: all configured cells sharing the tag_id
        return frozenset(cid for cid, r in self.records.items()
                         if r.cell.tag_id == tag_id)


def apply_config(plan: ConfigPlan, catalog: Catalog) -> CellTable:
    """Configure the plan's cells, enforcing the chosen setting's rules.

    Setting 1 only admits cells that are legal in legacy mode; setting 2
    admits flexibly associated (enhanced) cells directly.
    """
    records: dict[str, CellRecord] = {}
    for cell in plan.configured_cells:
        report = validate_cell(cell, catalog)
        if not report.ok:
            raise SettingViolation(
                f"cell {cell.cell_id} invalid at configuration: {report}")
        if plan.setting == "setting1" and cell.mode != "legacy":
            raise SettingViolation(
                f"setting1 configures legacy cells only; {cell.cell_id} is "
                f"{cell.mode}")
        if cell.cell_id in records:
            raise SettingViolation(f"duplicate cell id {cell.cell_id}")
        records[cell.cell_id] = CellRecord(
            cell=replace(cell, state="configured"), state="configured")

    tag_ids = {rec.cell.tag_id for rec in records.values()}
    tags = {
        tag_id: TagGroup(tag_id, frozenset(
            cid for cid, rec in records.items() if rec.cell.tag_id == tag_id))
        for tag_id in tag_ids
    }
    return CellTable(plan.setting, records, tags)


def _tag_has_active_dl(table: CellTable, cell_id: str) -> bool:
    members = table.tag_of(cell_id)
    return any(
        table.records[m].exposes_dl
        for m in members if m != cell_id and m in table.records
    )


def activate(table: CellTable, directive: Directive,
             mac_ce_delay_slots: int = 0) -> list[ActivationEvent]:
    """Apply one lifecycle directive and return the emitted procedure events.

    A cell that would expose UL without DL may only be activated while some
    other cell of its TAG is active and exposes a DL carrier.
    """
    rec = table[directive.cell_id]

    if directive.action == "deactivate":
        if rec.state != "activated":
            raise UnknownCell(
                f"cell {directive.cell_id} is {rec.state}, cannot deactivate")
        rec.state = "deactivated"
        rec.exposure = "full"
        return []

    if rec.state == "activated":
        raise UnknownCell(f"cell {directive.cell_id} is already activated")

    if table.setting == "setting2" and directive.shape != "full":
        raise SettingViolation(
            "setting2 activation cannot change carrier association")

    shape = directive.shape
    if shape == "dl_only_part" and rec.cell.dl_carrier is None:
        raise SettingViolation(
            f"cell {directive.cell_id} has no DL carrier to expose")
    if shape == "ul_only_part" and rec.cell.ul_carrier is None:
        raise SettingViolation(
            f"cell {directive.cell_id} has no UL carrier to expose")

    exposes_dl = shape != "ul_only_part" and rec.cell.dl_carrier is not None
    exposes_ul = shape != "dl_only_part" and rec.cell.ul_carrier is not None

    events: list[ActivationEvent] = []
    ul_only = exposes_ul and not exposes_dl
    if ul_only and not _tag_has_active_dl(table, directive.cell_id):
        raise TagConstraintViolation(
            f"UL-only activation of {directive.cell_id} requires an active "
            f"DL-bearing cell in TAG {rec.cell.tag_id}")

    rec.state = "activated"
    rec.exposure = shape
    slot = directive.slot + mac_ce_delay_slots
    events.append(ActivationEvent("mac_ce", directive.cell_id, slot))
    if ul_only:
        # TA adjustment and early UL channel sounding on the new UL carrier
        events.append(ActivationEvent("srs_or_prach", directive.cell_id, slot))
    return events


def cross_carrier_links(table: CellTable) -> dict[str, str]:
    """Map every active cell to the active cell whose PDCCH schedules it.

    Cells exposing their own DL self-schedule. UL-only (and SSB-less) cells
    are assigned an active DL-bearing cell, preferring a TAG sibling, then
    the PCell, then the lowest cell id.
    """
    active = {cid: r for cid, r in table.records.items() if r.active}

    def dl_bearing(candidates: Iterable[str]) -> list[str]:
        out = [cid for cid in candidates if active[cid].exposes_dl]
        out.sort(key=lambda cid: (active[cid].cell.role != "PCell", cid))
        return out

    links: dict[str, str] = {}
    for cid, rec in sorted(active.items()):
        needs_host = not rec.exposes_dl or rec.cell.ssb_mode == "ssb_less"
        if not needs_host:
            links[cid] = cid
            continue
        if rec.exposes_dl and rec.cell.ssb_mode == "ssb_less":
            # SSB-less cell still has a DL carrier; it can carry its own DCI
            links[cid] = cid
            continue
        tag_members = [m for m in table.tag_of(cid) if m in active and m != cid]
        hosts = dl_bearing(tag_members) or dl_bearing(
            [c for c in active if c != cid])
        if not hosts:
            raise NoSchedulerAvailable(
                f"no active DL-bearing cell can schedule {cid}")
        links[cid] = hosts[0]
    return links
