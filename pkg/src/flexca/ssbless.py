"""Eligibility checks for operating an SCell without SSB transmission.

Mirrors the RAN4 activation requirements of TS 38.133 for SSB-less SCells:
received time difference against the reference cell within a bound, receive
power within a bound of the reference cell, and a complete QCL chain from
the SCell's reference signals through its TRS to an SSB of an active
serving cell. Inter-band targets are additionally gated on co-siting with
the reference; intra-band contiguous targets skip that gate.

All checks are pure functions of their inputs. Thresholds default to the
RAN4 values but are scenario-overridable.
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import PCellTarget

RTD_LIMIT_NS = 260.0
POWER_DELTA_LIMIT_DB = 6.0

QCL_TYPES = ("TypeA", "TypeC")


def ssb_signal(cell_id: str) -> str:
    """Canonical signal id of a cell's SSB, used as QCL chain terminus."""
    return f"ssb:{cell_id}"


def _ssb_owner(signal_id: str) -> Optional[str]:
    if signal_id.startswith("ssb:"):
        return signal_id[4:]
    return None


@dataclass(frozen=True)
class QclEdge:
    source: str
    target: str
    qcl_type: str

    def __post_init__(self):
        if self.qcl_type not in QCL_TYPES:
            raise ValueError(f"qcl_type must be in {QCL_TYPES}")


@dataclass(frozen=True)
class CellRadioObservation:
    """What the UE measures about the SCell considered for SSB-less operation.

    rtd_ns is the received time difference versus the reference cell.
    reference_signals and trs_signals inventory the SCell's own signals so a
    missing QCL edge is distinguishable from a missing signal.
    """

    cell_id: str
    rtd_ns: float
    rx_power_dbm: float
    co_site: bool
    qcl_edges: tuple[QclEdge, ...] = ()
    reference_signals: tuple[str, ...] = ("csirs0",)
    trs_signals: tuple[str, ...] = ("trs0",)

    def __post_init__(self):
        object.__setattr__(self, "qcl_edges", tuple(self.qcl_edges))
        object.__setattr__(self, "reference_signals",
                           tuple(self.reference_signals))
        object.__setattr__(self, "trs_signals", tuple(self.trs_signals))


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    margin: float = 0.0
    missing: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


def check_rtd(obs: CellRadioObservation,
              limit_ns: float = RTD_LIMIT_NS) -> CheckResult:
    """Timing check: |rtd| within the limit, boundary inclusive."""
    margin = limit_ns - abs(obs.rtd_ns)
    return CheckResult(passed=margin >= 0.0, margin=margin)


def check_power_delta(obs: CellRadioObservation, reference_power_dbm: float,
                      limit_db: float = POWER_DELTA_LIMIT_DB) -> CheckResult:
    """Power check: receive-power difference to the reference within the limit."""
    margin = limit_db - abs(obs.rx_power_dbm - reference_power_dbm)
    return CheckResult(passed=margin >= 0.0, margin=margin)


def check_qcl_chain(obs: CellRadioObservation,
                    active_cells_with_ssb: Iterable[str]) -> CheckResult:
    """QCL chain check with missing-link diagnosis.

    Every reference signal of the SCell needs a TypeA edge to one of the
    SCell's TRSs, and that TRS needs a TypeC edge to the SSB of a cell in
    ``active_cells_with_ssb``. ``missing`` reports "rs_to_trs" and/or
    "trs_to_ssb" when the chain breaks.
    """
    eligible = set(active_cells_with_ssb)
    trs_set = set(obs.trs_signals)

    type_a: dict[str, set[str]] = {}
    anchored_trs: set[str] = set()
    for edge in obs.qcl_edges:
        if edge.qcl_type == "TypeA" and edge.target in trs_set:
            type_a.setdefault(edge.source, set()).add(edge.target)
        elif edge.qcl_type == "TypeC" and edge.source in trs_set:
            owner = _ssb_owner(edge.target)
            if owner is not None and owner in eligible:
                anchored_trs.add(edge.source)

    missing: set[str] = set()
    for rs in obs.reference_signals:
        linked = type_a.get(rs, set())
        if not linked:
            missing.add("rs_to_trs")
        elif not (linked & anchored_trs):
            missing.add("trs_to_ssb")
    return CheckResult(passed=not missing, missing=tuple(sorted(missing)))


@dataclass(frozen=True)
class EligibilityContext:
    """Scenario-side inputs to the SSB-less decision."""

    target_role: str                       # "PCell" or "SCell"
    reference_power_dbm: float
    active_cells_with_ssb: frozenset[str]
    placement: str = "inter_band"          # or "intra_band_contiguous"
    rtd_limit_ns: float = RTD_LIMIT_NS
    power_delta_limit_db: float = POWER_DELTA_LIMIT_DB

    def __post_init__(self):
        object.__setattr__(self, "active_cells_with_ssb",
                           frozenset(self.active_cells_with_ssb))


@dataclass(frozen=True)
class EligibilityDecision:
    eligible: bool
    reasons: tuple[str, ...] = ()
    rtd_margin_ns: float = 0.0
    power_margin_db: float = 0.0

    def __bool__(self) -> bool:
        return self.eligible


def ssbless_eligibility(obs: CellRadioObservation,
                        ctx: EligibilityContext) -> EligibilityDecision:
    """Conjunction of the three RAN4 checks plus the co-site gate.

    The co-site gate applies to inter-band targets only; intra-band
    contiguous targets run the same three checks without it. The power
    criterion is applied uniformly (a conservative choice for co-site
    inter-band cells where it is usually slack).
    """
    if ctx.target_role == "PCell":
        raise PCellTarget(f"{obs.cell_id} is a PCell and always carries SSB")

    reasons: list[str] = []
    if ctx.placement == "inter_band" and not obs.co_site:
        reasons.append("co-site required")

    rtd = check_rtd(obs, ctx.rtd_limit_ns)
    if not rtd:
        reasons.append("rtd out of range")
    power = check_power_delta(obs, ctx.reference_power_dbm,
                              ctx.power_delta_limit_db)
    if not power:
        reasons.append("power delta out of range")
    qcl = check_qcl_chain(obs, ctx.active_cells_with_ssb)
    if not qcl:
        reasons.append("qcl chain incomplete: " + ",".join(qcl.missing))

    return EligibilityDecision(
        eligible=not reasons,
        reasons=tuple(reasons),
        rtd_margin_ns=rtd.margin,
        power_margin_db=power.margin,
    )
