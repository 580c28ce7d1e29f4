"""Experiment drivers built on the engine: calibrated sweeps for the three
headline studies (multi-cell scheduling gains, switching-framework UPT,
SSB-less energy saving) plus CSV row formatting for each."""

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from . import engine
from .engine import Scenario
from .errors import AxisMismatch, RuUnreachable, ScenarioInvalid
from .pdcch import GAIN_CSV_HEADER, BlockingLoad, CoresetModel, GainRow, gain_curves
from .spectrum import ServingCell
from .ssbless import CellRadioObservation, EligibilityContext, ssbless_eligibility
from .traffic import TrafficModel
from .txswitch import SwitchingConfig

FRAMEWORK_ORDER = ("baseline", "F2_indicated_pair", "F1_dynamic_all")


# -- switching framework comparison ------------------------------------------------

def scenario_with_framework(scenario: Scenario, framework: str) -> Scenario:
    """Clone the scenario onto a framework; 'baseline' freezes the first
    two configured bands under the indicated-pair framework."""
    if scenario.switching is None:
        raise ScenarioInvalid(["scenario has no switching config"])
    if framework == "baseline":
        switching = replace(scenario.switching,
                            framework="F2_indicated_pair",
                            frozen_pair=scenario.switching.bands[:2])
    elif framework in ("F1_dynamic_all", "F2_indicated_pair"):
        switching = replace(scenario.switching, framework=framework,
                            frozen_pair=None)
    else:
        raise AxisMismatch(f"unknown framework {framework!r}")
    return replace(scenario, switching=switching)


@dataclass(frozen=True)
class FrameworkRow:
    framework: str
    seed: int
    mean_upt_mbps: float
    served_bits: float
    blocking_rate: float

    def csv_row(self) -> str:
        return (f"{self.framework},{self.seed},{self.mean_upt_mbps:.6f},"
                f"{self.served_bits:.1f},{self.blocking_rate:.6f}")


FRAMEWORK_CSV_HEADER = "framework,seed,mean_upt_mbps,served_bits,blocking_rate"


def framework_sweep(scenario: Scenario, seeds: Sequence[int]
                    ) -> list[FrameworkRow]:
    rows = []
    for framework in FRAMEWORK_ORDER:
        variant = scenario_with_framework(scenario, framework)
        for seed in seeds:
            report = engine.run(variant, seed=seed)
            rows.append(FrameworkRow(framework, seed, report.mean_upt_mbps,
                                     report.served_bits, report.blocking_rate))
    return rows


# -- SSB-less energy saving ----------------------------------------------------------

@dataclass(frozen=True)
class EnergyGainResult:
    ru_target: float
    ru_achieved: float
    calibrated_rate: float
    energy_withssb: float          # target-SCell energy, joules
    energy_ssbless: float
    gain: float                    # SCell-only saving (primary figure)
    network_gain: float            # whole-network variant
    mean_upt_withssb: float
    mean_upt_ssbless: float

    @property
    def upt_delta(self) -> float:
        if self.mean_upt_withssb == 0.0:
            return 0.0
        return (self.mean_upt_ssbless - self.mean_upt_withssb) / self.mean_upt_withssb

    def csv_row(self) -> str:
        return (f"{self.ru_achieved:.6f},{self.energy_withssb:.6f},"
                f"{self.energy_ssbless:.6f},{self.gain:.6f},"
                f"{self.mean_upt_withssb:.6f},{self.mean_upt_ssbless:.6f}")


RU_CSV_HEADER = ("ru_achieved,energy_withssb,energy_ssbless,gain,"
                 "mean_upt_withssb,mean_upt_ssbless")


def _energy_target_cell(scenario: Scenario) -> str:
    explicit = scenario.params.get("energy_target_cell")
    if explicit:
        return str(explicit)
    if scenario.traffic.serving_cells:
        return scenario.traffic.serving_cells[0]
    candidates = [c.cell_id for c in scenario.plan.configured_cells
                  if c.role == "SCell" and c.dl_carrier is not None]
    if len(candidates) != 1:
        raise ScenarioInvalid(
            ["cannot infer the energy target SCell; set params.energy_target_cell"])
    return candidates[0]


def _with_ssb_mode(scenario: Scenario, cell_id: str, ssb_mode: str) -> Scenario:
    cells = tuple(
        replace(c, ssb_mode=ssb_mode) if c.cell_id == cell_id else c
        for c in scenario.plan.configured_cells)
    return replace(scenario, plan=replace(scenario.plan, configured_cells=cells))


def check_ssbless_feasibility(scenario: Scenario) -> Optional[dict]:
    """Scenario-supplied radio observation gates the SSB-less variant."""
    node = scenario.params.get("ssbless_check")
    if not node:
        return None
    target = _energy_target_cell(scenario)
    obs = CellRadioObservation(
        cell_id=target,
        rtd_ns=float(node.get("rtd_ns", 0.0)),
        rx_power_dbm=float(node.get("rx_power_dbm", -80.0)),
        co_site=bool(node.get("co_site", True)),
    )
    ctx = EligibilityContext(
        target_role="SCell",
        reference_power_dbm=float(node.get("reference_power_dbm", -80.0)),
        active_cells_with_ssb=frozenset(
            c.cell_id for c in scenario.plan.configured_cells
            if c.ssb_mode == "with_ssb" and c.cell_id != target),
        placement=node.get("placement", "inter_band"),
    )
    decision = ssbless_eligibility(obs, ctx)
    if not decision.eligible:
        raise ScenarioInvalid(
            [f"SSB-less operation ineligible for {target}: {r}"
             for r in decision.reasons])
    return {
        "cell": target,
        "rtd_margin_ns": decision.rtd_margin_ns,
        "power_margin_db": decision.power_margin_db,
    }


def _run_pair(scenario: Scenario, cell_id: str, rate: float, seed: int):
    base = replace(scenario,
                   traffic=replace(scenario.traffic, arrival_rate_per_slot=rate))
    with_ssb = engine.run(_with_ssb_mode(base, cell_id, "with_ssb"), seed=seed)
    ssb_less = engine.run(_with_ssb_mode(base, cell_id, "ssb_less"), seed=seed)
    return with_ssb, ssb_less


def energy_saving_gain(scenario: Scenario, ru_target: float, seed: int,
                       tolerance: float = 0.01,
                       max_iterations: int = 40) -> EnergyGainResult:
    """Energy saving of the SSB-less SCell at a calibrated utilization.

    Bisects the file arrival rate until the with-SSB run's SCell resource
    utilization lands within ``tolerance`` (absolute) of ``ru_target``,
    then compares the two variants on the identical traffic trace.
    """
    if not 0.0 < ru_target < 1.0:
        raise RuUnreachable(f"ru target {ru_target} outside (0, 1)")
    check_ssbless_feasibility(scenario)
    cell_id = _energy_target_cell(scenario)

    def achieved_ru(rate: float) -> float:
        variant = _with_ssb_mode(
            replace(scenario,
                    traffic=replace(scenario.traffic,
                                    arrival_rate_per_slot=rate)),
            cell_id, "with_ssb")
        return engine.run(variant, seed=seed).ru_per_cell.get(cell_id, 0.0)

    lo, hi = 0.0, max(scenario.traffic.arrival_rate_per_slot, 1e-4)
    ru_hi = achieved_ru(hi)
    doublings = 0
    while ru_hi < ru_target and doublings < 12:
        hi *= 2.0
        ru_hi = achieved_ru(hi)
        doublings += 1
    if ru_hi < ru_target:
        raise RuUnreachable(
            f"utilization saturates at {ru_hi:.3f} below target {ru_target}")

    rate, ru = hi, ru_hi
    for _ in range(max_iterations):
        if abs(ru - ru_target) <= tolerance:
            break
        mid = (lo + hi) / 2.0
        ru_mid = achieved_ru(mid)
        if ru_mid < ru_target:
            lo = mid
        else:
            hi = mid
        rate, ru = mid, ru_mid
    if abs(ru - ru_target) > tolerance:
        raise RuUnreachable(
            f"calibration did not converge: ru {ru:.4f} vs target {ru_target}")

    with_ssb, ssb_less = _run_pair(scenario, cell_id, rate, seed)
    e_with = with_ssb.energy_per_cell[cell_id]
    e_less = ssb_less.energy_per_cell[cell_id]
    return EnergyGainResult(
        ru_target=ru_target,
        ru_achieved=with_ssb.ru_per_cell[cell_id],
        calibrated_rate=rate,
        energy_withssb=e_with,
        energy_ssbless=e_less,
        gain=1.0 - e_less / e_with,
        network_gain=1.0 - ssb_less.energy_joules / with_ssb.energy_joules,
        mean_upt_withssb=with_ssb.mean_upt_mbps,
        mean_upt_ssbless=ssb_less.mean_upt_mbps,
    )


def ru_sweep(scenario: Scenario, targets: Iterable[float],
             seed: int) -> list[EnergyGainResult]:
    return [energy_saving_gain(scenario, target, seed) for target in targets]


# -- PDCCH blocking sweep --------------------------------------------------------------

def blocking_sweep(scenario: Scenario, seed: int) -> list[GainRow]:
    """Multi-cell scheduling gain rows from the scenario's parameters."""
    params = scenario.params
    if scenario.coreset is None:
        raise ScenarioInvalid(["pdcch experiment needs a coreset"])
    load = BlockingLoad(
        n_ues=int(params.get("n_ues", scenario.traffic.n_ues)),
        quality_range=tuple(params.get("quality_range", (0.1, 0.9))),
    )
    n_range = params.get("n_cells_range", [2, 7])
    trials = int(params.get("trials", 10000))
    return gain_curves(load, scenario.coreset,
                       range(int(n_range[0]), int(n_range[1]) + 1),
                       trials, seed)
