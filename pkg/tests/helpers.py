"""Programmatic scenario builders shared across test modules."""

from dataclasses import replace

from flexca.energy import PowerModel, SsbConfig
from flexca.engine import LinkConfig, Scenario
from flexca.lifecycle import ConfigPlan, Directive
from flexca.pdcch import CoresetModel
from flexca.spectrum import Band, Carrier, Catalog, ServingCell, SlotPattern
from flexca.traffic import TrafficModel
from flexca.txswitch import SwitchingConfig


def four_band_catalog() -> Catalog:
    """The 4-band uplink switching layout: two wide TDD bands with staggered
    UL slots plus two narrow always-on FDD bands."""
    bands = [
        Band("band1", "TDD"),
        Band("band2", "TDD"),
        Band("band3", "FDD"),
        Band("band4", "FDD"),
    ]
    carriers = [
        Carrier("b1_tdd", "band1", "bidirectional", 4000.0, 100.0, 30,
                slot_pattern=SlotPattern("DDDSUDDSUU", (10, 2, 2))),
        Carrier("b2_tdd", "band2", "bidirectional", 2600.0, 100.0, 30,
                slot_pattern=SlotPattern("DDDDDDDSUU", (6, 4, 4))),
        Carrier("b3_dl", "band3", "DL", 700.0, 20.0, 15),
        Carrier("b3_ul", "band3", "UL", 690.0, 20.0, 15),
        Carrier("b4_dl", "band4", "DL", 2000.0, 20.0, 15),
        Carrier("b4_ul", "band4", "UL", 1900.0, 20.0, 15),
    ]
    return Catalog.build(bands, carriers)


def four_band_plan() -> ConfigPlan:
    cells = (
        ServingCell("pcell", "PCell", dl_carrier="b1_tdd", ul_carrier="b1_tdd"),
        ServingCell("scell2", "SCell", dl_carrier="b2_tdd", ul_carrier="b2_tdd"),
        ServingCell("scell3", "SCell", ul_carrier="b3_ul", mode="enhanced"),
        ServingCell("scell4", "SCell", ul_carrier="b4_ul", mode="enhanced"),
    )
    directives = (
        Directive("pcell", slot=0),
        Directive("scell2", slot=0),
        Directive("scell3", slot=0),
        Directive("scell4", slot=0),
    )
    return ConfigPlan("setting2", cells, directives)


def txswitch_scenario(n_ues: int = 5, framework: str = "F1_dynamic_all",
                      frozen_pair=None, horizon: int = 4000,
                      arrival_rate: float = 0.003, seed: int = 0) -> Scenario:
    switching = SwitchingConfig(
        bands=("band1", "band2", "band3", "band4"),
        framework=framework,
        ul_mode="dualUL",
        indication_latency_slots=2,
        reindication_margin=0.04,
        reindication_period_slots=4,
        frozen_pair=frozen_pair,
    )
    return Scenario(
        name="ul-txswitch-4band",
        experiment="txswitch_upt",
        catalog=four_band_catalog(),
        plan=four_band_plan(),
        traffic=TrafficModel(direction="ul", arrival_rate_per_slot=arrival_rate,
                             file_size_bits=5e5, n_ues=n_ues),
        switching=switching,
        coreset=CoresetModel(total_cces=54),
        link=LinkConfig(se_min=1.5, se_max=4.5),
        horizon=horizon,
        seed=seed,
    )


def energy_catalog() -> Catalog:
    bands = [Band("bandA", "FDD"), Band("bandB", "FDD")]
    carriers = [
        Carrier("a_dl", "bandA", "DL", 2100.0, 20.0, 30),
        Carrier("a_ul", "bandA", "UL", 1900.0, 20.0, 30),
        Carrier("b_dl", "bandB", "DL", 2600.0, 20.0, 30),
        Carrier("b_ul", "bandB", "UL", 2500.0, 20.0, 30),
    ]
    return Catalog.build(bands, carriers)


def energy_scenario(ssb_mode: str = "with_ssb", arrival_rate: float = 0.001,
                    n_ues: int = 5, horizon: int = 10000,
                    seed: int = 0) -> Scenario:
    """DL traffic served by one SCell whose SSB transmission is toggled."""
    cells = (
        ServingCell("pcell", "PCell", dl_carrier="a_dl", ul_carrier="a_ul"),
        ServingCell("scell", "SCell", dl_carrier="b_dl", mode="enhanced",
                    ssb_mode=ssb_mode),
    )
    plan = ConfigPlan("setting2", cells,
                      (Directive("pcell", slot=0), Directive("scell", slot=0)))
    return Scenario(
        name="scell-energy",
        experiment="scell_energy",
        catalog=energy_catalog(),
        plan=plan,
        traffic=TrafficModel(direction="dl", arrival_rate_per_slot=arrival_rate,
                             file_size_bits=1e6, n_ues=n_ues,
                             serving_cells=("scell",)),
        power=PowerModel(light_sleep_entry_slots=2,
                         deep_sleep_entry_slots=2000),
        ssb=SsbConfig(periodicity_slots=20, ssb_slots_per_burst=2),
        link=LinkConfig(se_distribution="fixed", fixed_se={"b_dl": 3.0}),
        horizon=horizon,
        seed=seed,
        params={"ru_grid": [0.05, 0.10, 0.20, 0.375],
                "ssbless_check": {"rtd_ns": 120.0, "rx_power_dbm": -79.0,
                                  "reference_power_dbm": -81.0,
                                  "co_site": True}},
    )


def with_framework(scenario: Scenario, framework: str) -> Scenario:
    """Clone a switching scenario onto another framework / the baseline."""
    if framework == "baseline":
        switching = replace(scenario.switching,
                            framework="F2_indicated_pair",
                            frozen_pair=scenario.switching.bands[:2])
    else:
        switching = replace(scenario.switching, framework=framework,
                            frozen_pair=None)
    return replace(scenario, switching=switching)
