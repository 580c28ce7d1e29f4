from dataclasses import replace

import pytest

from flexca.energy import PowerModel, SsbConfig, energy_of_trace, ssb_mask
from flexca.engine import LinkConfig, Scenario, World, run, validate_scenario
from flexca.errors import ScenarioInvalid
from flexca.lifecycle import ConfigPlan, Directive
from flexca.pdcch import CoresetModel
from flexca.spectrum import Band, Carrier, Catalog, ServingCell
from flexca.traffic import TrafficModel, generate_traffic
from flexca.txswitch import SwitchingConfig
from helpers import energy_scenario, txswitch_scenario, with_framework

import numpy as np


# -- traffic -------------------------------------------------------------------

def test_zero_rate_traffic_is_empty():
    tm = TrafficModel(arrival_rate_per_slot=0.0, n_ues=3)
    assert generate_traffic(tm, 100, 1).sum() == 0


def test_traffic_deterministic_and_independent_of_ue_count():
    tm5 = TrafficModel(arrival_rate_per_slot=0.01, n_ues=5)
    tm8 = TrafficModel(arrival_rate_per_slot=0.01, n_ues=8)
    a = generate_traffic(tm5, 500, 7)
    b = generate_traffic(tm5, 500, 7)
    c = generate_traffic(tm8, 500, 7)
    assert (a == b).all()
    assert (a == c[:5]).all()


def test_traffic_poisson_mean():
    # mean arrivals per UE across 100 seeds within 3 sigma of rate * horizon
    tm = TrafficModel(arrival_rate_per_slot=0.02, n_ues=2)
    h = 400
    expected = 0.02 * h
    totals = [generate_traffic(tm, h, seed).sum(axis=1).mean()
              for seed in range(100)]
    sigma_of_mean = np.sqrt(expected / (100 * tm.n_ues))
    assert abs(np.mean(totals) - expected) < 3 * sigma_of_mean


# -- single-carrier serving arithmetic -------------------------------------------

def simple_ul_scenario(rate=0.0, horizon=50, coreset=None, mc_dci=True):
    bands = [Band("fdd1", "FDD"), Band("fdd2", "FDD")]
    carriers = [
        Carrier("dl1", "fdd1", "DL", 700.0, 20.0, 15),
        Carrier("ul1", "fdd1", "UL", 690.0, 20.0, 15),
        Carrier("dl2", "fdd2", "DL", 2000.0, 20.0, 15),
        Carrier("ul2", "fdd2", "UL", 1900.0, 20.0, 15),
    ]
    catalog = Catalog.build(bands, carriers)
    plan = ConfigPlan(
        "setting2",
        (ServingCell("pcell", "PCell", dl_carrier="dl1", ul_carrier="ul1"),),
        (Directive("pcell", slot=0),))
    return Scenario(
        name="one-carrier",
        experiment="generic",
        catalog=catalog,
        plan=plan,
        traffic=TrafficModel(direction="ul", arrival_rate_per_slot=rate,
                             file_size_bits=4e5, n_ues=1),
        switching=SwitchingConfig(bands=("fdd1", "fdd2")),
        link=LinkConfig(se_distribution="fixed",
                        fixed_se={"ul1": 2.0, "ul2": 2.0}),
        coreset=coreset,
        horizon=horizon,
        mc_dci=mc_dci,
    )


def test_empty_traffic_serves_nothing_and_idles():
    scenario = simple_ul_scenario(rate=0.0, horizon=200)
    report = run(scenario, seed=0)
    assert report.served_bits == 0.0
    assert report.mean_upt_mbps == 0.0
    # energy equals the idle/sleep baseline of the power model, with the
    # PCell woken by its SSB bursts (tick = 1 ms on this all-15kHz layout)
    utils = [0.0] * 200
    mask = ssb_mask(scenario.ssb, "with_ssb", 200)
    expected = energy_of_trace(utils, mask, scenario.power, 1e-3)
    assert report.energy_joules == pytest.approx(expected.energy_joules)


def test_full_buffer_rate_arithmetic():
    # 20 MHz * SE 2.0 = 40 Mbit/s with both transmitters on the carrier
    scenario = simple_ul_scenario(rate=0.0, horizon=10)
    world = World(scenario, seed=0)
    ue = world.ues[0]
    ue.files.append(type(ue.files)().__class__)  # placeholder, replaced below
    ue.files.clear()
    from flexca.engine import _FileEntry
    ue.files.append(_FileEntry(1e9, 1e9, 0))
    ue.queue_bits = 1e9
    world.arrived_bits += 1e9
    world.run_to_end()
    report = world.metrics()
    assert report.served_bits == pytest.approx(40e6 * 1e-3 * 10, rel=1e-9)
    assert report.ru_per_cell["pcell"] == pytest.approx(0.5)  # UL half of DL+UL


def test_bit_conservation():
    scenario = simple_ul_scenario(rate=0.02, horizon=400)
    report = run(scenario, seed=3)
    assert report.arrived_bits == pytest.approx(
        report.served_bits + report.pending_bits)
    assert report.served_bits > 0


def test_file_completion_upt():
    # one 0.4 Mbit file at 40 Mbit/s completes in ceil(0.4/40 * 1000) = 10 ms
    scenario = simple_ul_scenario(rate=0.0, horizon=60)
    world = World(scenario, seed=0)
    from flexca.engine import _FileEntry
    world.ues[0].files.append(_FileEntry(4e5, 4e5, 0))
    world.ues[0].queue_bits = 4e5
    world.arrived_bits += 4e5
    world.run_to_end()
    report = world.metrics()
    assert report.completed_files == 1
    assert report.mean_upt_mbps == pytest.approx(4e5 / (10 * 1e-3) / 1e6)


def test_determinism_same_seed():
    scenario = txswitch_scenario(n_ues=3, horizon=400)
    a = run(scenario, seed=11)
    b = run(scenario, seed=11)
    assert a == b
    c = run(scenario, seed=12)
    assert c != a


def test_blocked_grant_defers_but_never_loses_bits():
    # files far smaller than per-tick capacity let several UEs share one
    # tick, and a 1-CCE coreset with 1 candidate then blocks the later ones;
    # blocked grants retry, so conservation must still hold
    coreset = CoresetModel(total_cces=1, candidates_per_al={1: 1})
    scenario = replace(simple_ul_scenario(horizon=300, coreset=coreset),
                       traffic=TrafficModel(direction="ul",
                                            arrival_rate_per_slot=0.15,
                                            file_size_bits=1.2e4, n_ues=4),
                       link=LinkConfig(se_distribution="fixed",
                                       fixed_se={"ul1": 2.0, "ul2": 2.0},
                                       control_quality_range=(0.6, 0.9)))
    report = run(scenario, seed=5)
    assert report.blocking_rate > 0
    assert report.arrived_bits == pytest.approx(
        report.served_bits + report.pending_bits)
    assert report.completed_files > 0


def test_invalid_scenario_raises_with_diagnostics():
    scenario = simple_ul_scenario()
    bad = replace(scenario, switching=None)    # ul traffic needs switching
    assert validate_scenario(bad)
    with pytest.raises(ScenarioInvalid):
        World(bad, seed=0)


def test_activation_directive_timing():
    scenario = simple_ul_scenario(rate=0.0, horizon=30)
    plan = ConfigPlan(
        "setting2",
        scenario.plan.configured_cells,
        (Directive("pcell", slot=10),))
    scenario = replace(scenario, plan=plan)
    world = World(scenario, seed=0)
    from flexca.engine import _FileEntry
    world.ues[0].files.append(_FileEntry(1e9, 1e9, 0))
    world.ues[0].queue_bits = 1e9
    world.arrived_bits += 1e9
    for _ in range(10):
        world.step()
    assert world.served_bits == 0.0         # cell not active yet
    world.run_to_end()
    assert world.served_bits > 0.0


# -- uplink switching orderings (smoke; the full sweep is acceptance) ------------

def test_framework_ordering_smoke():
    base = txswitch_scenario(n_ues=5, horizon=1500)
    for seed in (0, 1):
        f1 = run(with_framework(base, "F1_dynamic_all"), seed=seed)
        f2 = run(with_framework(base, "F2_indicated_pair"), seed=seed)
        bl = run(with_framework(base, "baseline"), seed=seed)
        assert f1.mean_upt_mbps >= f2.mean_upt_mbps >= bl.mean_upt_mbps
        assert f1.served_bits >= f2.served_bits - 1.0
        assert f2.served_bits >= bl.served_bits - 1.0


def test_extra_ul_carrier_never_hurts():
    """Greedy monotonicity: activating one more UL-only SCell cannot reduce
    the served bits of an identical run."""
    base = txswitch_scenario(n_ues=4, horizon=1200, arrival_rate=0.004)
    three_band_plan = ConfigPlan(
        "setting2",
        base.plan.configured_cells,
        tuple(d for d in base.plan.activation_directives
              if d.cell_id != "scell4"))
    smaller = replace(base, plan=three_band_plan)
    for seed in (0, 1, 2):
        with_four = run(base, seed=seed)
        with_three = run(smaller, seed=seed)
        assert with_four.served_bits >= with_three.served_bits - 1e-6


# -- downlink energy path ---------------------------------------------------------

def test_energy_scenario_runs_and_reports_scell_ru():
    scenario = energy_scenario(ssb_mode="with_ssb", arrival_rate=0.002,
                               horizon=4000)
    report = run(scenario, seed=0)
    assert 0.0 < report.ru_per_cell["scell"] < 1.0
    assert report.energy_per_cell["scell"] > 0


def test_ssbless_variant_uses_less_scell_energy_same_traffic():
    w = run(energy_scenario("with_ssb", horizon=6000), seed=4)
    l = run(energy_scenario("ssb_less", horizon=6000), seed=4)
    assert l.energy_per_cell["scell"] < w.energy_per_cell["scell"]
    assert l.mean_upt_mbps >= w.mean_upt_mbps
    # identical arrivals by construction
    assert l.arrived_bits == w.arrived_bits


def test_ru_definition_consistency():
    scenario = energy_scenario("with_ssb", arrival_rate=0.002, horizon=3000)
    world = World(scenario, seed=1)
    world.run_to_end()
    report = world.metrics()
    for cid in report.ru_per_cell:
        if world.ru_avail.get(cid):
            assert report.ru_per_cell[cid] == pytest.approx(
                world.ru_used[cid] / world.ru_avail[cid])
