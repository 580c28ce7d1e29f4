"""Scenario files: YAML serialization of a complete simulation setup.

The schema mirrors the dataclasses one to one (field names match), so a
scenario round-trips losslessly through load and render. The repository
ships example scenarios under ``scenarios/``; the README documents every
field.
"""

from dataclasses import asdict
from pathlib import Path
from typing import Union

import yaml

from .energy import PowerModel, SsbConfig
from .engine import LinkConfig, Scenario
from .errors import ParseError
from .lifecycle import ConfigPlan, Directive
from .pdcch import CoresetModel
from .spectrum import Band, Carrier, Catalog, ServingCell, SlotPattern
from .traffic import TrafficModel
from .txswitch import SwitchingConfig


def _slot_pattern(node) -> SlotPattern:
    return SlotPattern(node["slots"], tuple(node["special_split"]))


def _carrier(node) -> Carrier:
    pattern = node.get("slot_pattern")
    return Carrier(
        carrier_id=node["carrier_id"],
        band_id=node["band_id"],
        direction=node["direction"],
        center_freq_mhz=float(node["center_freq_mhz"]),
        bandwidth_mhz=float(node["bandwidth_mhz"]),
        scs_khz=int(node["scs_khz"]),
        slot_pattern=_slot_pattern(pattern) if pattern else None,
    )


def _cell(node) -> ServingCell:
    return ServingCell(
        cell_id=node["cell_id"],
        role=node["role"],
        dl_carrier=node.get("dl_carrier"),
        ul_carrier=node.get("ul_carrier"),
        mode=node.get("mode", "legacy"),
        tag_id=node.get("tag_id", "tag0"),
        ssb_mode=node.get("ssb_mode", "with_ssb"),
    )


def from_dict(doc: dict) -> Scenario:
    """Build a Scenario from parsed YAML; raises ParseError on bad shape."""
    try:
        catalog = Catalog.build(
            [Band(b["band_id"], b["duplex"],
                  regulatory_restriction=b.get("regulatory_restriction", "none"))
             for b in doc.get("bands", [])],
            [_carrier(c) for c in doc.get("carriers", [])],
        )
        plan_node = doc.get("config_plan", {})
        plan = ConfigPlan(
            setting=plan_node.get("setting", "setting2"),
            configured_cells=tuple(_cell(c) for c in doc.get("cells", [])),
            activation_directives=tuple(
                Directive(cell_id=d["cell_id"],
                          action=d.get("action", "activate"),
                          shape=d.get("shape", "full"),
                          slot=int(d.get("slot", 0)))
                for d in plan_node.get("directives", [])),
        )
        tr = doc.get("traffic", {})
        traffic = TrafficModel(
            direction=tr.get("direction", "ul"),
            arrival_rate_per_slot=float(tr.get("arrival_rate_per_slot", 0.0)),
            file_size_bits=float(tr.get("file_size_bits", 1e6)),
            n_ues=int(tr.get("n_ues", 1)),
            serving_cells=tuple(tr.get("serving_cells", ())),
        )
        power = PowerModel(**doc["power"]) if "power" in doc else PowerModel()
        ssb = SsbConfig(**doc["ssb"]) if "ssb" in doc else SsbConfig()

        switching = None
        if doc.get("switching"):
            node = dict(doc["switching"])
            gaps = {}
            for key, value in (node.pop("switch_gap_us", {}) or {}).items():
                a, b = str(key).split(",")
                gaps[(a.strip(), b.strip())] = float(value)
            frozen = node.pop("frozen_pair", None)
            switching = SwitchingConfig(
                bands=tuple(node.pop("bands")),
                switch_gap_us=gaps,
                frozen_pair=tuple(frozen) if frozen else None,
                **node,
            )

        coreset = None
        if doc.get("coreset"):
            node = dict(doc["coreset"])
            per_al = {int(k): int(v)
                      for k, v in (node.pop("candidates_per_al", {}) or {}).items()}
            coreset = CoresetModel(
                total_cces=int(node.pop("total_cces")),
                candidates_per_al=per_al or dict(
                    CoresetModel(total_cces=1).candidates_per_al),
                **node,
            )

        link = LinkConfig()
        if doc.get("link"):
            node = dict(doc["link"])
            if "control_quality_range" in node:
                node["control_quality_range"] = tuple(
                    node["control_quality_range"])
            link = LinkConfig(**node)

        return Scenario(
            name=doc.get("name", "unnamed"),
            experiment=doc.get("experiment", "generic"),
            catalog=catalog,
            plan=plan,
            traffic=traffic,
            power=power,
            ssb=ssb,
            switching=switching,
            coreset=coreset,
            link=link,
            horizon=int(doc.get("horizon", 2000)),
            seed=int(doc.get("seed", 0)),
            mc_dci=bool(doc.get("mc_dci", True)),
            params=doc.get("params", {}) or {},
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"scenario document malformed: {exc}") from exc


def load(path: Union[str, Path]) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path} does not contain a scenario mapping")
    return from_dict(doc)


def to_dict(s: Scenario) -> dict:
    doc = {
        "name": s.name,
        "experiment": s.experiment,
        "seed": s.seed,
        "horizon": s.horizon,
        "mc_dci": s.mc_dci,
        "bands": [
            {"band_id": b.band_id, "duplex": b.duplex,
             "regulatory_restriction": b.regulatory_restriction}
            for b in sorted(s.catalog.bands.values(), key=lambda b: b.band_id)
        ],
        "carriers": [],
        "cells": [],
        "config_plan": {
            "setting": s.plan.setting,
            "directives": [
                {"slot": d.slot, "cell_id": d.cell_id, "action": d.action,
                 "shape": d.shape}
                for d in s.plan.activation_directives
            ],
        },
        "traffic": {
            "direction": s.traffic.direction,
            "arrival_rate_per_slot": s.traffic.arrival_rate_per_slot,
            "file_size_bits": s.traffic.file_size_bits,
            "n_ues": s.traffic.n_ues,
            "serving_cells": list(s.traffic.serving_cells),
        },
        "power": asdict(s.power),
        "ssb": asdict(s.ssb),
        "link": {
            "se_distribution": s.link.se_distribution,
            "se_min": s.link.se_min,
            "se_max": s.link.se_max,
            "fixed_se": dict(s.link.fixed_se),
            "control_quality_range": list(s.link.control_quality_range),
        },
        "params": dict(s.params),
    }
    for c in sorted(s.catalog.carriers.values(), key=lambda c: c.carrier_id):
        node = {
            "carrier_id": c.carrier_id, "band_id": c.band_id,
            "direction": c.direction, "center_freq_mhz": c.center_freq_mhz,
            "bandwidth_mhz": c.bandwidth_mhz, "scs_khz": c.scs_khz,
        }
        if c.slot_pattern is not None:
            node["slot_pattern"] = {
                "slots": c.slot_pattern.slots,
                "special_split": list(c.slot_pattern.special_split),
            }
        doc["carriers"].append(node)
    for cell in s.plan.configured_cells:
        doc["cells"].append({
            "cell_id": cell.cell_id, "role": cell.role,
            "dl_carrier": cell.dl_carrier, "ul_carrier": cell.ul_carrier,
            "mode": cell.mode, "tag_id": cell.tag_id,
            "ssb_mode": cell.ssb_mode,
        })
    if s.switching is not None:
        doc["switching"] = {
            "bands": list(s.switching.bands),
            "framework": s.switching.framework,
            "ul_mode": s.switching.ul_mode,
            "switch_gap_us": {f"{a},{b}": v for (a, b), v
                              in sorted(s.switching.switch_gap_us.items())},
            "default_gap_us": s.switching.default_gap_us,
            "indication_latency_slots": s.switching.indication_latency_slots,
            "reindication_margin": s.switching.reindication_margin,
            "reindication_window_slots": s.switching.reindication_window_slots,
            "reindication_period_slots": s.switching.reindication_period_slots,
            "preview_slots": s.switching.preview_slots,
            "frozen_pair": (list(s.switching.frozen_pair)
                            if s.switching.frozen_pair else None),
        }
    if s.coreset is not None:
        doc["coreset"] = {
            "total_cces": s.coreset.total_cces,
            "candidates_per_al": dict(sorted(s.coreset.candidates_per_al.items())),
            "blind_decode_budget": s.coreset.blind_decode_budget,
        }
    return doc


def render(s: Scenario) -> str:
    return yaml.safe_dump(to_dict(s), sort_keys=False, default_flow_style=False)
