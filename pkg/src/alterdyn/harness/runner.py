"""Run detector suites on a system and its altered variants."""

from __future__ import annotations

import datetime
import hashlib
import json
import platform
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..detectors import check_proximal, run_detector
from ..family import FamilySchedule
from .config import (
    SCHEMA_VERSION,
    DetectorSpec,
    ScenarioConfig,
    params_from_dict,
    point_pair,
)


def schedule_hash(F: FamilySchedule) -> str:
    blob = json.dumps(F.describe(), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def run_spec(spec: DetectorSpec, F: FamilySchedule) -> dict:
    """One verdict as a JSON-ready dict; detector failures become ERROR entries."""
    try:
        params = params_from_dict(spec.params, F.space)
        if spec.property == "proximal":
            x, y = point_pair(spec, F.space)
            verdict = check_proximal(F, x, y, params)
        else:
            verdict = run_detector(spec.property, F, params)
        return verdict.to_dict()
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        return {"property": spec.key, "status": "ERROR", "error": f"{type(exc).__name__}: {exc}"}


@dataclass
class SystemResult:
    label: str
    schedule: FamilySchedule
    verdicts: dict  # detector key -> verdict dict

    def status(self, key: str) -> str:
        return self.verdicts[key]["status"]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "schedule": self.schedule.describe(),
            "schedule_sha256": schedule_hash(self.schedule),
            "verdicts": self.verdicts,
        }


@dataclass
class ComparisonReport:
    systems: list
    agreement: dict
    provenance: dict
    checks: list = field(default_factory=list)

    def system(self, label: str) -> SystemResult:
        for s in self.systems:
            if s.label == label:
                return s
        raise KeyError(label)

    @property
    def passed(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "systems": [s.to_dict() for s in self.systems],
            "agreement": self.agreement,
            "provenance": self.provenance,
        }
        if self.checks:
            d["checks"] = self.checks
            d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())


def _agreement(systems: list, keys: list) -> dict:
    out = {}
    for key in keys:
        row = {}
        for i, a in enumerate(systems):
            for b in systems[i + 1 :]:
                sa, sb = a.verdicts[key], b.verdicts[key]
                same = sa["status"] == sb["status"] != "ERROR"
                row[f"{a.label} | {b.label}"] = "agree" if same else "disagree"
        out[key] = row
    return out


def provenance(config: dict, systems: list, timestamp: str = None) -> dict:
    return {
        "package": {"name": "alterdyn", "version": __version__},
        "numpy": np.__version__,
        "python": platform.python_version(),
        "config": config,
        "schedules": {s.label: schedule_hash(s.schedule) for s in systems},
        "timestamp": timestamp or datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }


def compare_systems(variants: list, detectors: list, config: dict = None, timestamp: str = None) -> ComparisonReport:
    """Run every detector on every ``(label, schedule)`` and build the agreement matrix."""
    systems = [SystemResult(label, F, {d.key: run_spec(d, F) for d in detectors}) for label, F in variants]
    keys = [d.key for d in detectors]
    return ComparisonReport(systems, _agreement(systems, keys), provenance(config or {}, systems, timestamp))


def scenario_variants(cfg: ScenarioConfig) -> list:
    """The base system followed by each cumulative transformation."""
    out = [("base", cfg.schedule)]
    F, labels = cfg.schedule, []
    for t in cfg.transformations:
        F = t.apply(F)
        labels.append(t.label)
        out.append((" then ".join(labels), F))
    return out


def run_scenario(cfg: ScenarioConfig, timestamp: str = None) -> ComparisonReport:
    return compare_systems(scenario_variants(cfg), cfg.detectors, cfg.to_dict(), timestamp)
