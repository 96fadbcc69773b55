"""Scenario configuration: JSON in, validated objects out.

Schema (``schema_version`` 1)::

    {
      "schema_version": 1,
      "system": "sens" | {schedule description},
      "transformations": [
        {"op": "truncate", "k": 1},
        {"op": "insert", "r": 3, "map": {...}},
        {"op": "delete", "k": 2},
        {"op": "rearrange", "perm": [2, 1]},
        {"op": "block_rearrange"}
      ],
      "detectors": [
        {"property": "transitivity", "params": {"epsilon": "1/16", "horizon": 64}},
        {"property": "proximal", "pair": ["0", "1"]}
      ],
      "output": "report.json"
    }

Schedule descriptions are what ``FamilySchedule.describe()`` produces, or the
shorthand ``{"fixture": "tent_autonomous"}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..detectors import SET_DETECTORS, DetectorParams
from ..family import (
    AlteredSchedule,
    EventuallyPeriodic,
    FamilySchedule,
    block_rearrange,
    delete_map,
    insert_map,
    rearrange_finite,
    shift_block_family,
    truncate,
)
from ..fixtures import REGISTRY, get_fixture
from ..maps import MapConstructionError, map_from_dict, parse_number
from ..spaces import Point, SpaceKind, ShiftWord, space_from_spec

SCHEMA_VERSION = 1
PROPERTIES = tuple(SET_DETECTORS) + ("proximal",)


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# --------------------------------------------------------------------------
# schedules


def _map(d, space, where):
    if isinstance(d, str):
        d = {"kind": d}
    d = dict(d)
    if space.kind is SpaceKind.SHIFT:
        d.setdefault("window", space.window)
    elif d.get("kind") in ("identity", "piecewise"):
        d.setdefault("space", space.kind.value)
    try:
        f = map_from_dict(d, window=space.window or 8)
    except (MapConstructionError, KeyError, ValueError, TypeError) as exc:
        raise ConfigError(where, f"bad map description: {exc}") from None
    if f.space != space:
        raise ConfigError(where, f"map acts on {f.space}, schedule lives on {space}")
    return f


def schedule_from_dict(d, where: str = "system") -> FamilySchedule:
    if isinstance(d, str):
        try:
            return get_fixture(d).schedule
        except KeyError as exc:
            raise ConfigError(where, str(exc)) from None
    if not isinstance(d, dict):
        raise ConfigError(where, "expected a fixture name or a schedule object")
    if "fixture" in d:
        return schedule_from_dict(d["fixture"], where)
    rule = d.get("rule", "eventually_periodic")
    try:
        space = space_from_spec(d.get("space", "interval"))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{where}.space", f"unknown space {exc}") from None
    if rule in ("eventually_periodic", "periodic", "eventually_constant"):
        prefix = [_map(m, space, f"{where}.prefix[{i}]") for i, m in enumerate(d.get("prefix", []))]
        if rule == "eventually_constant":
            if "tail" not in d:
                raise ConfigError(f"{where}.tail", "eventually constant schedules need a tail map")
            cycle = [_map(d["tail"], space, f"{where}.tail")]
        else:
            cycle = [_map(m, space, f"{where}.cycle[{i}]") for i, m in enumerate(d.get("cycle", []))]
        if not cycle:
            raise ConfigError(f"{where}.cycle", "the repeating part cannot be empty")
        return EventuallyPeriodic(space, tuple(prefix), tuple(cycle))
    if rule == "block":
        if d.get("name", "shift_block") != "shift_block":
            raise ConfigError(f"{where}.name", f"unknown block rule {d.get('name')!r}")
        if space.kind is not SpaceKind.SHIFT:
            raise ConfigError(f"{where}.space", "the shift block rule lives on the shift space")
        return shift_block_family(space.window)
    if rule == "altered":
        base = schedule_from_dict(d.get("base"), f"{where}.base")
        head = tuple(_map(m, base.space, f"{where}.head[{i}]") for i, m in enumerate(d.get("head", [])))
        return AlteredSchedule(base.space, head, base, int(d.get("skip", 0)))
    raise ConfigError(f"{where}.rule", f"unknown schedule rule {rule!r}")


# --------------------------------------------------------------------------
# transformations


@dataclass(frozen=True)
class Transform:
    op: str
    args: tuple = ()

    def apply(self, F: FamilySchedule) -> FamilySchedule:
        if self.op == "truncate":
            return truncate(F, self.args[0])
        if self.op == "insert":
            r, m = self.args
            return insert_map(F, r, _map(m, F.space, "transform.map"))
        if self.op == "delete":
            return delete_map(F, self.args[0])
        if self.op == "rearrange":
            return rearrange_finite(F, self.args)
        if self.op == "block_rearrange":
            return block_rearrange(F)
        raise ConfigError("transformations", f"unknown operation {self.op!r}")

    @property
    def label(self) -> str:
        if self.op == "insert":
            m = self.args[1]
            name = m if isinstance(m, str) else m.get("name") or m.get("kind", "map")
            return f"insert:{self.args[0]}:{name}"
        if self.op == "rearrange":
            return "rearrange:" + ",".join(map(str, self.args))
        if self.args:
            return f"{self.op}:{self.args[0]}"
        return self.op

    def to_dict(self) -> dict:
        if self.op in ("truncate", "delete"):
            return {"op": self.op, "k": self.args[0]}
        if self.op == "insert":
            return {"op": "insert", "r": self.args[0], "map": self.args[1]}
        if self.op == "rearrange":
            return {"op": "rearrange", "perm": list(self.args)}
        return {"op": self.op}


def _positive(value, where, minimum=1) -> int:
    try:
        v = int(value)
    except (TypeError, ValueError):
        raise ConfigError(where, f"expected an integer, got {value!r}") from None
    if v < minimum or v != value and str(v) != str(value):
        raise ConfigError(where, f"expected an integer >= {minimum}, got {value!r}")
    return v


def transform_from_dict(d, where: str) -> Transform:
    if isinstance(d, str):
        return parse_transform(d, where)
    op = d.get("op")
    if op == "truncate":
        return Transform("truncate", (_positive(d.get("k"), f"{where}.k", 0),))
    if op == "delete":
        return Transform("delete", (_positive(d.get("k"), f"{where}.k"),))
    if op == "insert":
        if "map" not in d:
            raise ConfigError(f"{where}.map", "insert needs a map")
        return Transform("insert", (_positive(d.get("r"), f"{where}.r"), d["map"]))
    if op == "rearrange":
        perm = d.get("perm")
        if not isinstance(perm, list) or sorted(perm) != list(range(1, len(perm) + 1)):
            raise ConfigError(f"{where}.perm", f"{perm!r} is not a permutation of 1..m")
        return Transform("rearrange", tuple(perm))
    if op == "block_rearrange":
        return Transform("block_rearrange")
    raise ConfigError(f"{where}.op", f"unknown operation {op!r}")


def parse_transform(spec: str, where: str = "transform") -> Transform:
    """Command-line form: ``truncate:1``, ``insert:3:identity``, ``delete:2``,
    ``rearrange:2,1``, ``block_rearrange``."""
    op, _, rest = spec.partition(":")
    if op == "truncate":
        return transform_from_dict({"op": op, "k": rest}, where)
    if op == "delete":
        return transform_from_dict({"op": op, "k": rest}, where)
    if op == "insert":
        r, _, name = rest.partition(":")
        if not name:
            raise ConfigError(where, "insert needs a position and a map, e.g. insert:3:identity")
        return transform_from_dict({"op": op, "r": r, "map": name}, where)
    if op == "rearrange":
        try:
            perm = [int(x) for x in rest.split(",") if x]
        except ValueError:
            raise ConfigError(where, f"bad permutation {rest!r}") from None
        return transform_from_dict({"op": op, "perm": perm}, where)
    if op == "block_rearrange" and not rest:
        return Transform("block_rearrange")
    raise ConfigError(where, f"unknown transformation {spec!r}")


# --------------------------------------------------------------------------
# detectors


def params_from_dict(d: dict, space, where: str = "params") -> DetectorParams:
    d = dict(d or {})
    known = {"epsilon", "horizon", "grid", "deltas", "delta_list", "tol", "gap"}
    extra = set(d) - known
    if extra:
        raise ConfigError(where, f"unknown parameter(s) {sorted(extra)}")
    try:
        out = {}
        if "epsilon" in d:
            out["epsilon"] = parse_number(d["epsilon"])
        for key in ("horizon", "grid", "gap"):
            if key in d:
                out[key] = int(d[key])
        deltas = d.get("deltas", d.get("delta_list"))
        if deltas is not None:
            if isinstance(deltas, str):
                deltas = [x for x in deltas.split(",") if x]
            out["deltas"] = tuple(parse_number(x) for x in deltas)
        if "tol" in d:
            out["tol"] = float(d["tol"])
        return DetectorParams.defaults(space, **out)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(where, str(exc)) from None


def parse_coordinate(value, space, where: str = "pair"):
    """Raw coordinate for a point of ``space`` from JSON or CLI text."""
    try:
        if space.kind is SpaceKind.SHIFT:
            return ShiftWord.parse(str(value))
        if space.kind is SpaceKind.CIRCLE:
            return float(parse_number(value))
        v = parse_number(value)
        return v if isinstance(v, Fraction) else float(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(where, f"bad coordinate {value!r}: {exc}") from None


@dataclass(frozen=True)
class DetectorSpec:
    property: str
    params: dict = field(default_factory=dict, hash=False)
    pair: tuple = ()

    @property
    def key(self) -> str:
        if self.property == "proximal":
            return f"proximal({self.pair[0]},{self.pair[1]})"
        return self.property

    def to_dict(self) -> dict:
        d = {"property": self.property}
        if self.params:
            d["params"] = self.params
        if self.pair:
            d["pair"] = list(self.pair)
        return d


def detector_from_dict(d, where: str) -> DetectorSpec:
    if isinstance(d, str):
        d = {"property": d}
    prop = d.get("property")
    if prop not in PROPERTIES:
        raise ConfigError(f"{where}.property", f"unknown property {prop!r}; known: {', '.join(PROPERTIES)}")
    pair = ()
    if prop == "proximal":
        pair = d.get("pair")
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError(f"{where}.pair", "proximal needs a pair of two coordinates")
        pair = tuple(str(x) for x in pair)
    params = d.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{where}.params", "expected an object")
    return DetectorSpec(prop, dict(params), pair)


def expand_suite(suite) -> list:
    """``"all"``, a comma list, or a list of names/objects."""
    if suite in (None, "all"):
        return list(SET_DETECTORS)
    if isinstance(suite, str):
        return [s.strip() for s in suite.split(",") if s.strip()]
    return list(suite)


# --------------------------------------------------------------------------
# the whole scenario


@dataclass
class ScenarioConfig:
    system: object
    schedule: FamilySchedule
    transformations: list
    detectors: list
    output: str = None

    @property
    def system_label(self) -> str:
        return self.system if isinstance(self.system, str) else "inline"

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "system": self.system,
            "transformations": [t.to_dict() for t in self.transformations],
            "detectors": [d.to_dict() for d in self.detectors],
            "output": self.output,
        }


def config_from_dict(d: dict) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ConfigError("config", "expected a JSON object")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version!r} (expected {SCHEMA_VERSION})")
    unknown = set(d) - {"schema_version", "system", "transformations", "detectors", "output"}
    if unknown:
        raise ConfigError("config", f"unknown field(s) {sorted(unknown)}")
    if "system" not in d:
        raise ConfigError("system", "missing")
    system = d["system"]
    if isinstance(system, dict) and set(system) == {"fixture"}:
        system = system["fixture"]
    schedule = schedule_from_dict(system)
    transforms = [transform_from_dict(t, f"transformations[{i}]") for i, t in enumerate(d.get("transformations", []))]
    detectors = [detector_from_dict(x, f"detectors[{i}]") for i, x in enumerate(expand_suite(d.get("detectors")))]
    # validate parameters and transformations eagerly so errors name the field
    for i, spec in enumerate(detectors):
        params_from_dict(spec.params, schedule.space, f"detectors[{i}].params")
        for j, x in enumerate(spec.pair):
            parse_coordinate(x, schedule.space, f"detectors[{i}].pair[{j}]")
    F = schedule
    for i, t in enumerate(transforms):
        try:
            F = t.apply(F)
        except ConfigError:
            raise
        except (ValueError, IndexError, TypeError) as exc:
            raise ConfigError(f"transformations[{i}]", str(exc)) from None
    return ScenarioConfig(system, schedule, transforms, detectors, d.get("output"))


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc}") from None
    return config_from_dict(data)


def load_system(arg: str):
    """A fixture name, or a path to a JSON schedule description."""
    if arg in REGISTRY:
        return arg, get_fixture(arg).schedule
    path = Path(arg)
    if path.suffix == ".json" or path.exists():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("system", f"cannot load {arg}: {exc}") from None
        return data, schedule_from_dict(data)
    raise ConfigError("system", f"unknown fixture {arg!r}; known: {', '.join(REGISTRY)}")


def point_pair(spec: DetectorSpec, space):
    return tuple(Point(space, parse_coordinate(x, space)) for x in spec.pair)
