"""Named systems: the worked examples of the theory plus baseline systems.

Each entry carries an ``expected`` table that must hold under the detector
defaults for its space.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .detectors import Status
from .family import (
    FamilySchedule,
    eventually_constant,
    periodic,
    shift_block_family,
)
from .maps import (
    MapDescriptor,
    identity_map,
    piecewise_linear,
    piecewise_map,
    rotation,
    shift_left,
    shift_right,
    tent_map,
)
from .spaces import CIRCLE, UNIT_INTERVAL, Point, distance, space_grid

W = Status.WITNESSED
R = Status.REFUTED
NW = Status.NO_WITNESS_AT_SCALE


@dataclass(frozen=True)
class Expectation:
    """``property`` run with default params has ``status``.

    For ``proximal`` the pair of raw coordinates is given in ``pair``.
    """

    property: str
    status: Status
    pair: tuple = ()


@dataclass(frozen=True)
class FixtureEntry:
    name: str
    schedule: FamilySchedule
    notes: str
    expected: tuple = ()
    maps: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def space(self):
        return self.schedule.space

    def point(self, value) -> Point:
        return Point(self.space, value)

    def fingerprint(self) -> str:
        blob = json.dumps(self.schedule.describe(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


def prox1_f() -> MapDescriptor:
    return piecewise_linear([("0", "0"), ("1/3", "1"), ("2/3", "0"), ("1", "2/3")], "prox1_f")


def prox1_h() -> MapDescriptor:
    return piecewise_linear([("0", "0"), ("2/3", "1/4"), ("1", "1")], "prox1_h")


def prox2_f() -> MapDescriptor:
    return rotation(half_turns=1, name="rot(pi)")


def prox2_g() -> MapDescriptor:
    # identity on [0, pi], theta^2/pi - 2 theta + 2 pi on [pi, 2 pi] (half-turn units)
    return piecewise_map(CIRCLE, [0, 1, 2], [(0, 1), (2, -2, 1)], "prox2_g")


def prox3_f() -> MapDescriptor:
    return piecewise_map(
        UNIT_INTERVAL,
        ["0", "1/2", "7/8", "1"],
        [("0", "1"), ("-1/6", "4/3"), ("1",)],
        "prox3_f",
    )


def prox3_g() -> MapDescriptor:
    return piecewise_map(
        UNIT_INTERVAL,
        ["0", "1/4", "1/2", "1"],
        [("1/2", "-2"), ("-1/2", "2"), ("0", "1")],
        "prox3_g",
    )


def sens_f() -> MapDescriptor:
    return piecewise_map(UNIT_INTERVAL, ["0", "1/2", "1"], [("0",), ("-1", "2")], "sens_f")


_SET_MIXING = ("transitivity", "weak_mixing", "topological_mixing")


def _build() -> dict:
    g = tent_map()
    entries = [
        FixtureEntry(
            "prox1",
            eventually_constant([prox1_f()], g),
            "f interpolates (0,0), (1/3,1), (2/3,0), (1,2/3), followed by the tent map; "
            "f and g do not commute, (0, 1) is proximal for every truncation but not for F",
            (
                Expectation("proximal", NW, (Fraction(0), Fraction(1))),
                Expectation("minimality", R),
            ),
            {"f": prox1_f(), "g": g},
        ),
        FixtureEntry(
            "prox1_h",
            eventually_constant([prox1_h()], g),
            "h interpolates (0,0), (2/3,1/4), (1,1), followed by the tent map; "
            "(0, 2/3) is proximal for F but not for its truncations",
            (Expectation("proximal", W, (Fraction(0), Fraction(2, 3))),),
            {"h": prox1_h(), "g": g},
        ),
        FixtureEntry(
            "prox2",
            eventually_constant([prox2_f()], prox2_g()),
            "circle: rotation by pi, then g fixing [0, pi] with an attracting fixed point at pi; "
            "bijective but not commutative, interior points of (0, pi) become proximal",
            (
                Expectation("proximal", W, (math.pi / 4, math.pi / 2)),
                Expectation("minimality", R),
            ),
            {"f": prox2_f(), "g": prox2_g()},
        ),
        FixtureEntry(
            "prox3",
            eventually_constant([prox3_f()], prox3_g()),
            "commuting but not injective: f collapses [7/8, 1] to 1 and g fixes [1/2, 1]",
            (
                Expectation("proximal", W, (Fraction(9, 10), Fraction(1))),
                Expectation("minimality", R),
            ),
            {"f": prox3_f(), "g": prox3_g()},
        ),
        FixtureEntry(
            "sens",
            eventually_constant([sens_f()], g),
            "f crushes [0, 1/2] to 0 ahead of the tent map: no mixing or sensitivity, "
            "while every truncation is the tent map",
            tuple(Expectation(p, NW) for p in _SET_MIXING + ("sensitivity",)) + (Expectation("minimality", R),),
            {"f": sens_f(), "g": g},
        ),
        FixtureEntry(
            "shift_block",
            shift_block_family(),
            "sigma on [n(n+1)+1, (n+1)^2] and sigma^-1 on [(n+1)^2+1, (n+1)(n+2)]; "
            "omega_{n(n+1)} is the identity",
            (
                Expectation("sensitivity", W),
                Expectation("equicontinuity", R),
                Expectation("topological_mixing", NW),
                Expectation("cofinite_sensitivity", NW),
                Expectation("minimality", R),
            ),
            {"sigma": shift_left(), "sigma^-1": shift_right()},
        ),
        FixtureEntry(
            "shift_alternating",
            periodic([shift_left(), shift_right()]),
            "the infinite rearrangement (sigma, sigma^-1, ...) of shift_block; every orbit is {x, sigma x}",
            (
                Expectation("equicontinuity", W),
                Expectation("sensitivity", NW),
                Expectation("transitivity", NW),
                Expectation("minimality", R),
            ),
            {"sigma": shift_left(), "sigma^-1": shift_right()},
        ),
        FixtureEntry(
            "rotation_minimal",
            periodic([rotation(angle=1.0, name="rot(1)")]),
            "rotation of the circle by 1 radian, an irrational fraction of a turn",
            (
                Expectation("minimality", W),
                Expectation("equicontinuity", W),
                Expectation("transitivity", W),
                Expectation("sensitivity", NW),
            ),
            {"r": rotation(angle=1.0, name="rot(1)")},
        ),
        FixtureEntry(
            "commuting_rotations",
            periodic([rotation(angle=1.0, name="rot(1)"), rotation(angle=math.sqrt(2), name="rot(sqrt2)")]),
            "two distinct circle rotations interleaved: a commuting family of bijections",
            (
                Expectation("equicontinuity", W),
                Expectation("proximal", NW, (0.0, 1.0)),
                Expectation("proximal", W, (0.5, 0.5)),
            ),
            {"r1": rotation(angle=1.0, name="rot(1)"), "r2": rotation(angle=math.sqrt(2), name="rot(sqrt2)")},
        ),
        FixtureEntry(
            "tent_autonomous",
            periodic([g]),
            "the tent map iterated autonomously: mixing and sensitive",
            tuple(Expectation(p, W) for p in _SET_MIXING + ("sensitivity", "cofinite_sensitivity"))
            + (Expectation("equicontinuity", R), Expectation("minimality", R)),
            {"g": g},
        ),
        FixtureEntry(
            "identity_autonomous",
            periodic([identity_map(UNIT_INTERVAL)]),
            "the identity on [0, 1]: every orbit is a fixed point",
            tuple(Expectation(p, NW) for p in _SET_MIXING + ("sensitivity",))
            + (Expectation("equicontinuity", W), Expectation("minimality", R)),
            {"id": identity_map(UNIT_INTERVAL)},
        ),
    ]
    return {e.name: e for e in entries}


REGISTRY = _build()


class UnknownFixtureError(KeyError):
    def __str__(self):
        return self.args[0]


def fixture_names() -> list:
    return list(REGISTRY)


def get_fixture(name: str) -> FixtureEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownFixtureError(f"unknown fixture {name!r}; known: {', '.join(REGISTRY)}") from None


def all_maps() -> list:
    """Every distinct map used by some fixture, with the fixture that owns it."""
    seen, out = [], []
    for entry in REGISTRY.values():
        for label, f in entry.maps.items():
            if f not in seen:
                seen.append(f)
                out.append((f"{entry.name}.{label}", f))
    return out


def commuting_check(f: MapDescriptor, g: MapDescriptor, grid: int = 256, tol: float = 1e-9) -> bool:
    if f.space != g.space:
        raise ValueError(f"maps act on different spaces ({f.space}, {g.space})")
    for p in space_grid(f.space, grid):
        fg = Point(p.space, f.eval_value(g.eval_value(p.value)))
        gf = Point(p.space, g.eval_value(f.eval_value(p.value)))
        if not distance(fg, gf) < tol:
            return False
    return True
