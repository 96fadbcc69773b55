"""Phase spaces: the unit interval, the circle and the two-sided binary shift.

Points and open sets are immutable values.  Interval coordinates may be
``Fraction`` instances, in which case downstream map evaluation stays exact;
circle angles are floats in ``[0, 2*pi)``.  Shift points are finitely supported
words (zero outside the stored bits), so shifting them never loses data; the
window ``W`` only truncates the metric.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence, Union

TWO_PI = 2.0 * math.pi
COORD_TOL = 1e-12


class SpaceMismatchError(ValueError):
    """Raised when objects from different phase spaces are combined."""


class SpaceKind(str, Enum):
    INTERVAL = "interval"
    CIRCLE = "circle"
    SHIFT = "shift"


@dataclass(frozen=True)
class Space:
    kind: SpaceKind
    window: int = 0

    def __post_init__(self):
        kind = SpaceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is SpaceKind.SHIFT:
            if int(self.window) < 1:
                raise ValueError("binary shift window must be >= 1")
            object.__setattr__(self, "window", int(self.window))
        else:
            object.__setattr__(self, "window", 0)

    @property
    def diameter(self) -> float:
        if self.kind is SpaceKind.INTERVAL:
            return 1.0
        if self.kind is SpaceKind.CIRCLE:
            return math.pi
        return 3.0 - 2.0 ** (1 - self.window)

    def __str__(self):
        if self.kind is SpaceKind.SHIFT:
            return f"shift[W={self.window}]"
        return self.kind.value


UNIT_INTERVAL = Space(SpaceKind.INTERVAL)
CIRCLE = Space(SpaceKind.CIRCLE)
DEFAULT_WINDOW = 8


def space_spec(space: Space) -> dict:
    """JSON form of a space, inverse of ``space_from_spec``."""
    if space.kind is SpaceKind.SHIFT:
        return {"kind": "shift", "window": space.window}
    return {"kind": space.kind.value}


def space_from_spec(spec) -> Space:
    if isinstance(spec, str):
        spec = {"kind": spec}
    kind = SpaceKind(spec["kind"])
    if kind is SpaceKind.SHIFT:
        return binary_shift(int(spec.get("window", DEFAULT_WINDOW)))
    return Space(kind)


def binary_shift(window: int = DEFAULT_WINDOW) -> Space:
    return Space(SpaceKind.SHIFT, window)


# --------------------------------------------------------------------------
# shift words


@dataclass(frozen=True)
class ShiftWord:
    """A two-sided 0/1 sequence with finite support.

    ``bits[j]`` is the coordinate at index ``start + j``; every other
    coordinate is 0.  The representation is normalised (no leading or
    trailing zeros), so equal sequences compare equal.  ``shifts`` counts the
    net shift applications that produced the word and is not part of equality.
    """

    start: int = 0
    bits: tuple = ()
    shifts: int = field(default=0, compare=False)

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("shift words are binary")
        lo, hi = 0, len(bits)
        while lo < hi and bits[lo] == 0:
            lo += 1
        while hi > lo and bits[hi - 1] == 0:
            hi -= 1
        start = self.start + lo if hi > lo else 0
        object.__setattr__(self, "start", int(start))
        object.__setattr__(self, "bits", bits[lo:hi])

    @classmethod
    def from_coords(cls, coords: dict) -> "ShiftWord":
        """Build from ``{index: bit}``; unspecified indices are 0."""
        ones = [i for i, b in coords.items() if int(b)]
        if not ones:
            return cls()
        lo, hi = min(ones), max(ones)
        return cls(lo, tuple(int(coords.get(i, 0)) for i in range(lo, hi + 1)))

    @classmethod
    def from_range(cls, lo: int, bits: Sequence[int]) -> "ShiftWord":
        return cls(lo, tuple(bits))

    def at(self, i: int) -> int:
        j = i - self.start
        if 0 <= j < len(self.bits):
            return self.bits[j]
        return 0

    def coords(self, lo: int, hi: int) -> tuple:
        """Coordinates at indices ``lo..hi`` inclusive."""
        return tuple(self.at(i) for i in range(lo, hi + 1))

    def shifted(self, s: int) -> "ShiftWord":
        """Apply sigma**s, where sigma(x)_i = x_{i+1}."""
        return ShiftWord(self.start - s, self.bits, self.shifts + s)

    def __xor__(self, other: "ShiftWord") -> "ShiftWord":
        if not self.bits:
            return ShiftWord(other.start, other.bits)
        if not other.bits:
            return ShiftWord(self.start, self.bits)
        lo = min(self.start, other.start)
        hi = max(self.start + len(self.bits), other.start + len(other.bits)) - 1
        return ShiftWord(lo, tuple(self.at(i) ^ other.at(i) for i in range(lo, hi + 1)))

    def __str__(self):
        if not self.bits:
            return "0^Z"
        return f"{self.start}:{''.join(map(str, self.bits))}"

    @classmethod
    def parse(cls, text: str) -> "ShiftWord":
        """Inverse of ``str``: ``"start:bits"`` or ``"0^Z"``."""
        text = text.strip()
        if text in ("0^Z", ""):
            return cls()
        start, bits = text.split(":")
        return cls(int(start), tuple(int(c) for c in bits))


def shift_weights(window: int) -> list:
    """Metric weights 2**-|i| for i = -W..W."""
    return [2.0 ** -abs(i) for i in range(-window, window + 1)]


def shift_distance(x: ShiftWord, y: ShiftWord, window: int) -> float:
    total = 0.0
    for i in range(-window, window + 1):
        if x.at(i) != y.at(i):
            total += 2.0 ** -abs(i)
    return total


# --------------------------------------------------------------------------
# points


Coordinate = Union[Fraction, float, ShiftWord]


def reduce_angle(theta: float) -> float:
    theta = float(theta) % TWO_PI
    if theta >= TWO_PI:
        theta = 0.0
    return theta


@dataclass(frozen=True)
class Point:
    space: Space
    value: Coordinate

    def __post_init__(self):
        kind = self.space.kind
        if kind is SpaceKind.INTERVAL:
            v = self.value
            if not isinstance(v, Fraction):
                if isinstance(v, int):
                    v = Fraction(v)
                else:
                    v = float(v)
            if isinstance(v, Fraction):
                if v < 0 or v > 1:
                    raise ValueError(f"interval coordinate {v} outside [0, 1]")
            elif v < -COORD_TOL or v > 1 + COORD_TOL:
                raise ValueError(f"interval coordinate {v} outside [0, 1]")
            else:
                v = min(max(v, 0.0), 1.0)
            object.__setattr__(self, "value", v)
        elif kind is SpaceKind.CIRCLE:
            object.__setattr__(self, "value", reduce_angle(self.value))
        else:
            if not isinstance(self.value, ShiftWord):
                raise TypeError("shift points carry a ShiftWord")

    def __str__(self):
        return format_value(self.space, self.value)


def interval_point(x) -> Point:
    if isinstance(x, str):
        x = Fraction(x)
    return Point(UNIT_INTERVAL, x)


def circle_point(theta: float) -> Point:
    return Point(CIRCLE, theta)


def shift_point(word: ShiftWord, window: int = DEFAULT_WINDOW) -> Point:
    return Point(binary_shift(window), word)


def format_value(space: Space, value) -> str:
    if space.kind is SpaceKind.SHIFT:
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


def _check_same(p: Point, q: Point):
    if p.space != q.space:
        raise SpaceMismatchError(f"points live in {p.space} and {q.space}")


def circle_gap(a: float, b: float) -> float:
    d = abs(float(a) - float(b)) % TWO_PI
    return min(d, TWO_PI - d)


def distance(p: Point, q: Point) -> float:
    _check_same(p, q)
    kind = p.space.kind
    if kind is SpaceKind.INTERVAL:
        d = abs(p.value - q.value)
        return d if isinstance(d, Fraction) else float(d)
    if kind is SpaceKind.CIRCLE:
        return circle_gap(p.value, q.value)
    return shift_distance(p.value, q.value, p.space.window)


# --------------------------------------------------------------------------
# open sets


@dataclass(frozen=True)
class OpenInterval:
    a: Real
    b: Real

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"empty interval ({self.a}, {self.b})")
        if self.a < 0 or self.b > 1:
            raise ValueError("open interval must lie in [0, 1]")

    @property
    def space(self) -> Space:
        return UNIT_INTERVAL

    def contains(self, x) -> bool:
        return self.a < x < self.b

    @property
    def center(self):
        return (self.a + self.b) / 2

    @property
    def diameter_bound(self) -> float:
        return float(self.b - self.a)

    def __str__(self):
        return f"({self.a}, {self.b})"


@dataclass(frozen=True)
class OpenArc:
    """Arc from ``start`` counter-clockwise to ``end``; ``end`` may exceed 2*pi."""

    start: float
    end: float

    def __post_init__(self):
        start = reduce_angle(self.start)
        end = float(self.end) - (float(self.start) - start)
        if not start < end:
            raise ValueError("empty arc")
        if end - start > TWO_PI + COORD_TOL:
            raise ValueError("arc longer than the circle")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def space(self) -> Space:
        return CIRCLE

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains(self, theta) -> bool:
        offset = (float(theta) - self.start) % TWO_PI
        return 0.0 < offset < self.length

    @property
    def center(self) -> float:
        return reduce_angle((self.start + self.end) / 2)

    @property
    def diameter_bound(self) -> float:
        return min(self.length, math.pi)

    def __str__(self):
        return f"arc({self.start:.6g}, {self.end:.6g})"


@dataclass(frozen=True)
class Cylinder:
    """Sequences whose coordinates ``lo .. lo+len(bits)-1`` equal ``bits``."""

    lo: int
    bits: tuple
    window: int = DEFAULT_WINDOW

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("a cylinder fixes at least one coordinate")
        if len(bits) > 2 * self.window + 1:
            raise ValueError("a cylinder fixes at most 2W+1 coordinates")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("cylinder bits must be 0/1")
        object.__setattr__(self, "bits", bits)

    @property
    def hi(self) -> int:
        return self.lo + len(self.bits) - 1

    @property
    def space(self) -> Space:
        return binary_shift(self.window)

    def contains(self, word: ShiftWord) -> bool:
        return word.coords(self.lo, self.hi) == self.bits

    @property
    def center(self) -> ShiftWord:
        return ShiftWord(self.lo, self.bits)

    def shifted(self, s: int) -> "Cylinder":
        """Image under sigma**s."""
        return Cylinder(self.lo - s, self.bits, self.window)

    def free_indices(self) -> list:
        """Window indices not fixed by the cylinder."""
        return [i for i in range(-self.window, self.window + 1) if not self.lo <= i <= self.hi]

    @property
    def diameter_bound(self) -> float:
        """Exact diameter in the window-truncated metric."""
        return sum(2.0 ** -abs(i) for i in self.free_indices())

    def __str__(self):
        return f"[{self.lo}:{''.join(map(str, self.bits))}]"


OpenSet = Union[OpenInterval, OpenArc, Cylinder]


def contains(u: OpenSet, p: Point) -> bool:
    if u.space != p.space:
        raise SpaceMismatchError(f"{u} and {p} live in different spaces")
    return u.contains(p.value)


# --------------------------------------------------------------------------
# nets and grids


def as_exact(eps) -> Fraction:
    if isinstance(eps, Fraction):
        return eps
    if isinstance(eps, int):
        return Fraction(eps)
    return Fraction(str(eps)) if isinstance(eps, str) else Fraction(float(eps)).limit_denominator(10**12)


def cylinder_radius(eps, window: int) -> int:
    """Smallest r with 2**-r <= eps, so cylinders on [-r, r] have diameter <= 2*eps."""
    r = 0
    while 2.0 ** -r > float(eps) * (1 + 1e-12):
        r += 1
    if r > window:
        raise ValueError(f"epsilon {eps} needs cylinders wider than the window W={window}")
    return r


def epsilon_net(space: Space, eps) -> list:
    """Finite cover of ``space`` by open sets of diameter at most ``2*eps``."""
    if not float(eps) > 0:
        raise ValueError("epsilon must be positive")
    if float(eps) >= space.diameter:
        raise ValueError("epsilon must be smaller than the space diameter")
    kind = space.kind
    if kind is SpaceKind.INTERVAL:
        e = as_exact(eps)
        m = math.ceil(1 / e)
        out = []
        for j in range(m):
            c = Fraction(2 * j + 1, 2 * m)
            out.append(OpenInterval(max(Fraction(0), c - e), min(Fraction(1), c + e)))
        return out
    if kind is SpaceKind.CIRCLE:
        e = float(eps)
        m = math.ceil(TWO_PI / e - 1e-9)
        out = []
        for j in range(m):
            c = (2 * j + 1) * math.pi / m
            out.append(OpenArc(c - e, c + e))
        return out
    r = cylinder_radius(eps, space.window)
    return [Cylinder(-r, bits, space.window) for bits in itertools.product((0, 1), repeat=2 * r + 1)]


def net_diameter_bound(net: Sequence[OpenSet]) -> float:
    return max(u.diameter_bound for u in net)


def sample_grid(u: OpenSet, resolution: int) -> list:
    """Deterministic points inside ``u``.

    Intervals and arcs get ``resolution`` equally spaced interior points.  For
    a cylinder, ``resolution`` is the number of free coordinates enumerated on
    each side of the fixed block (capped at the window); everything further
    out is 0.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if isinstance(u, OpenInterval):
        step = (u.b - u.a) / (resolution + 1)
        return [Point(UNIT_INTERVAL, u.a + step * k) for k in range(1, resolution + 1)]
    if isinstance(u, OpenArc):
        step = u.length / (resolution + 1)
        return [Point(CIRCLE, u.start + step * k) for k in range(1, resolution + 1)]
    w = u.window
    left = list(range(max(-w, u.lo - resolution), u.lo))
    right = list(range(u.hi + 1, min(w, u.hi + resolution) + 1))
    space = u.space
    out = []
    for free in itertools.product((0, 1), repeat=len(left) + len(right)):
        coords = dict(zip(left + right, free))
        coords.update({u.lo + j: b for j, b in enumerate(u.bits)})
        out.append(Point(space, ShiftWord.from_coords(coords)))
    return out


def space_grid(space: Space, resolution: int) -> list:
    """Deterministic grid over the whole space.

    Interval: ``resolution`` interior points k/(resolution+1).  Circle:
    ``resolution`` equally spaced angles starting at 0.  Shift: every word
    supported on ``[-R, R]`` with ``R = min(resolution, W)``.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if space.kind is SpaceKind.INTERVAL:
        return [Point(space, Fraction(k, resolution + 1)) for k in range(1, resolution + 1)]
    if space.kind is SpaceKind.CIRCLE:
        return [Point(space, TWO_PI * k / resolution) for k in range(resolution)]
    r = min(resolution, space.window)
    return [
        Point(space, ShiftWord(-r, bits))
        for bits in itertools.product((0, 1), repeat=2 * r + 1)
    ]


def points_from(space: Space, values: Iterable) -> list:
    return [Point(space, v) for v in values]
