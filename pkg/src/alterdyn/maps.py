"""Continuous self-maps: piecewise polynomials on the interval and circle, and
the shift homeomorphisms on the binary shift space.

Circle maps are stored in half-turn units: a piece ``p`` on ``[t_i, t_{i+1}]``
(``t`` in ``[0, 2]``) stands for ``theta -> pi * p(theta / pi)`` reduced mod
``2*pi``.  That keeps formulas such as ``theta**2/pi - 2*theta + 2*pi``
rational: it is ``t**2 - 2t + 2``.

Coefficients are kept as ``Fraction`` when given as rationals (strings like
``"2/3"`` are parsed exactly).  Evaluation is exact for rational interval
points under rational maps of degree <= 1, and binary floating point otherwise.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .spaces import (
    CIRCLE,
    COORD_TOL,
    TWO_PI,
    UNIT_INTERVAL,
    Cylinder,
    OpenArc,
    OpenInterval,
    OpenSet,
    Point,
    Space,
    SpaceKind,
    SpaceMismatchError,
    binary_shift,
    reduce_angle,
)

MAX_DEGREE = 2


class MapConstructionError(ValueError):
    """A map description that is discontinuous, out of range or malformed."""


class MapKind(str, Enum):
    PIECEWISE = "piecewise"
    SHIFT_LEFT = "shift_left"
    SHIFT_RIGHT = "shift_right"
    IDENTITY = "identity"


def parse_number(value):
    """Rationals stay exact; ``"pi"`` multiples and floats become floats.

    Accepts ints, Fractions, floats and strings such as ``"2/3"``, ``"-1"``,
    ``"0.25"``, ``"pi/8"`` or ``"3pi/2"``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    text = str(value).strip().replace(" ", "")
    if "pi" in text:
        head, _, tail = text.partition("pi")
        if head in ("", "+"):
            num = 1.0
        elif head == "-":
            num = -1.0
        else:
            num = float(parse_number(head.rstrip("*")))
        den = 1.0
        if tail:
            if not tail.startswith("/"):
                raise ValueError(f"cannot parse {value!r}")
            den = float(parse_number(tail[1:]))
        return num * math.pi / den
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def _is_exact(c) -> bool:
    return isinstance(c, (Fraction, int)) and not isinstance(c, bool)


def _trim(coeffs: Sequence) -> tuple:
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def poly_eval(coeffs: Sequence, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _vertex(coeffs: Sequence):
    if len(coeffs) == 3 and coeffs[2] != 0:
        return -coeffs[1] / (2 * coeffs[2])
    return None


def piece_range(coeffs: Sequence, lo, hi):
    """(min, max) of the polynomial over ``[lo, hi]``."""
    vals = [poly_eval(coeffs, lo), poly_eval(coeffs, hi)]
    v = _vertex(coeffs)
    if v is not None and lo < v < hi:
        vals.append(poly_eval(coeffs, v))
    return min(vals), max(vals)


def _close(a, b, tol=COORD_TOL) -> bool:
    if _is_exact(a) and _is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= tol


@dataclass(frozen=True)
class ImageInterval:
    """Closed interval (or arc, for circle maps) ``[lo, hi]`` in native units."""

    lo: object
    hi: object

    @property
    def is_singleton(self) -> bool:
        return _close(self.lo, self.hi)

    @property
    def has_interior(self) -> bool:
        return not self.is_singleton

    def __str__(self):
        if self.is_singleton:
            return f"{{{self.lo}}}"
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class MapDescriptor:
    space: Space
    kind: MapKind
    breakpoints: tuple = ()
    pieces: tuple = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        kind = MapKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is MapKind.PIECEWISE:
            self._validate_piecewise()
        elif kind in (MapKind.SHIFT_LEFT, MapKind.SHIFT_RIGHT):
            if self.space.kind is not SpaceKind.SHIFT:
                raise MapConstructionError("shift maps live on the binary shift space")
        if self.space.kind is SpaceKind.SHIFT and kind is MapKind.PIECEWISE:
            raise MapConstructionError("piecewise polynomials live on the interval or circle")

    # -- construction checks -------------------------------------------------

    def _validate_piecewise(self):
        if self.space.kind is SpaceKind.SHIFT:
            raise MapConstructionError("piecewise polynomials live on the interval or circle")
        bps = tuple(parse_number(b) for b in self.breakpoints)
        pieces = tuple(_trim(tuple(parse_number(c) for c in piece)) for piece in self.pieces)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pieces)
        end = self.domain_end
        if len(bps) < 2:
            raise MapConstructionError("need at least two breakpoints")
        if not _close(bps[0], 0) or not _close(bps[-1], end):
            raise MapConstructionError(f"breakpoints must span [0, {end}]")
        if any(not a < b for a, b in zip(bps, bps[1:])):
            raise MapConstructionError("breakpoints must be strictly increasing")
        if len(pieces) != len(bps) - 1:
            raise MapConstructionError("need exactly one piece per breakpoint interval")
        for i, piece in enumerate(pieces):
            if not piece:
                raise MapConstructionError(f"piece {i} has no coefficients")
            if len(piece) - 1 > MAX_DEGREE:
                raise MapConstructionError(f"piece {i} has degree {len(piece) - 1} > {MAX_DEGREE}")
        for i in range(1, len(bps) - 1):
            left = poly_eval(pieces[i - 1], bps[i])
            right = poly_eval(pieces[i], bps[i])
            if not _close(left, right):
                raise MapConstructionError(
                    f"discontinuous at breakpoint {bps[i]}: piece {i - 1} gives {left}, piece {i} gives {right}"
                )
        if self.space.kind is SpaceKind.INTERVAL:
            for i, piece in enumerate(pieces):
                lo, hi = piece_range(piece, bps[i], bps[i + 1])
                slack = 0 if _is_exact(lo) and _is_exact(hi) else COORD_TOL
                if lo < -slack or hi > 1 + slack:
                    raise MapConstructionError(f"piece {i} leaves [0, 1]: range [{lo}, {hi}]")
        else:
            a = poly_eval(pieces[0], bps[0])
            b = poly_eval(pieces[-1], bps[-1])
            gap = float(b - a) % 2.0
            if min(gap, 2.0 - gap) > COORD_TOL:
                raise MapConstructionError("circle map must satisfy f(0) = f(2*pi) mod 2*pi")

    # -- derived data ----------------------------------------------------------

    @property
    def domain_end(self):
        return Fraction(2) if self.space.kind is SpaceKind.CIRCLE else Fraction(1)

    @cached_property
    def is_exact(self) -> bool:
        """Rational coefficients and breakpoints throughout."""
        if self.kind is not MapKind.PIECEWISE:
            return True
        return all(_is_exact(b) for b in self.breakpoints) and all(
            _is_exact(c) for piece in self.pieces for c in piece
        )

    @property
    def degree(self) -> int:
        if self.kind is not MapKind.PIECEWISE:
            return 1
        return max(len(p) - 1 for p in self.pieces)

    @cached_property
    def _native_breakpoints(self) -> np.ndarray:
        scale = math.pi if self.space.kind is SpaceKind.CIRCLE else 1.0
        return np.array([float(b) * scale for b in self.breakpoints])

    @cached_property
    def _native_coeffs(self) -> np.ndarray:
        """Float coefficients in native units (radians for circle maps), padded to degree 2."""
        scale = math.pi if self.space.kind is SpaceKind.CIRCLE else 1.0
        out = np.zeros((len(self.pieces), MAX_DEGREE + 1))
        for i, piece in enumerate(self.pieces):
            for k, c in enumerate(piece):
                out[i, k] = float(c) * scale ** (1 - k)
        return out

    def __str__(self):
        return self.name or self.kind.value

    # -- evaluation ------------------------------------------------------------

    @cached_property
    def _unit_breakpoints(self) -> tuple:
        return tuple(float(b) for b in self.breakpoints)

    def _piece_index(self, x) -> int:
        if _is_exact(x):
            # float bisect is exact unless x sits next to a breakpoint
            fx = float(x)
            i = bisect_left(self._unit_breakpoints, fx)
            bps = self._unit_breakpoints
            near = (i < len(bps) and bps[i] - fx < 1e-9) or (i > 0 and fx - bps[i - 1] < 1e-9)
            if near:
                i = bisect_left(self.breakpoints, x)
            i -= 1
        else:
            i = bisect_left(self._native_breakpoints, x) - 1
        return min(max(i, 0), len(self.pieces) - 1)

    def eval_value(self, x):
        """Evaluate on a raw coordinate (number or ShiftWord)."""
        kind = self.kind
        if kind is MapKind.IDENTITY:
            return x
        if kind is MapKind.SHIFT_LEFT:
            return x.shifted(1)
        if kind is MapKind.SHIFT_RIGHT:
            return x.shifted(-1)
        if self.space.kind is SpaceKind.INTERVAL:
            if _is_exact(x) and self.is_exact:
                # exact piece ranges were checked exactly at construction
                return poly_eval(self.pieces[self._piece_index(x)], x)
            x = float(x)
            i = self._piece_index(x)
            y = float(poly_eval(self._native_coeffs[i], x))
            if y < -COORD_TOL or y > 1 + COORD_TOL:
                raise MapConstructionError(f"{self}: piece {i} maps {x} to {y} outside [0, 1]")
            # roundoff only; real excursions are rejected above
            return min(max(y, 0.0), 1.0)
        x = float(x)
        i = self._piece_index(x)
        return reduce_angle(poly_eval(self._native_coeffs[i], x))

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised float evaluation for interval and circle maps."""
        kind = self.kind
        if kind is MapKind.IDENTITY:
            return xs
        if kind is not MapKind.PIECEWISE:
            raise TypeError("eval_array is for interval and circle maps")
        bps = self._native_breakpoints
        idx = np.clip(np.searchsorted(bps, xs, side="left") - 1, 0, len(self.pieces) - 1)
        c = self._native_coeffs[idx]
        ys = c[..., 0] + xs * (c[..., 1] + xs * c[..., 2])
        if self.space.kind is SpaceKind.INTERVAL:
            bad = (ys < -COORD_TOL) | (ys > 1 + COORD_TOL)
            if bad.any():
                j = int(np.flatnonzero(bad.ravel())[0])
                raise MapConstructionError(
                    f"{self}: piece {int(idx.ravel()[j])} maps {xs.ravel()[j]} outside [0, 1]"
                )
            return np.clip(ys, 0.0, 1.0)
        ys = np.mod(ys, TWO_PI)
        ys[ys >= TWO_PI] = 0.0
        return ys


def eval_map(f: MapDescriptor, p: Point) -> Point:
    if p.space != f.space:
        raise SpaceMismatchError(f"{f} acts on {f.space}, got a point of {p.space}")
    return Point(f.space, f.eval_value(p.value))


# --------------------------------------------------------------------------
# images


def _merge_line(intervals: list, exact: bool) -> list:
    if not intervals:
        return []
    tol = 0 if exact else COORD_TOL
    intervals = sorted(intervals, key=lambda iv: (iv[0], iv[1]))
    out = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [tuple(iv) for iv in out]


def _merge_circle(intervals: list, exact: bool) -> list:
    """Merge lifted intervals (half-turn units) into maximal arcs mod 2."""
    if not intervals:
        return []
    tol = 0 if exact else COORD_TOL
    arcs = []
    for lo, hi in intervals:
        if hi - lo >= 2 - tol:
            return [(0, 2)]
        shift = math.floor(lo / 2) * 2
        arcs.append((lo - shift, hi - shift))
    merged = _merge_line(arcs, exact)
    if len(merged) > 1 and merged[-1][1] >= merged[0][0] + 2 - tol:
        first = merged.pop(0)
        last = merged.pop()
        merged.append((last[0], max(last[1], first[1] + 2)))
        merged.sort()
    for lo, hi in merged:
        if hi - lo >= 2 - tol:
            return [(0, 2)]
    return merged


def _segment_images(f: MapDescriptor, segments: list) -> list:
    """Lifted images of ``(piece, lo, hi)`` segments, split at the vertex."""
    out = []
    for i, lo, hi in segments:
        coeffs = f.pieces[i]
        cuts = [lo, hi]
        v = _vertex(coeffs)
        if v is not None and lo < v < hi:
            cuts = [lo, v, hi]
        for a, b in zip(cuts, cuts[1:]):
            ya, yb = poly_eval(coeffs, a), poly_eval(coeffs, b)
            out.append((min(ya, yb), max(ya, yb)))
    return out


def _segments(f: MapDescriptor, lo, hi) -> list:
    bps = f.breakpoints
    segs = []
    for i in range(len(f.pieces)):
        a, b = max(lo, bps[i]), min(hi, bps[i + 1])
        if a < b:
            segs.append((i, a, b))
    return segs


def image_of(f: MapDescriptor, u: OpenSet) -> list:
    """Closure of ``f(u)`` split into maximal intervals (arcs, cylinders).

    Singletons come back as degenerate ``ImageInterval`` members
    (``is_singleton``).  Shift maps return the shifted cylinder.
    """
    if u.space != f.space:
        raise SpaceMismatchError(f"{f} acts on {f.space}, got an open set of {u.space}")
    kind = f.kind
    if kind is MapKind.IDENTITY:
        if isinstance(u, Cylinder):
            return [u]
        if isinstance(u, OpenArc):
            return [ImageInterval(u.start, u.end)]
        return [ImageInterval(u.a, u.b)]
    if kind is MapKind.SHIFT_LEFT:
        return [u.shifted(1)]
    if kind is MapKind.SHIFT_RIGHT:
        return [u.shifted(-1)]
    if isinstance(u, OpenInterval):
        exact = f.is_exact and _is_exact(u.a) and _is_exact(u.b)
        a, b = (u.a, u.b) if exact else (float(u.a), float(u.b))
        if not exact:
            f_local = _FloatView(f)
            images = _segment_images(f_local, _segments(f_local, a, b))
        else:
            images = _segment_images(f, _segments(f, a, b))
        return [ImageInterval(lo, hi) for lo, hi in _merge_line(images, exact)]
    # arc: work in half-turns, unwrap past 2
    fv = _FloatView(f) if not f.is_exact else f
    ta, tb = u.start / math.pi, u.end / math.pi
    segs = _segments(fv, ta, min(tb, 2.0))
    if tb > 2.0:
        segs += _segments(fv, 0.0, tb - 2.0)
    merged = _merge_circle(_segment_images(fv, segs), exact=False)
    return [ImageInterval(float(lo) * math.pi, float(hi) * math.pi) for lo, hi in merged]


class _FloatView:
    """Float copy of a map's breakpoints and pieces (same units)."""

    def __init__(self, f: MapDescriptor):
        self.breakpoints = tuple(float(b) for b in f.breakpoints)
        self.pieces = tuple(tuple(float(c) for c in p) for p in f.pieces)


def is_feeble_open(f: MapDescriptor) -> bool:
    """No piece is constant, so every open set keeps a non-empty interior."""
    if f.kind is not MapKind.PIECEWISE:
        return True
    return all(any(c != 0 for c in piece[1:]) for piece in f.pieces)


def piece_images(f: MapDescriptor) -> list:
    """Merged images of all pieces over their full intervals (native units)."""
    if f.kind is not MapKind.PIECEWISE:
        raise TypeError("piece images are defined for piecewise maps")
    segs = [(i, f.breakpoints[i], f.breakpoints[i + 1]) for i in range(len(f.pieces))]
    view = f if f.is_exact else _FloatView(f)
    images = _segment_images(view, segs)
    if f.space.kind is SpaceKind.INTERVAL:
        return [ImageInterval(lo, hi) for lo, hi in _merge_line(images, f.is_exact)]
    merged = _merge_circle(images, f.is_exact)
    return [ImageInterval(lo * math.pi, hi * math.pi) for lo, hi in merged]


def is_surjective(f: MapDescriptor) -> bool:
    if f.kind is not MapKind.PIECEWISE:
        return True
    images = piece_images(f)
    if len(images) != 1:
        return False
    (iv,) = images
    if f.space.kind is SpaceKind.INTERVAL:
        return _close(iv.lo, 0) and _close(iv.hi, 1)
    return iv.hi - iv.lo >= TWO_PI - COORD_TOL


# --------------------------------------------------------------------------
# preimages


def _exact_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _solve_piece(coeffs: Sequence, y, lo, hi) -> list:
    """Solutions of p(t) = y with t in [lo, hi] (endpoints stand in for constant pieces)."""
    exact = all(_is_exact(c) for c in coeffs) and _is_exact(y) and _is_exact(lo)
    tol = 0 if exact else COORD_TOL
    c = list(coeffs) + [0] * (3 - len(coeffs))
    c0, c1, c2 = c[0] - y, c[1], c[2]
    roots = []
    if c2 == 0 and c1 == 0:
        if abs(c0) <= tol:
            roots = [lo, hi]
    elif c2 == 0:
        roots = [-c0 / c1]
    else:
        disc = c1 * c1 - 4 * c2 * c0
        if exact:
            s = _exact_sqrt(disc)
            if s is None:
                exact = False
                tol = COORD_TOL
                c0, c1, c2, disc = float(c0), float(c1), float(c2), float(disc)
        if not exact:
            if disc < -COORD_TOL:
                return []
            s = math.sqrt(max(disc, 0.0))
        roots = [(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)]
    out = []
    for r in roots:
        if lo - tol <= r <= hi + tol:
            out.append(min(max(r, lo), hi) if exact else min(max(float(r), float(lo)), float(hi)))
    return out


def _dedupe(values: list) -> list:
    values = sorted(values, key=float)
    out = []
    for v in values:
        if out and abs(float(v) - float(out[-1])) <= COORD_TOL:
            continue
        out.append(v)
    return out


def preimages(f: MapDescriptor, p: Point) -> list:
    """All points mapped onto ``p`` (constant pieces contribute their endpoints)."""
    if p.space != f.space:
        raise SpaceMismatchError(f"{f} acts on {f.space}, got a point of {p.space}")
    kind = f.kind
    if kind is MapKind.IDENTITY:
        return [p]
    if kind is MapKind.SHIFT_LEFT:
        return [Point(p.space, p.value.shifted(-1))]
    if kind is MapKind.SHIFT_RIGHT:
        return [Point(p.space, p.value.shifted(1))]
    sols = []
    bps = f.breakpoints
    if f.space.kind is SpaceKind.INTERVAL:
        y = p.value
        for i, piece in enumerate(f.pieces):
            sols += _solve_piece(piece, y, bps[i], bps[i + 1])
        pts = [Point(f.space, s) for s in _dedupe(sols)]
    else:
        y = p.value / math.pi
        for i, piece in enumerate(f.pieces):
            lo, hi = piece_range(piece, bps[i], bps[i + 1])
            k = math.ceil((float(lo) - y) / 2 - 1e-9)
            while y + 2 * k <= float(hi) + COORD_TOL:
                sols += _solve_piece(piece, y + 2 * k, bps[i], bps[i + 1])
                k += 1
        # 0 and 2 are the same point of the circle
        pts = []
        for s in _dedupe([float(s) % 2.0 for s in sols]):
            q = Point(f.space, s * math.pi)
            if not any(abs(q.value - r.value) <= COORD_TOL * 10 or abs(abs(q.value - r.value) - TWO_PI) <= 1e-11 for r in pts):
                pts.append(q)
    if not pts and is_surjective(f):
        raise RuntimeError(f"surjective map {f} has no preimage of {p}")
    return pts


# --------------------------------------------------------------------------
# constructors


def piecewise_map(space: Space, breakpoints, pieces, name: str = "") -> MapDescriptor:
    """Piecewise polynomial; circle breakpoints/coefficients are in half-turns."""
    return MapDescriptor(space, MapKind.PIECEWISE, tuple(breakpoints), tuple(tuple(p) for p in pieces), name)


def piecewise_linear(anchors, name: str = "") -> MapDescriptor:
    """Interval map interpolating ``[(x, y), ...]`` linearly between anchors."""
    pts = [(parse_number(x), parse_number(y)) for x, y in anchors]
    bps, pieces = [pts[0][0]], []
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        slope = (y1 - y0) / (x1 - x0)
        pieces.append((y0 - slope * x0, slope))
        bps.append(x1)
    return piecewise_map(UNIT_INTERVAL, bps, pieces, name)


def identity_map(space: Space) -> MapDescriptor:
    return MapDescriptor(space, MapKind.IDENTITY, name="id")


def shift_left(window: int = 8) -> MapDescriptor:
    """The shift sigma: sigma(x)_i = x_{i+1}."""
    return MapDescriptor(binary_shift(window), MapKind.SHIFT_LEFT, name="sigma")


def shift_right(window: int = 8) -> MapDescriptor:
    return MapDescriptor(binary_shift(window), MapKind.SHIFT_RIGHT, name="sigma^-1")


def tent_map() -> MapDescriptor:
    return piecewise_map(UNIT_INTERVAL, ["0", "1/2", "1"], [("0", "2"), ("2", "-2")], "tent")


def rotation(angle=None, half_turns=None, name: str = "") -> MapDescriptor:
    """Circle rotation by ``angle`` radians (or an exact number of half-turns)."""
    if half_turns is None:
        if angle is None:
            raise ValueError("give angle or half_turns")
        half_turns = float(angle) / math.pi
    else:
        half_turns = parse_number(half_turns)
    return piecewise_map(CIRCLE, [0, 2], [(half_turns, 1)], name or f"rot({float(half_turns) * math.pi:.6g})")


def describe_map(f: MapDescriptor) -> dict:
    """JSON-ready description, the inverse of ``map_from_dict``."""
    if f.kind is not MapKind.PIECEWISE:
        d = {"kind": f.kind.value}
        if f.space.kind is SpaceKind.SHIFT:
            d["window"] = f.space.window
        else:
            d["space"] = f.space.kind.value
        return d
    d = {
        "kind": "piecewise",
        "space": f.space.kind.value,
        "breakpoints": [_num_str(b) for b in f.breakpoints],
        "pieces": [[_num_str(c) for c in piece] for piece in f.pieces],
    }
    if f.name:
        d["name"] = f.name
    return d


def _num_str(c) -> str:
    return str(c) if _is_exact(c) else repr(float(c))


def map_from_dict(d: dict, window: int = 8) -> MapDescriptor:
    kind = d.get("kind")
    if kind == "piecewise":
        space = CIRCLE if d.get("space", "interval") == "circle" else UNIT_INTERVAL
        return piecewise_map(space, d["breakpoints"], d["pieces"], d.get("name", ""))
    if kind in ("shift_left", "sigma"):
        return shift_left(int(d.get("window", window)))
    if kind in ("shift_right", "sigma^-1"):
        return shift_right(int(d.get("window", window)))
    if kind == "identity":
        sp = d.get("space", "interval")
        space = {"interval": UNIT_INTERVAL, "circle": CIRCLE}.get(sp) or binary_shift(int(d.get("window", window)))
        return identity_map(space)
    if kind == "tent":
        return tent_map()
    if kind == "rotation":
        if "half_turns" in d:
            return rotation(half_turns=d["half_turns"])
        return rotation(angle=float(parse_number(d["angle"])))
    if kind == "linear_anchors":
        return piecewise_linear(d["anchors"], d.get("name", ""))
    raise MapConstructionError(f"unknown map kind {kind!r}")
