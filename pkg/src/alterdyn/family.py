"""Families F = {f_n} of self-maps, their compositions, and the operators that
alter them (truncation, insertion, deletion, finite rearrangement).

Schedules are lazily indexed rules (``index(i)`` for ``i >= 1``), never
materialised lists.  Eventually periodic schedules are closed under every
operator and are kept in a canonical form, so two schedules producing the same
sequence compare equal.  Any other rule (such as the block rule of the shift
example) is wrapped in an ``AlteredSchedule``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

from .maps import MapDescriptor, MapKind, eval_map, shift_left, shift_right
from .spaces import Point, Space, SpaceMismatchError, space_spec


class FamilySchedule(ABC):
    space: Space

    @abstractmethod
    def index(self, i: int) -> MapDescriptor:
        """The map f_i (1-based)."""

    @abstractmethod
    def generators(self) -> tuple:
        """Every map that occurs at some index (finite, deduplicated)."""

    def maps(self, start: int, stop: int) -> list:
        """f_start, ..., f_stop inclusive."""
        return [self.index(i) for i in range(start, stop + 1)]

    @abstractmethod
    def describe(self) -> dict:
        """JSON-ready description of the rule."""


def _check_index(i: int):
    if i < 1:
        raise IndexError(f"schedule indices start at 1, got {i}")


def _dedupe_maps(maps) -> tuple:
    out = []
    for f in maps:
        if f not in out:
            out.append(f)
    return tuple(out)


def _minimal_period(cycle: tuple) -> tuple:
    n = len(cycle)
    for p in range(1, n + 1):
        if n % p == 0 and cycle == cycle[:p] * (n // p):
            return cycle[:p]
    return cycle


@dataclass(frozen=True)
class EventuallyPeriodic(FamilySchedule):
    """``prefix`` followed by ``cycle`` repeated forever.

    Covers both the eventually constant rule (cycle of length 1) and the
    periodic rule (empty prefix).
    """

    space: Space
    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        prefix, cycle = tuple(self.prefix), tuple(self.cycle)
        if not cycle:
            raise ValueError("the repeating part of a schedule cannot be empty")
        for f in prefix + cycle:
            if f.space != self.space:
                raise SpaceMismatchError(f"map {f} acts on {f.space}, schedule lives on {self.space}")
        cycle = _minimal_period(cycle)
        # absorb prefix entries that already follow the cycle
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = cycle[-1:] + cycle[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    def index(self, i: int) -> MapDescriptor:
        _check_index(i)
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.cycle[(i - len(self.prefix) - 1) % len(self.cycle)]

    def generators(self) -> tuple:
        return _dedupe_maps(self.prefix + self.cycle)

    def tail_after(self, k: int) -> "EventuallyPeriodic":
        if k <= len(self.prefix):
            return EventuallyPeriodic(self.space, self.prefix[k:], self.cycle)
        r = (k - len(self.prefix)) % len(self.cycle)
        return EventuallyPeriodic(self.space, (), self.cycle[r:] + self.cycle[:r])

    def describe(self) -> dict:
        from .maps import describe_map

        return {
            "rule": "eventually_periodic",
            "space": space_spec(self.space),
            "prefix": [describe_map(f) for f in self.prefix],
            "cycle": [describe_map(f) for f in self.cycle],
        }

    def __str__(self):
        head = ", ".join(map(str, self.prefix))
        body = ", ".join(map(str, self.cycle))
        return f"{{{head + '; ' if head else ''}({body})*}}"


def periodic(cycle: Sequence[MapDescriptor]) -> EventuallyPeriodic:
    cycle = tuple(cycle)
    return EventuallyPeriodic(cycle[0].space, (), cycle)


def eventually_constant(prefix: Sequence[MapDescriptor], tail: MapDescriptor) -> EventuallyPeriodic:
    return EventuallyPeriodic(tail.space, tuple(prefix), (tail,))


@dataclass(frozen=True)
class ShiftBlockRule:
    """sigma on [n(n+1)+1, (n+1)^2], sigma^-1 on [(n+1)^2+1, (n+1)(n+2)]."""

    window: int = 8

    def block(self, i: int) -> int:
        n = (math.isqrt(4 * i - 3) - 1) // 2
        while n * (n + 1) >= i:
            n -= 1
        while (n + 1) * (n + 2) < i:
            n += 1
        return n

    def __call__(self, i: int) -> MapDescriptor:
        n = self.block(i)
        if i <= (n + 1) ** 2:
            return shift_left(self.window)
        return shift_right(self.window)

    @property
    def alphabet(self) -> tuple:
        return (shift_left(self.window), shift_right(self.window))


@dataclass(frozen=True)
class BlockSchedule(FamilySchedule):
    """f_i produced by a named rule from the index alone."""

    space: Space
    name: str
    rule: Callable[[int], MapDescriptor]
    alphabet: tuple

    def index(self, i: int) -> MapDescriptor:
        _check_index(i)
        return self.rule(i)

    def generators(self) -> tuple:
        return _dedupe_maps(self.alphabet)

    def describe(self) -> dict:
        return {"rule": "block", "name": self.name, "space": space_spec(self.space)}

    def __str__(self):
        return f"block[{self.name}]"


@dataclass(frozen=True)
class AlteredSchedule(FamilySchedule):
    """``head`` followed by ``base`` with its first ``skip`` maps removed."""

    space: Space
    head: tuple
    base: FamilySchedule
    skip: int

    def index(self, i: int) -> MapDescriptor:
        _check_index(i)
        if i <= len(self.head):
            return self.head[i - 1]
        return self.base.index(self.skip + i - len(self.head))

    def generators(self) -> tuple:
        return _dedupe_maps(self.head + self.base.generators())

    def describe(self) -> dict:
        from .maps import describe_map

        return {
            "rule": "altered",
            "space": space_spec(self.space),
            "head": [describe_map(f) for f in self.head],
            "skip": self.skip,
            "base": self.base.describe(),
        }

    def __str__(self):
        head = ", ".join(map(str, self.head))
        return f"{{{head + '; ' if head else ''}{self.base} from {self.skip + 1}}}"


def _splice(base: FamilySchedule, head: Sequence[MapDescriptor], skip: int) -> FamilySchedule:
    """Schedule ``head + (f_{skip+1}, f_{skip+2}, ...)`` in canonical form."""
    head = tuple(head)
    for f in head:
        if f.space != base.space:
            raise SpaceMismatchError(f"map {f} acts on {f.space}, schedule lives on {base.space}")
    if isinstance(base, AlteredSchedule):
        inner_head = base.head
        if skip < len(inner_head):
            return _splice(base.base, head + inner_head[skip:], base.skip)
        return _splice(base.base, head, base.skip + skip - len(inner_head))
    if isinstance(base, EventuallyPeriodic):
        tail = base.tail_after(skip)
        return EventuallyPeriodic(base.space, head + tail.prefix, tail.cycle)
    if not head and skip == 0:
        return base
    return AlteredSchedule(base.space, head, base, skip)


def truncate(F: FamilySchedule, k: int) -> FamilySchedule:
    """The tail family {f_n : n >= k+1}."""
    if k < 0:
        raise ValueError("truncation depth must be >= 0")
    return _splice(F, (), k)


def insert_map(F: FamilySchedule, r: int, f: MapDescriptor) -> FamilySchedule:
    """Place ``f`` at position ``r``; later maps move one index up."""
    if r < 1:
        raise ValueError("insertion position must be >= 1")
    if f.space != F.space:
        raise SpaceMismatchError(f"cannot insert a map on {f.space} into a family on {F.space}")
    return _splice(F, tuple(F.maps(1, r - 1)) + (f,), r - 1)


def delete_map(F: FamilySchedule, k: int) -> FamilySchedule:
    """Remove f_k; later maps move one index down."""
    if k < 1:
        raise ValueError("deletion position must be >= 1")
    return _splice(F, tuple(F.maps(1, k - 1)), k)


def rearrange_finite(F: FamilySchedule, perm: Sequence[int]) -> FamilySchedule:
    """G_i = F_{perm[i-1]} for i <= m = len(perm), G_i = F_i beyond.

    ``perm`` lists the images pi(1), ..., pi(m) and must be a bijection of 1..m.
    """
    perm = [int(p) for p in perm]
    m = len(perm)
    if sorted(perm) != list(range(1, m + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{m}")
    return _splice(F, tuple(F.index(p) for p in perm), m)


def shift_block_family(window: int = 8) -> BlockSchedule:
    rule = ShiftBlockRule(window)
    return BlockSchedule(shift_left(window).space, "shift_block", rule, rule.alphabet)


def block_rearrangement_pair(window: int = 8):
    """The block family F and its infinite rearrangement G = (sigma, sigma^-1)*."""
    F = shift_block_family(window)
    G = periodic([shift_left(window), shift_right(window)])
    return F, G


def block_rearrange(F: FamilySchedule) -> FamilySchedule:
    """Replace the shift block family by its alternating rearrangement."""
    if isinstance(F, BlockSchedule) and isinstance(F.rule, ShiftBlockRule):
        return block_rearrangement_pair(F.rule.window)[1]
    raise ValueError("block rearrangement applies to the shift block family only")


# --------------------------------------------------------------------------
# compositions


def omega(F: FamilySchedule, n: int, p: Point) -> Point:
    """f_n o ... o f_1 (p); n = 0 is the identity."""
    return omega_window(F, 0, n, p)


def omega_window(F: FamilySchedule, n: int, k: int, p: Point) -> Point:
    """f_{n+k} o ... o f_{n+1} (p)."""
    if n < 0 or k < 0:
        raise ValueError("composition bounds must be non-negative")
    if p.space != F.space:
        raise SpaceMismatchError(f"family acts on {F.space}, got a point of {p.space}")
    x = p.value
    for i in range(n + 1, n + k + 1):
        x = F.index(i).eval_value(x)
    return Point(p.space, x)


@dataclass(frozen=True)
class OrbitTrace:
    seed: Point
    points: tuple

    @property
    def horizon(self) -> int:
        return len(self.points) - 1


def orbit(F: FamilySchedule, p: Point, N: int, start: int = 0) -> OrbitTrace:
    """[omega_0(p), ..., omega_N(p)].

    With ``start = n`` the trace is [p, omega^n_(n+1)(p), ..., omega^n_(n+N)(p)],
    i.e. entry ``k`` equals ``omega_window(F, n, k, p)``.
    """
    if start < 0:
        raise ValueError("start must be non-negative")
    pts = [p]
    for i in range(start + 1, start + N + 1):
        pts.append(eval_map(F.index(i), pts[-1]))
    return OrbitTrace(p, tuple(pts))


def displacement(F: FamilySchedule, N: int) -> list:
    """Net shift s(n) with omega_n = sigma**s(n), for n = 0..N (shift families)."""
    out = [0]
    for i in range(1, N + 1):
        kind = F.index(i).kind
        step = {MapKind.SHIFT_LEFT: 1, MapKind.SHIFT_RIGHT: -1, MapKind.IDENTITY: 0}.get(kind)
        if step is None:
            raise TypeError(f"map {F.index(i)} is not a shift")
        out.append(out[-1] + step)
    return out
