"""Brute-force reference computations, written without the package's kernels.

Everything here works on plain Python values (Fractions, floats, dicts of
coordinates) so it can be used to cross-check the vectorised detectors.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def tent(x):
    return 2 * x if x <= Fraction(1, 2) else 2 - 2 * x


def shift_dist(x: dict, y: dict, window: int) -> float:
    return sum(2.0 ** -abs(i) for i in range(-window, window + 1) if x.get(i, 0) != y.get(i, 0))


def words_on(lo: int, hi: int):
    """All 0/1 assignments on indices lo..hi as dicts."""
    idx = list(range(lo, hi + 1))
    for bits in itertools.product((0, 1), repeat=len(idx)):
        yield dict(zip(idx, bits))


def cylinder_members(lo: int, bits, window: int):
    """All window words agreeing with ``bits`` on lo.. (zero outside the window)."""
    fixed = {lo + j: b for j, b in enumerate(bits)}
    free = [i for i in range(-window, window + 1) if i not in fixed]
    for vals in itertools.product((0, 1), repeat=len(free)):
        w = dict(fixed)
        w.update(zip(free, vals))
        yield w


def cylinder_diameter(lo: int, bits, window: int) -> float:
    members = list(cylinder_members(lo, bits, window))
    return max(shift_dist(a, b, window) for a in members for b in members)


def shift_apply(word: dict, s: int) -> dict:
    """sigma**s with sigma(x)_i = x_{i+1}."""
    return {i - s: b for i, b in word.items()}


def block_map_is_left(i: int) -> bool:
    """The block rule by direct enumeration of blocks."""
    n = 0
    while True:
        a, b, c = n * (n + 1) + 1, (n + 1) ** 2, (n + 1) * (n + 2)
        if a <= i <= b:
            return True
        if b < i <= c:
            return False
        n += 1


def first_hits_interval(step, centers_and_radius, seeds_per_ball, N):
    """For every (u, v): smallest n in 1..N such that some seed of u lands in v."""
    balls = centers_and_radius
    out = {}
    for u, seeds in enumerate(seeds_per_ball):
        orbits = []
        for x in seeds:
            orb, y = [], x
            for _ in range(N):
                y = step(y)
                orb.append(y)
            orbits.append(orb)
        for v, (a, b) in enumerate(balls):
            first = None
            for n in range(N):
                if any(a < orb[n] < b for orb in orbits):
                    first = n + 1
                    break
            out[u, v] = first
    return out


def circle_dist(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)
