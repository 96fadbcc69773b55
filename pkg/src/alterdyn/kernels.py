"""Batched evaluation shared by the detectors.

Everything here is cached on ``(schedule, params)``: schedules and params are
immutable and hashable, so several detectors run on one system reuse the same
orbit tables.

Interval systems whose maps (up to the horizon) are rational and of degree at
most one are iterated in exact rational arithmetic.  In floating point every
number is dyadic, so the tent map sends every float to 0 in about 55 steps;
exact iteration keeps grid orbits honest over the whole horizon.  Results are
converted to float64 only after iteration.

On the shift space every map is sigma, sigma^-1 or the identity, so
omega_n = sigma**s(n) for a net displacement s(n) and images of cylinders are
cylinders.  Hits, diameters and divergences are computed exactly from s(n).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .family import FamilySchedule, displacement
from .maps import MapKind
from .spaces import (
    TWO_PI,
    Cylinder,
    OpenArc,
    Point,
    ShiftWord,
    SpaceKind,
    epsilon_net,
    sample_grid,
    space_grid,
)

CACHE_SIZE = 64


def _exact_capable(F: FamilySchedule, N: int) -> bool:
    if F.space.kind is not SpaceKind.INTERVAL:
        return False
    for f in F.maps(1, N):
        if f.kind is MapKind.IDENTITY:
            continue
        if not (f.is_exact and f.degree <= 1):
            return False
    return True


def orbit_values(F: FamilySchedule, values, N: int) -> np.ndarray:
    """Float table [len(values), N+1] of omega_n(x) for interval/circle seeds."""
    values = list(values)
    out = np.empty((len(values), N + 1))
    if _exact_capable(F, N) and all(isinstance(v, Fraction) for v in values):
        current = values
        out[:, 0] = [float(v) for v in current]
        for n in range(1, N + 1):
            f = F.index(n)
            memo = {}
            nxt = []
            for x in current:
                y = memo.get(x)
                if y is None:
                    y = memo[x] = f.eval_value(x)
                nxt.append(y)
            current = nxt
            out[:, n] = [float(v) for v in current]
        return out
    xs = np.array([float(v) for v in values])
    out[:, 0] = xs
    for n in range(1, N + 1):
        xs = F.index(n).eval_array(xs)
        out[:, n] = xs
    return out


def pairwise_distance(space_kind: SpaceKind, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a - b)
    if space_kind is SpaceKind.CIRCLE:
        d = np.mod(d, TWO_PI)
        d = np.minimum(d, TWO_PI - d)
    return d


def _membership(net, values: np.ndarray) -> np.ndarray:
    """Boolean [len(net), *values.shape]: value lies in net member."""
    if isinstance(net[0], OpenArc):
        start = np.array([u.start for u in net])
        length = np.array([u.length for u in net])
        shape = (len(net),) + (1,) * values.ndim
        off = np.mod(values[None] - start.reshape(shape), TWO_PI)
        return (off > 0) & (off < length.reshape(shape))
    a = np.array([float(u.a) for u in net])
    b = np.array([float(u.b) for u in net])
    shape = (len(net),) + (1,) * values.ndim
    return (values[None] > a.reshape(shape)) & (values[None] < b.reshape(shape))


# --------------------------------------------------------------------------
# shift helpers


def _net_bits(net) -> np.ndarray:
    return np.array([u.bits for u in net], dtype=np.int8)


def _compat(bits: np.ndarray, r: int, s: int) -> np.ndarray:
    """[C, C]: sigma**s(U) meets V, for cylinders on [-r, r]."""
    c_lo, c_hi = max(-r, -r - s), min(r, r - s)
    C = bits.shape[0]
    if c_lo > c_hi:
        return np.ones((C, C), dtype=bool)
    from_u = bits[:, c_lo + s + r : c_hi + s + r + 1]
    from_v = bits[:, c_lo + r : c_hi + r + 1]
    return (from_u[:, None, :] == from_v[None, :, :]).all(-1)


def _window_mask(window: int, lo: int, hi: int) -> list:
    return [i for i in range(-window, window + 1) if not lo <= i <= hi]


# --------------------------------------------------------------------------
# hit tables: which net pairs (U, V) meet at which times


@dataclass
class HitTable:
    net: list
    hits: np.ndarray  # [C, C, N] bool, column j is time j+1
    _witness: object

    def witness(self, u: int, v: int, n: int) -> Point:
        """A point p in net[u] with omega_n(p) in net[v]."""
        return self._witness(u, v, n)


@lru_cache(maxsize=CACHE_SIZE)
def net_seeds(F: FamilySchedule, params) -> tuple:
    net = epsilon_net(F.space, params.epsilon)
    seeds = [sample_grid(u, params.grid) for u in net]
    return net, seeds


@lru_cache(maxsize=CACHE_SIZE)
def net_orbits(F: FamilySchedule, params) -> np.ndarray:
    """[C, R, N+1] orbit table of the grid points of every net member."""
    net, seeds = net_seeds(F, params)
    flat = [p.value for group in seeds for p in group]
    table = orbit_values(F, flat, params.horizon)
    return table.reshape(len(net), len(seeds[0]), params.horizon + 1)


@lru_cache(maxsize=CACHE_SIZE)
def hit_table(F: FamilySchedule, params) -> HitTable:
    N = params.horizon
    if F.space.kind is SpaceKind.SHIFT:
        net = epsilon_net(F.space, params.epsilon)
        r = -net[0].lo
        bits = _net_bits(net)
        s = displacement(F, N)
        by_shift = {k: _compat(bits, r, k) for k in sorted(set(s[1:]))}
        hits = np.stack([by_shift[s[n]] for n in range(1, N + 1)], axis=-1)

        def witness(u, v, n):
            coords = {i: net[u].bits[i + r] for i in range(-r, r + 1)}
            for i in range(-r, r + 1):
                j = i + s[n]
                b = net[v].bits[i + r]
                if coords.get(j, b) != b:
                    raise ValueError(f"sigma^{s[n]} of cylinder {u} misses cylinder {v}")
                coords[j] = b
            return Point(F.space, ShiftWord.from_coords(coords))

        return HitTable(net, hits, witness)

    net, seeds = net_seeds(F, params)
    table = net_orbits(F, params)
    C = len(net)
    hits = np.zeros((C, C, N), dtype=bool)
    first = np.full((C, C, N), -1, dtype=np.int32)
    for u in range(C):
        inside = _membership(net, table[u, :, 1:])  # [C_v, R, N]
        any_in = inside.any(axis=1)
        hits[u] = any_in
        first[u] = np.where(any_in, inside.argmax(axis=1), -1)

    def witness(u, v, n):
        idx = int(first[u, v, n - 1])
        if idx < 0:
            raise ValueError(f"no grid point of net member {u} reaches {v} at time {n}")
        return seeds[u][idx]

    return HitTable(net, hits, witness)


# --------------------------------------------------------------------------
# expansion: diameters of omega_n(U)


@dataclass
class ExpansionTable:
    net: list
    diam: np.ndarray  # [C, N+1]
    _pair: object

    def witness_pair(self, u: int, n: int):
        """Two points of net[u] whose images at time n realise diam[u, n]."""
        return self._pair(u, n)


@lru_cache(maxsize=CACHE_SIZE)
def expansion_table(F: FamilySchedule, params) -> ExpansionTable:
    N = params.horizon
    if F.space.kind is SpaceKind.SHIFT:
        net = epsilon_net(F.space, params.epsilon)
        r = -net[0].lo
        W = F.space.window
        s = displacement(F, N)
        per_shift = {}
        for k in set(s):
            free = _window_mask(W, -r - k, r - k)
            per_shift[k] = (free, sum(2.0 ** -abs(i) for i in free))
        diam = np.array([[per_shift[s[n]][1] for n in range(N + 1)]] * len(net))

        def pair(u, n):
            free, _ = per_shift[s[n]]
            x = ShiftWord(net[u].lo, net[u].bits)
            coords = {i: x.at(i) for i in range(-r, r + 1)}
            for i in free:
                coords[i + s[n]] = 1
            return Point(F.space, x), Point(F.space, ShiftWord.from_coords(coords))

        return ExpansionTable(net, diam, pair)

    net, seeds = net_seeds(F, params)
    table = net_orbits(F, params)
    C, R, _ = table.shape
    diam = np.zeros((C, N + 1))
    arg = np.zeros((C, N + 1, 2), dtype=np.int32)
    if F.space.kind is SpaceKind.INTERVAL:
        hi, lo = table.argmax(axis=1), table.argmin(axis=1)
        diam = table.max(axis=1) - table.min(axis=1)
        arg[..., 0], arg[..., 1] = lo, hi
    else:
        for u in range(C):
            d = pairwise_distance(SpaceKind.CIRCLE, table[u][:, None, :], table[u][None, :, :])
            flat = d.reshape(R * R, N + 1)
            best = flat.argmax(axis=0)
            diam[u] = flat[best, np.arange(N + 1)]
            arg[u, :, 0], arg[u, :, 1] = best // R, best % R

    def pair(u, n):
        i, j = arg[u, n]
        return seeds[u][int(i)], seeds[u][int(j)]

    return ExpansionTable(net, diam, pair)


# --------------------------------------------------------------------------
# pair divergence for equicontinuity


@dataclass
class PairDivergence:
    first: list  # points
    second: list
    initial: np.ndarray  # d(x, y)
    worst: np.ndarray  # max_{1<=n<=N} d(omega_n x, omega_n y)
    worst_time: np.ndarray


@lru_cache(maxsize=CACHE_SIZE)
def pair_divergence(F: FamilySchedule, params) -> PairDivergence:
    """Initial distance and worst later distance for every grid pair.

    On the shift space the maps commute with coordinatewise XOR and the metric
    is XOR-invariant, so the pairs (0, e) over all difference patterns e on
    [-R, R] cover every pair of grid words.
    """
    N = params.horizon
    space = F.space
    if space.kind is SpaceKind.SHIFT:
        W = space.window
        R = min(params.grid, W)
        s = displacement(F, N)
        patterns = np.array(
            [[(k >> (2 * R - j)) & 1 for j in range(2 * R + 1)] for k in range(1, 2 ** (2 * R + 1))],
            dtype=np.float64,
        )
        coords = np.arange(-R, R + 1)

        def weights(k):
            idx = coords - k
            return np.where(np.abs(idx) <= W, 2.0 ** -np.abs(idx).astype(float), 0.0)

        per_shift = {k: patterns @ weights(k) for k in set(s)}
        dist = np.stack([per_shift[s[n]] for n in range(N + 1)], axis=1)
        zero = Point(space, ShiftWord())
        others = [Point(space, ShiftWord(-R, tuple(int(b) for b in row))) for row in patterns]
        later = dist[:, 1:]
        return PairDivergence(
            [zero] * len(others), others, dist[:, 0], later.max(axis=1), later.argmax(axis=1) + 1
        )

    grid = space_grid(space, params.grid)
    table = orbit_values(F, [p.value for p in grid], N)
    P = len(grid)
    iu, ju = np.triu_indices(P, k=1)
    initial = pairwise_distance(space.kind, table[iu, 0], table[ju, 0])
    worst = np.zeros_like(initial)
    worst_time = np.ones(len(initial), dtype=np.int64)
    for n in range(1, N + 1):
        d = pairwise_distance(space.kind, table[iu, n], table[ju, n])
        better = d > worst
        worst = np.where(better, d, worst)
        worst_time = np.where(better, n, worst_time)
    return PairDivergence([grid[i] for i in iu], [grid[j] for j in ju], initial, worst, worst_time)


# --------------------------------------------------------------------------
# orbit coverage for minimality


@lru_cache(maxsize=CACHE_SIZE)
def coverage(F: FamilySchedule, params):
    """(seeds, net, covered[P, C]): orbit of seed p (times 0..N) visits net[c]."""
    N = params.horizon
    space = F.space
    net = epsilon_net(space, params.epsilon)
    seeds = space_grid(space, params.grid)
    if space.kind is SpaceKind.SHIFT:
        r = -net[0].lo
        index = {u.bits: c for c, u in enumerate(net)}
        covered = np.zeros((len(seeds), len(net)), dtype=bool)
        shifts = sorted(set(displacement(F, N)))
        for p, seed in enumerate(seeds):
            for k in shifts:
                covered[p, index[seed.value.coords(-r + k, r + k)]] = True
        return seeds, net, covered
    table = orbit_values(F, [p.value for p in seeds], N)  # [P, N+1]
    inside = _membership(net, table)  # [C, P, N+1]
    return seeds, net, inside.any(axis=2).T


def clear_caches():
    for fn in (net_seeds, net_orbits, hit_table, expansion_table, pair_divergence, coverage):
        fn.cache_clear()


def is_cylinder_net(net) -> bool:
    return isinstance(net[0], Cylinder)
