"""Witness searches for the dynamical properties of a non-autonomous system.

Every quantifier the definitions leave infinite is bounded by ``DetectorParams``:
open sets range over an epsilon-net, points over a deterministic grid, times
over ``1..horizon``.  A search therefore has three outcomes:

* ``WITNESSED``: the existential property was exhibited (with replayable
  evidence), or the universal property survived every test at this scale;
* ``REFUTED``: a counterexample to a universal property was found;
* ``NO_WITNESS_AT_SCALE``: the existential search came back empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import kernels
from .family import FamilySchedule, omega
from .maps import is_feeble_open
from .spaces import (
    Point,
    Space,
    SpaceKind,
    distance,
    epsilon_net,
    format_value,
    net_diameter_bound,
)

DEFAULT_DELTAS = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16))
EPSILON_LADDER = (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16))


class Status(str, Enum):
    WITNESSED = "WITNESSED"
    REFUTED = "REFUTED"
    NO_WITNESS_AT_SCALE = "NO_WITNESS_AT_SCALE"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class DetectorParams:
    epsilon: object
    horizon: int = 64
    grid: int = 128
    deltas: tuple = DEFAULT_DELTAS
    tol: float = 1e-9
    gap: int = 3

    def __post_init__(self):
        if not float(self.epsilon) > 0:
            raise ValueError("epsilon must be positive")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.grid < 1:
            raise ValueError("grid resolution must be >= 1")
        deltas = tuple(self.deltas)
        if not deltas or any(float(d) <= 0 for d in deltas):
            raise ValueError("delta list must be non-empty and positive")
        if any(not float(a) > float(b) for a, b in zip(deltas, deltas[1:])):
            raise ValueError("delta list must be strictly decreasing")
        if self.gap < 1:
            raise ValueError("gap bound must be >= 1")
        object.__setattr__(self, "deltas", deltas)

    @classmethod
    def defaults(cls, space: Space, **overrides) -> "DetectorParams":
        """Scale at which every fixture resolves: nets of 1/16 of the space
        diameter on the interval and circle, cylinders on [-3, 3] and difference
        patterns on [-6, 6] on the shift."""
        if space.kind is SpaceKind.INTERVAL:
            base = dict(epsilon=Fraction(1, 16))
        elif space.kind is SpaceKind.CIRCLE:
            base = dict(epsilon=math.pi / 16)
        else:
            base = dict(epsilon=Fraction(1, 8), grid=min(6, space.window))
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def replace(self, **changes) -> "DetectorParams":
        d = self.__dict__.copy()
        d.update({k: v for k, v in changes.items() if v is not None})
        return DetectorParams(**d)

    def to_dict(self) -> dict:
        return {
            "epsilon": _num(self.epsilon),
            "horizon": self.horizon,
            "grid": self.grid,
            "deltas": [_num(d) for d in self.deltas],
            "tol": self.tol,
            "gap": self.gap,
        }


def _num(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


@dataclass
class PropertyVerdict:
    property: str
    params: DetectorParams
    status: Status
    witnesses: dict = field(default_factory=dict)
    summary: str = ""

    @property
    def witnessed(self) -> bool:
        return self.status is Status.WITNESSED

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "status": self.status.value,
            "summary": self.summary,
            "params": self.params.to_dict(),
            "witnesses": self.witnesses,
        }


def _pt(p: Point) -> str:
    return format_value(p.space, p.value)


def _params_for(F: FamilySchedule, params):
    return params if params is not None else DetectorParams.defaults(F.space)


# --------------------------------------------------------------------------
# transitivity and mixing


def _first_times(hits: np.ndarray) -> np.ndarray:
    """[C, C] earliest hitting time (1-based), 0 where none."""
    any_hit = hits.any(axis=2)
    return np.where(any_hit, hits.argmax(axis=2) + 1, 0)


def check_transitivity(F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    params = _params_for(F, params)
    table = kernels.hit_table(F, params)
    first = _first_times(table.hits)
    C = len(table.net)
    if (first > 0).all():
        u, v = np.unravel_index(int(first.argmax()), first.shape)
        n = int(first[u, v])
        return PropertyVerdict(
            "transitivity",
            params,
            Status.WITNESSED,
            {
                "net_size": C,
                "first_hit_times": first.tolist(),
                "hardest": {"u": int(u), "v": int(v), "n": n, "point": _pt(table.witness(u, v, n))},
            },
            f"all {C * C} net pairs connected by time {n}",
        )
    missing = np.argwhere(first == 0)
    u, v = (int(x) for x in missing[0])
    return PropertyVerdict(
        "transitivity",
        params,
        Status.NO_WITNESS_AT_SCALE,
        {
            "net_size": C,
            "unconnected_pairs": int(len(missing)),
            "example": {"u": u, "v": v, "U": str(table.net[u]), "V": str(table.net[v])},
        },
        f"{len(missing)} of {C * C} net pairs never meet up to time {params.horizon}",
    )


def _common_time_search(rows: np.ndarray, chunk: int = 512):
    """For boolean rows [M, T], find (i, j) with no common True, or None."""
    mat = rows.astype(np.float32)
    for start in range(0, len(mat), chunk):
        prod = mat[start : start + chunk] @ mat.T
        zero = np.argwhere(prod == 0)
        if len(zero):
            i, j = zero[0]
            return int(start + i), int(j)
    return None


def check_weak_mixing(F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    """Every quadruple (U1, V1, U2, V2) of net members shares a hitting time."""
    params = _params_for(F, params)
    table = kernels.hit_table(F, params)
    C = len(table.net)
    rows = table.hits.reshape(C * C, -1)
    # quadruples only see the distinct hit patterns
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    fail = _common_time_search(uniq)
    if fail is not None:
        a = int(np.flatnonzero(inverse == fail[0])[0])
        b = int(np.flatnonzero(inverse == fail[1])[0])
        (u1, v1), (u2, v2) = divmod(a, C), divmod(b, C)
        return PropertyVerdict(
            "weak_mixing",
            params,
            Status.NO_WITNESS_AT_SCALE,
            {"net_size": C, "example": {"u1": u1, "v1": v1, "u2": u2, "v2": v2}},
            f"pairs ({u1},{v1}) and ({u2},{v2}) never meet at a common time up to {params.horizon}",
        )
    # hardest quadruple: largest earliest common time among distinct patterns
    M = len(uniq)
    earliest = np.zeros((M, M), dtype=np.int64)
    for t in range(uniq.shape[1]):
        col = uniq[:, t]
        newly = (earliest == 0) & col[:, None] & col[None, :]
        earliest[newly] = t + 1
    i, j = np.unravel_index(int(earliest.argmax()), earliest.shape)
    n = int(earliest[i, j])
    a = int(np.flatnonzero(inverse == i)[0])
    b = int(np.flatnonzero(inverse == j)[0])
    (u1, v1), (u2, v2) = divmod(a, C), divmod(b, C)
    return PropertyVerdict(
        "weak_mixing",
        params,
        Status.WITNESSED,
        {
            "net_size": C,
            "distinct_hit_patterns": M,
            "hardest": {
                "u1": u1, "v1": v1, "u2": u2, "v2": v2, "n": n,
                "point1": _pt(table.witness(u1, v1, n)),
                "point2": _pt(table.witness(u2, v2, n)),
            },
        },
        f"every quadruple shares a hitting time; latest needed is {n}",
    )


def _cofinite_start(flags: np.ndarray) -> np.ndarray:
    """Per row of [.., N] flags (time j+1 in column j): least K with all times >= K set."""
    N = flags.shape[-1]
    missing = ~flags
    last_miss = np.where(missing.any(axis=-1), N - np.argmax(missing[..., ::-1], axis=-1), 0)
    return last_miss + 1


def check_topological_mixing(F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    params = _params_for(F, params)
    table = kernels.hit_table(F, params)
    C = len(table.net)
    N = params.horizon
    K = _cofinite_start(table.hits)
    bound = N // 2
    if (K <= bound).all():
        u, v = np.unravel_index(int(K.argmax()), K.shape)
        k = int(K[u, v])
        return PropertyVerdict(
            "topological_mixing",
            params,
            Status.WITNESSED,
            {
                "net_size": C,
                "K": K.tolist(),
                "hardest": {"u": int(u), "v": int(v), "K": k, "point_at_K": _pt(table.witness(u, v, k))},
            },
            f"every net pair meets at all times in [K, {N}] with K <= {k}",
        )
    bad = np.argwhere(K > bound)
    u, v = (int(x) for x in bad[0])
    last = int(K[u, v]) - 1
    return PropertyVerdict(
        "topological_mixing",
        params,
        Status.NO_WITNESS_AT_SCALE,
        {"net_size": C, "failing_pairs": int(len(bad)), "example": {"u": u, "v": v, "last_miss": last}},
        f"{len(bad)} net pairs still miss after time {bound} (e.g. pair ({u},{v}) at time {last})",
    )


# --------------------------------------------------------------------------
# sensitivity


def expansion_floor(F: FamilySchedule, params: DetectorParams) -> float:
    """Smallest admissible sensitivity constant.

    A net member of diameter D can spread to about D under a merely Lipschitz
    step, so only constants of at least twice the largest net diameter count
    as expansion at this scale.
    """
    net = epsilon_net(F.space, params.epsilon)
    return 2 * net_diameter_bound(net)


def _admissible(F, params) -> list:
    floor = expansion_floor(F, params)
    return [d for d in params.deltas if float(d) >= floor - 1e-12]


def _sensitivity(F, params, name, criterion):
    table = kernels.expansion_table(F, params)
    N = params.horizon
    candidates = _admissible(F, params)
    C = len(table.net)
    floor = expansion_floor(F, params)
    if not candidates:
        return PropertyVerdict(
            name, params, Status.NO_WITNESS_AT_SCALE,
            {"expansion_floor": floor},
            f"no delta in the list reaches the expansion floor {floor:.4g}",
        )
    for delta in candidates:
        expanded = table.diam[:, 1:] > float(delta)  # [C, N]
        ok, per_ball = criterion(expanded)
        if ok:
            u = int(np.argmax(per_ball))
            n = int(expanded[u].argmax()) + 1
            p, q = table.witness_pair(u, n)
            return PropertyVerdict(
                name, params, Status.WITNESSED,
                {
                    "delta": _num(delta),
                    "expansion_floor": floor,
                    "per_ball": [int(x) for x in per_ball],
                    "hardest": {"u": u, "n": n, "pair": [_pt(p), _pt(q)], "diameter": float(table.diam[u, n])},
                },
                f"sensitive with delta={delta}",
            )
    delta = candidates[-1]
    expanded = table.diam[:, 1:] > float(delta)
    ok, per_ball = criterion(expanded)
    bad = [u for u in range(C) if per_ball[u] < 0]
    u = bad[0] if bad else 0
    return PropertyVerdict(
        name, params, Status.NO_WITNESS_AT_SCALE,
        {
            "smallest_delta_tried": _num(delta),
            "expansion_floor": floor,
            "failing_balls": len(bad),
            "example": {"u": u, "U": str(table.net[u]), "max_diameter": float(table.diam[u, 1:].max())},
        },
        f"{len(bad)} net members fail at delta={delta} up to time {N}",
    )


def check_sensitivity(F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    """Largest admissible delta such that every net member expands past it."""
    params = _params_for(F, params)

    def criterion(expanded):
        any_exp = expanded.any(axis=1)
        per_ball = np.where(any_exp, expanded.argmax(axis=1) + 1, -1)
        return bool(any_exp.all()), per_ball

    return _sensitivity(F, params, "sensitivity", criterion)


def check_cofinite_sensitivity(F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    """Expansion past delta at every time in [K, N], some K <= N/2, for every net member."""
    params = _params_for(F, params)
    bound = params.horizon // 2

    def criterion(expanded):
        K = _cofinite_start(expanded)
        per_ball = np.where(K <= bound, K, -1)
        return bool((K <= bound).all()), per_ball

    return _sensitivity(F, params, "cofinite_sensitivity", criterion)


def check_syndetic_sensitivity(F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    """Expansion times of every net member leave no gap longer than ``params.gap``."""
    params = _params_for(F, params)
    g = params.gap
    N = params.horizon

    def criterion(expanded):
        per_ball = []
        for row in expanded:
            times = np.flatnonzero(row) + 1
            # every window of g consecutive times must contain an expansion
            if len(times) and N - times[-1] < g:
                worst = int(np.diff(np.concatenate([[0], times])).max())
                per_ball.append(worst if worst <= g else -1)
            else:
                per_ball.append(-1)
        per_ball = np.array(per_ball)
        return bool((per_ball > 0).all()), per_ball

    return _sensitivity(F, params, "syndetic_sensitivity", criterion)


# --------------------------------------------------------------------------
# equicontinuity


def _delta_candidates(params: DetectorParams, separation: float) -> list:
    out = [d for d in params.deltas if float(d) > separation]
    d = params.deltas[-1]
    while float(d) / 2 > separation:
        d = d / 2
        out.append(d)
    return out


def check_equicontinuity(F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    """For each epsilon in 1/4, 1/8, 1/16, look for a delta whose grid pairs stay epsilon-close.

    Candidate deltas are the delta list extended by halving, down to the grid's
    closest pair (below that no pair is tested and survival would be vacuous).
    """
    params = _params_for(F, params)
    div = kernels.pair_divergence(F, params)
    separation = float(div.initial[div.initial > 0].min())
    candidates = _delta_candidates(params, separation)
    modulus = {}
    for eps in EPSILON_LADDER:
        chosen = None
        for delta in candidates:
            close = div.initial < float(delta)
            if not close.any() or div.worst[close].max() < float(eps):
                chosen = delta
                break
        if chosen is None:
            delta = candidates[-1]
            close = np.flatnonzero(div.initial < float(delta))
            k = int(close[np.argmax(div.worst[close])])
            x, y = div.first[k], div.second[k]
            n = int(div.worst_time[k])
            return PropertyVerdict(
                "equicontinuity", params, Status.REFUTED,
                {
                    "epsilon": _num(eps),
                    "smallest_delta": _num(delta),
                    "pair": [_pt(x), _pt(y)],
                    "initial_distance": float(div.initial[k]),
                    "n": n,
                    "distance_at_n": float(div.worst[k]),
                },
                f"for epsilon={eps} every delta down to {delta} fails: pair diverges to {div.worst[k]:.4g} at time {n}",
            )
        modulus[str(eps)] = _num(chosen)
    return PropertyVerdict(
        "equicontinuity", params, Status.WITNESSED,
        {"at_scale": True, "modulus": modulus, "grid_separation": separation},
        "no counterexample at scale; modulus " + ", ".join(f"eps={e}: delta={d}" for e, d in modulus.items()),
    )


# --------------------------------------------------------------------------
# minimality, proximality, periodic points


def check_minimality(F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    """Every grid seed's orbit (times 0..N) must visit every net member."""
    params = _params_for(F, params)
    seeds, net, covered = kernels.coverage(F, params)
    bad = np.argwhere(~covered)
    if len(bad):
        p, c = (int(x) for x in bad[0])
        return PropertyVerdict(
            "minimality", params, Status.REFUTED,
            {"seed": _pt(seeds[p]), "missed": str(net[c]), "missed_index": c},
            f"orbit of {_pt(seeds[p])} never enters {net[c]} up to time {params.horizon}",
        )
    return PropertyVerdict(
        "minimality", params, Status.WITNESSED,
        {"at_scale": True, "seeds": len(seeds), "net_size": len(net)},
        f"all {len(seeds)} grid orbits visit all {len(net)} net members",
    )


def check_proximal(F: FamilySchedule, x: Point, y: Point, params: DetectorParams = None) -> PropertyVerdict:
    params = _params_for(F, params)
    best, best_n, first_close = None, None, None
    px, py = x, y
    for n in range(1, params.horizon + 1):
        px = omega_step(F, n, px)
        py = omega_step(F, n, py)
        d = distance(px, py)
        if best is None or d < best:
            best, best_n = d, n
        if first_close is None and d < params.tol:
            first_close = n
    evidence = {"pair": [_pt(x), _pt(y)], "argmin": best_n, "min_distance": _num(best)}
    if first_close is not None:
        evidence["n"] = first_close
        return PropertyVerdict(
            "proximal", params, Status.WITNESSED, evidence,
            f"orbits within {params.tol:g} at time {first_close}",
        )
    return PropertyVerdict(
        "proximal", params, Status.NO_WITNESS_AT_SCALE, evidence,
        f"orbit distance stays >= {float(best):.6g} up to time {params.horizon}",
    )


def omega_step(F: FamilySchedule, n: int, p: Point) -> Point:
    return Point(p.space, F.index(n).eval_value(p.value))


def check_periodic_point(F: FamilySchedule, p: Point, n: int, K: int, tol: float = 1e-9) -> PropertyVerdict:
    """omega_{nk}(p) = p for k = 1..K."""
    if n < 1 or K < 1:
        raise ValueError("period and repetition count must be >= 1")
    params = DetectorParams(epsilon=Fraction(1, 16), horizon=n * K, tol=tol)
    q = p
    for k in range(1, K + 1):
        for i in range(n * (k - 1) + 1, n * k + 1):
            q = omega_step(F, i, q)
        d = distance(q, p)
        if not d < tol:
            return PropertyVerdict(
                "periodic_point", params, Status.REFUTED,
                {"point": _pt(p), "period": n, "k": k, "image": _pt(q), "distance": _num(d)},
                f"omega_{n * k}(p) is {float(d):.4g} away from p",
            )
    return PropertyVerdict(
        "periodic_point", params, Status.WITNESSED,
        {"point": _pt(p), "period": n, "checked_k": K, "at_scale": True},
        f"omega_(n*k)(p) = p for n={n}, k=1..{K}",
    )


def family_is_feeble_open(F: FamilySchedule, m: int = 64) -> bool:
    return all(is_feeble_open(F.index(i)) for i in range(1, m + 1)) and all(
        is_feeble_open(f) for f in F.generators()
    )


SET_DETECTORS = {
    "transitivity": check_transitivity,
    "weak_mixing": check_weak_mixing,
    "topological_mixing": check_topological_mixing,
    "sensitivity": check_sensitivity,
    "cofinite_sensitivity": check_cofinite_sensitivity,
    "syndetic_sensitivity": check_syndetic_sensitivity,
    "equicontinuity": check_equicontinuity,
    "minimality": check_minimality,
}


def run_detector(name: str, F: FamilySchedule, params: DetectorParams = None) -> PropertyVerdict:
    try:
        fn = SET_DETECTORS[name]
    except KeyError:
        raise KeyError(f"unknown property {name!r}; known: {', '.join(SET_DETECTORS)}") from None
    return fn(F, params)


__all__ = [
    "DetectorParams", "PropertyVerdict", "Status", "check_transitivity", "check_weak_mixing",
    "check_topological_mixing", "check_sensitivity", "check_cofinite_sensitivity",
    "check_syndetic_sensitivity", "check_equicontinuity", "check_minimality", "check_proximal",
    "check_periodic_point", "family_is_feeble_open", "run_detector", "SET_DETECTORS", "omega",
]
