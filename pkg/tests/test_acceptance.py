"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line; run with ``-s`` to see them.
"""

import functools
import math
import time
from fractions import Fraction

from alterdyn import kernels
from alterdyn.detectors import DetectorParams, Status, check_proximal, run_detector
from alterdyn.family import omega, omega_window, orbit, truncate
from alterdyn.fixtures import REGISTRY, all_maps, get_fixture
from alterdyn.maps import eval_map, image_of, is_feeble_open, preimages
from alterdyn.spaces import (
    Cylinder,
    OpenArc,
    Point,
    ShiftWord,
    SpaceKind,
    distance,
    epsilon_net,
    sample_grid,
    space_grid,
)

W, NW, R = Status.WITNESSED, Status.NO_WITNESS_AT_SCALE, Status.REFUTED
MIXING = ("transitivity", "weak_mixing", "topological_mixing")


def criterion(number, title):
    def wrap(test):
        @functools.wraps(test)
        def run(*args, **kwargs):
            try:
                detail = test(*args, **kwargs)
            except Exception as exc:
                print(f"\nFAIL [{number:2d}] {title}: {type(exc).__name__}: {exc}")
                raise
            print(f"\nPASS [{number:2d}] {title}" + (f": {detail}" if detail else ""))

        return run

    return wrap


def status(name, F, **overrides):
    return run_detector(name, F, DetectorParams.defaults(F.space, **overrides))


def proximal(entry, F, x, y, **overrides):
    params = DetectorParams.defaults(F.space, **overrides)
    return check_proximal(F, entry.point(x), entry.point(y), params)


def close(p, q, tol=1e-12):
    if p.value == q.value or p.space.kind is SpaceKind.SHIFT:
        return p.value == q.value
    return distance(p, q) <= tol


def seeds(space, count=25):
    # shift grids enumerate 2**(2r+1) words; r = 2 already gives 32
    return space_grid(space, 2 if space.kind is SpaceKind.SHIFT else count)[:count]


@criterion(1, "composition identity")
def test_composition_identity():
    start = time.perf_counter()
    checked = 0
    for name, entry in REGISTRY.items():
        F = entry.schedule
        for j, seed in enumerate(seeds(F.space)):
            trace = orbit(F, seed, 40).points
            assert trace[40] == omega(F, 40, seed)
            for k in range(1, 40):
                # entry m of a trace started at k is omega_window(F, k, m, .)
                window = orbit(F, trace[k], 40 - k, start=k).points
                for n in range(k + 1, 41):
                    assert close(trace[n], window[n - k]), (name, seed, k, n)
                    checked += 1
                if j % 12 == 0:
                    assert close(trace[40], omega_window(F, k, 40 - k, trace[k])), (name, seed, k)
    elapsed = time.perf_counter() - start
    assert elapsed < 5, f"{elapsed:.2f}s"
    return f"{checked} (k, n, seed) triples over {len(REGISTRY)} fixtures in {elapsed:.2f}s"


@criterion(2, "prox1: (0,1) not proximal, proximal after one truncation")
def test_prox1():
    entry = get_fixture("prox1")
    F = entry.schedule
    v = proximal(entry, F, 0, 1, horizon=200)
    assert v.status is NW
    assert Fraction(v.witnesses["min_distance"]) == Fraction(2, 3)
    t = proximal(entry, truncate(F, 1), 0, 1)
    assert t.status is W and t.witnesses["n"] == 1
    return f"min distance {v.witnesses['min_distance']}, truncated hit at n=1"


@criterion(3, "prox3: (0.9,1) proximal, never proximal after truncation")
def test_prox3():
    entry = get_fixture("prox3")
    F = entry.schedule
    x, y = Fraction(9, 10), Fraction(1)
    v = proximal(entry, F, x, y)
    assert v.status is W and v.witnesses["n"] == 1
    t = proximal(entry, truncate(F, 1), x, y, horizon=200)
    assert t.status is NW
    assert abs(float(Fraction(t.witnesses["min_distance"])) - 0.1) <= 1e-12
    return f"truncated min distance {t.witnesses['min_distance']} over 200 steps"


@criterion(4, "prox2: interior pair proximal, not after truncation")
def test_prox2():
    entry = get_fixture("prox2")
    F = entry.schedule
    x, y = math.pi / 4, math.pi / 2
    v = proximal(entry, F, x, y, horizon=64, tol=1e-9)
    assert v.status is W
    t = proximal(entry, truncate(F, 1), x, y, horizon=64)
    assert t.status is NW
    assert abs(float(t.witnesses["min_distance"]) - math.pi / 4) <= 1e-12
    return f"proximal at n={v.witnesses['n']}, truncated min {float(t.witnesses['min_distance']):.12f}"


@criterion(5, "sens: nothing witnessed, everything witnessed after truncation")
def test_sens():
    kernels.clear_caches()
    start = time.perf_counter()
    F = get_fixture("sens").schedule
    names = MIXING + ("sensitivity",)
    base = {n: status(n, F) for n in names}
    trunc = {n: status(n, truncate(F, 1)) for n in names}
    elapsed = time.perf_counter() - start
    assert all(v.status is NW for v in base.values()), {n: v.status for n, v in base.items()}
    assert all(v.status is W for v in trunc.values()), {n: v.status for n, v in trunc.items()}
    assert trunc["sensitivity"].witnesses["delta"] == "1/2"
    assert elapsed < 60, f"{elapsed:.2f}s"
    return f"delta 1/2, {elapsed:.2f}s"


@criterion(6, "feeble-open transfer under truncation (tent)")
def test_feeble_open_transfer():
    F = get_fixture("tent_autonomous").schedule
    names = MIXING + ("sensitivity", "cofinite_sensitivity", "syndetic_sensitivity")
    base = {n: status(n, F) for n in names}
    for k in (1, 2, 3):
        Fk = truncate(F, k)
        for n in names:
            v = status(n, Fk)
            assert v.status is base[n].status, (k, n)
            if n.endswith("sensitivity"):
                assert v.witnesses["delta"] == base[n].witnesses["delta"], (k, n)
    return "; ".join(f"{n}={base[n].status.value}" for n in names) + f"; delta {base['sensitivity'].witnesses['delta']}"


@criterion(7, "infinite rearrangement: block family vs alternating family")
def test_infinite_rearrangement():
    F = get_fixture("shift_block").schedule
    G = get_fixture("shift_alternating").schedule
    sens = status("sensitivity", F)
    assert sens.status is W and Fraction(sens.witnesses["delta"]) >= Fraction(1, 2)
    assert status("equicontinuity", F).status is R
    eq = status("equicontinuity", G)
    assert eq.status is W and eq.witnesses["at_scale"]
    assert status("sensitivity", G).status is NW
    words = space_grid(F.space, 3)
    for n in (2, 6, 12):
        assert all(omega(F, n, w) == w for w in words), n
    return f"delta {sens.witnesses['delta']}, identity at 2,6,12 on {len(words)} words"


@criterion(8, "minimality and equicontinuity survive truncation (rotation)")
def test_minimality_equicontinuity():
    F = get_fixture("rotation_minimal").schedule
    base = {n: status(n, F).status for n in ("minimality", "equicontinuity")}
    assert base == {"minimality": W, "equicontinuity": W}
    for k in (1, 2, 3):
        assert {n: status(n, truncate(F, k)).status for n in base} == base, k
    assert status("minimality", get_fixture("identity_autonomous").schedule).status is R
    return "rotation W/W for k=0..3, identity minimality REFUTED"


@criterion(9, "detector hierarchy")
def test_hierarchy():
    rows = []
    for name, entry in REGISTRY.items():
        t, wm, tm = (status(n, entry.schedule).status for n in MIXING)
        assert tm is not W or wm is W, name
        assert wm is not W or t is W, name
        rows.append(f"{name}:{t.value[0]}{wm.value[0]}{tm.value[0]}")
    return " ".join(rows)


def _brute_interior(f, u):
    """Image of ``u`` has interior, judged from sampled points only."""
    if isinstance(u, Cylinder):
        # shifts are bijective on words: distinct free patterns stay distinct
        samples = sample_grid(u, 4)
        images = {eval_map(f, p).value for p in samples}
        return len(images) == len(samples) > 1
    pts = sample_grid(u, 64)
    vals = [float(eval_map(f, p).value) for p in pts]
    if isinstance(u, OpenArc):
        ref = vals[0]
        vals = [math.remainder(v - ref, 2 * math.pi) for v in vals]
    return max(vals) - min(vals) > 1e-9


def _has_interior(images):
    # cylinders are open, so a cylinder image always has interior
    return any(isinstance(im, Cylinder) or im.has_interior for im in images)


def _on_flat(f, p, pre):
    """``p`` lies inside a constant stretch whose endpoints are both listed."""
    if p.space.kind is SpaceKind.SHIFT:
        return False
    xs = sorted(float(q.value) for q in pre)
    x = float(p.value)
    for a, b in zip(xs, xs[1:]):
        if a < x < b:
            mid = [eval_map(f, Point(p.space, a + (b - a) * t / 8)).value for t in range(1, 8)]
            return all(close(Point(p.space, m), eval_map(f, p), 1e-9) for m in mid)
    return False


def _rational_points(space, count=100):
    if space.kind is SpaceKind.INTERVAL:
        return [Point(space, Fraction(k, count + 1)) for k in range(1, count + 1)]
    if space.kind is SpaceKind.CIRCLE:
        return [Point(space, 2 * math.pi * k / (count + 1)) for k in range(1, count + 1)]
    bits = lambda k: [(k >> i) & 1 for i in range(7)]
    return [Point(space, ShiftWord.from_range(-3, bits(k))) for k in range(1, count + 1)]


@criterion(10, "feeble-open and preimage oracles")
def test_oracles():
    maps = all_maps()
    for label, f in maps:
        net = epsilon_net(f.space, Fraction(1, 32))
        per_set = [_brute_interior(f, u) for u in net]
        assert per_set == [_has_interior(image_of(f, u)) for u in net], label
        assert is_feeble_open(f) == all(per_set), label
        for p in _rational_points(f.space):
            y = eval_map(f, p)
            pre = preimages(f, y)
            assert any(close(p, q, 1e-9) for q in pre) or _on_flat(f, p, pre), (label, p)
            assert all(close(eval_map(f, q), y, 1e-9) for q in pre), (label, p)
    feeble = sum(is_feeble_open(f) for _, f in maps)
    return f"{len(maps)} maps ({feeble} feeble open), 100 points each"
