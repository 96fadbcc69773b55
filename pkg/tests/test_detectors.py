import math
from fractions import Fraction

import numpy as np
import pytest

from alterdyn import kernels
from alterdyn.detectors import (
    DetectorParams,
    Status,
    check_cofinite_sensitivity,
    check_equicontinuity,
    check_minimality,
    check_periodic_point,
    check_proximal,
    check_sensitivity,
    check_syndetic_sensitivity,
    check_topological_mixing,
    check_transitivity,
    check_weak_mixing,
    family_is_feeble_open,
    run_detector,
)
from alterdyn.family import omega, periodic, shift_block_family, truncate
from alterdyn.fixtures import get_fixture
from alterdyn.maps import identity_map, rotation, shift_left, shift_right, tent_map
from alterdyn.spaces import (
    CIRCLE,
    UNIT_INTERVAL,
    Point,
    ShiftWord,
    binary_shift,
    contains,
    distance,
    epsilon_net,
    sample_grid,
)

import oracles

W_, R_, NW_ = Status.WITNESSED, Status.REFUTED, Status.NO_WITNESS_AT_SCALE

TENT = periodic([tent_map()])
IDENT = periodic([identity_map(UNIT_INTERVAL)])
SENS = get_fixture("sens").schedule
BLOCK = shift_block_family()
ALT = periodic([shift_left(), shift_right()])

IV = DetectorParams.defaults(UNIT_INTERVAL)
SH = DetectorParams.defaults(binary_shift(8))


def ip(x):
    return Point(UNIT_INTERVAL, Fraction(x))


# -- params ------------------------------------------------------------------------


def test_defaults_per_space():
    assert IV.epsilon == Fraction(1, 16) and IV.horizon == 64 and IV.grid == 128
    assert IV.deltas == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16))
    assert IV.tol == 1e-9
    assert DetectorParams.defaults(CIRCLE).epsilon == pytest.approx(math.pi / 16)
    assert SH.epsilon == Fraction(1, 8)


@pytest.mark.parametrize(
    "bad",
    [dict(epsilon=0), dict(epsilon=0.1, horizon=0), dict(epsilon=0.1, deltas=(0.1, 0.2)), dict(epsilon=0.1, deltas=())],
)
def test_params_validation(bad):
    with pytest.raises(ValueError):
        DetectorParams(**bad)


def test_verdict_serialises():
    d = check_transitivity(TENT, IV.replace(epsilon=Fraction(1, 4))).to_dict()
    assert d["status"] == "WITNESSED"
    assert d["params"]["epsilon"] == "1/4"


# -- transitivity and mixing ----------------------------------------------------------


def test_tent_transitive():
    v = check_transitivity(TENT, IV.replace(epsilon=Fraction(1, 8)))
    assert v.status is W_
    first = np.array(v.witnesses["first_hit_times"])
    assert (first >= 1).all()


def test_sens_left_right_pairs_unconnected():
    params = IV.replace(epsilon=Fraction(1, 8))
    v = check_transitivity(SENS, params)
    assert v.status is NW_
    table = kernels.hit_table(SENS, params)
    net = table.net
    left = [i for i, u in enumerate(net) if u.b <= Fraction(1, 2)]
    right = [j for j, u in enumerate(net) if u.a >= Fraction(1, 2)]
    assert left and right
    assert not table.hits[np.ix_(left, right)].any()


def test_identity_never_connects_disjoint_sets():
    v = check_transitivity(IDENT, IV)
    assert v.status is NW_
    ex = v.witnesses["example"]
    assert ex["u"] != ex["v"]


def test_weak_mixing_examples():
    quarter = IV.replace(epsilon=Fraction(1, 4))
    assert check_weak_mixing(TENT, quarter).status is W_
    assert check_weak_mixing(IDENT, quarter).status is NW_
    assert check_weak_mixing(SENS, quarter).status is NW_


def test_topological_mixing_examples():
    quarter = IV.replace(epsilon=Fraction(1, 4))
    v = check_topological_mixing(TENT, quarter)
    assert v.status is W_
    assert max(max(row) for row in v.witnesses["K"]) <= 32
    assert check_topological_mixing(BLOCK, SH).status is NW_
    assert check_topological_mixing(IDENT, quarter).status is NW_


def test_tent_hits_match_brute_force():
    params = DetectorParams(epsilon=Fraction(1, 4), horizon=10, grid=12)
    table = kernels.hit_table(TENT, params)
    net = table.net
    seeds = [[p.value for p in sample_grid(u, params.grid)] for u in net]
    brute = oracles.first_hits_interval(oracles.tent, [(u.a, u.b) for u in net], seeds, params.horizon)
    for (u, v), first in brute.items():
        row = table.hits[u, v]
        got = int(row.argmax()) + 1 if row.any() else None
        assert got == first, (u, v)


def test_shift_hits_match_brute_force():
    window = 4
    space = binary_shift(window)
    F = shift_block_family(window)
    params = DetectorParams(epsilon=Fraction(1, 4), horizon=6, grid=2)
    table = kernels.hit_table(F, params)
    net = table.net
    s = [0] + [sum(1 if oracles.block_map_is_left(i) else -1 for i in range(1, n + 1)) for n in range(1, 7)]
    span = range(-2 - 3, 2 + 4)
    for n in range(1, 7):
        for u in (0, 5, 17, 31):
            for v in range(len(net)):
                lo_u = {net[u].lo + j: b for j, b in enumerate(net[u].bits)}
                lo_v = {net[v].lo + j: b for j, b in enumerate(net[v].bits)}
                brute = False
                for w in oracles.words_on(span.start, span.stop - 1):
                    if all(w.get(i) == b for i, b in lo_u.items()):
                        image = oracles.shift_apply(w, s[n])
                        if all(image.get(i) == b for i, b in lo_v.items()):
                            brute = True
                            break
                assert table.hits[u, v, n - 1] == brute
    # witness points replay
    u, v = (int(x) for x in np.argwhere(table.hits[:, :, 3])[7])
    p = table.witness(u, v, 4)
    assert contains(net[u], p) and contains(net[v], omega(F, 4, p))
    with pytest.raises(ValueError):
        table.witness(3, 20, 4)
    assert p.space == space


def test_transitivity_witness_replays():
    v = check_transitivity(TENT, IV)
    h = v.witnesses["hardest"]
    table = kernels.hit_table(TENT, IV)
    p = Point(UNIT_INTERVAL, Fraction(h["point"]))
    assert contains(table.net[h["u"]], p)
    assert contains(table.net[h["v"]], omega(TENT, h["n"], p))


# -- sensitivity ------------------------------------------------------------------------


def test_tent_sensitivity_constant():
    params = IV.replace(horizon=32, deltas=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)))
    v = check_sensitivity(TENT, params)
    assert v.status is W_ and v.witnesses["delta"] == "1/2"
    h = v.witnesses["hardest"]
    p, q = (Point(UNIT_INTERVAL, Fraction(x)) for x in h["pair"])
    assert distance(omega(TENT, h["n"], p), omega(TENT, h["n"], q)) > Fraction(1, 2)


def test_sensitivity_negative_examples():
    assert check_sensitivity(SENS, IV).status is NW_
    assert check_sensitivity(IDENT, IV).status is NW_


def test_expansion_floor_blocks_trivial_constants():
    # a 1/16 net has members of diameter 1/8; constants below 1/4 are not evidence of expansion
    v = check_sensitivity(IDENT, IV)
    assert v.witnesses["expansion_floor"] == pytest.approx(0.25)
    assert v.witnesses["smallest_delta_tried"] == "1/4"


def test_cofinite_examples():
    assert check_cofinite_sensitivity(TENT, IV).status is W_
    assert check_cofinite_sensitivity(BLOCK, SH).status is NW_
    assert check_cofinite_sensitivity(IDENT, IV).status is NW_


def test_block_syndetic_gap_is_four():
    assert check_syndetic_sensitivity(BLOCK, SH.replace(gap=3)).status is NW_
    v = check_syndetic_sensitivity(BLOCK, SH.replace(gap=4))
    assert v.status is W_ and v.witnesses["delta"] == "1/2"


def test_block_expansion_misses_cluster_around_identity_times():
    table = kernels.expansion_table(BLOCK, SH)
    misses = [n for n in range(1, 65) if not table.diam[0, n] > 0.5]
    near = {m * (m + 1) + d for m in range(1, 9) for d in (-1, 0, 1)}
    assert set(misses) <= near | {1, 2, 3}
    assert {2, 6, 12, 20, 30, 42, 56} <= set(misses)


def test_shift_expansion_matches_brute_force():
    window = 4
    F = shift_block_family(window)
    params = DetectorParams(epsilon=Fraction(1, 2), horizon=8, grid=2)
    table = kernels.expansion_table(F, params)
    r = 1
    s = [0]
    for i in range(1, 9):
        s.append(s[-1] + (1 if oracles.block_map_is_left(i) else -1))
    base = {i: 0 for i in range(-r, r + 1)}
    for n in range(9):
        k = s[n]
        best = 0.0
        for w in oracles.words_on(-window - 3, window + 3):
            if all(w[i] == 0 for i in range(-r, r + 1)):
                best = max(best, oracles.shift_dist(oracles.shift_apply(base, k), oracles.shift_apply(w, k), window))
        assert table.diam[0, n] == pytest.approx(best)
    p, q = table.witness_pair(0, 3)
    assert distance(omega(F, 3, p), omega(F, 3, q)) == pytest.approx(table.diam[0, 3])


# -- equicontinuity --------------------------------------------------------------------


def test_alternating_shift_equicontinuous():
    v = check_equicontinuity(ALT, SH)
    assert v.status is W_ and v.witnesses["at_scale"]
    # sigma at most doubles distances, so delta = epsilon / 2 survives
    assert v.witnesses["modulus"] == {"1/4": "1/8", "1/8": "1/16", "1/16": "1/32"}


def test_tent_not_equicontinuous():
    v = check_equicontinuity(TENT, IV)
    assert v.status is R_
    w = v.witnesses
    x, y = (Point(UNIT_INTERVAL, Fraction(t)) for t in w["pair"])
    assert distance(x, y) < Fraction(w["smallest_delta"])
    assert float(distance(omega(TENT, w["n"], x), omega(TENT, w["n"], y))) >= float(Fraction(w["epsilon"]))


def test_identity_equicontinuous_with_delta_epsilon():
    v = check_equicontinuity(IDENT, IV)
    assert v.status is W_
    assert v.witnesses["modulus"] == {"1/4": "1/4", "1/8": "1/8", "1/16": "1/16"}


def test_block_equicontinuity_counterexample_replays():
    v = check_equicontinuity(BLOCK, SH)
    assert v.status is R_
    w = v.witnesses
    x, y = (Point(binary_shift(8), ShiftWord.parse(t)) for t in w["pair"])
    d = distance(omega(BLOCK, w["n"], x), omega(BLOCK, w["n"], y))
    assert d == pytest.approx(w["distance_at_n"])


# -- proximality -------------------------------------------------------------------------


def test_prox1_truncation_meets_at_once():
    F = truncate(get_fixture("prox1").schedule, 1)
    v = check_proximal(F, ip(0), ip(1), IV)
    assert v.status is W_ and v.witnesses["n"] == 1


def test_prox1_pair_stays_apart():
    F = get_fixture("prox1").schedule
    v = check_proximal(F, ip(0), ip(1), IV.replace(horizon=200))
    assert v.status is NW_ and v.witnesses["min_distance"] == "2/3"


@pytest.mark.parametrize("name", ["tent_autonomous", "shift_block", "rotation_minimal"])
def test_point_is_proximal_to_itself(name):
    e = get_fixture(name)
    p = e.point(ShiftWord(0, (1,)) if e.space.kind.value == "shift" else Fraction(1, 3) if e.space == UNIT_INTERVAL else 1.0)
    v = check_proximal(e.schedule, p, p, DetectorParams.defaults(e.space))
    assert v.status is W_ and Fraction(str(v.witnesses["min_distance"])) == 0


# -- minimality ---------------------------------------------------------------------------


def test_rotation_minimal_at_scale():
    F = periodic([rotation(angle=1.0)])
    v = check_minimality(F, DetectorParams(epsilon=math.pi / 8, horizon=128, grid=64))
    assert v.status is W_ and v.witnesses["at_scale"]


def test_identity_not_minimal():
    v = check_minimality(IDENT, IV)
    assert v.status is R_
    seed = Fraction(v.witnesses["seed"])
    assert omega(IDENT, 10, ip(seed)).value == seed


def test_sens_not_minimal():
    assert check_minimality(SENS, IV).status is R_
    orbit = [omega(SENS, n, ip("1/4")).value for n in range(6)]
    assert orbit == [Fraction(1, 4), 0, 0, 0, 0, 0]


def test_minimality_counterexample_replays():
    v = check_minimality(SENS, IV)
    seed = ip(v.witnesses["seed"])
    net = epsilon_net(UNIT_INTERVAL, IV.epsilon)
    u = net[v.witnesses["missed_index"]]
    assert not any(contains(u, omega(SENS, n, seed)) for n in range(IV.horizon + 1))


# -- periodic points ------------------------------------------------------------------------


def test_block_has_no_fixed_period_two():
    w = Point(binary_shift(8), ShiftWord(0, (1, 0, 1)))
    assert omega(BLOCK, 2, w) == w
    v = check_periodic_point(BLOCK, w, 2, 2)
    assert v.status is R_ and v.witnesses["k"] == 2


def test_identity_every_point_periodic():
    assert check_periodic_point(IDENT, ip("3/11"), 1, 10).status is W_


def test_tent_fixed_point():
    assert check_periodic_point(TENT, ip("2/3"), 1, 20).status is W_


# -- feeble openness ---------------------------------------------------------------------


def test_family_feeble_open_examples():
    assert not family_is_feeble_open(SENS)
    assert family_is_feeble_open(TENT)
    assert family_is_feeble_open(BLOCK)


def test_unknown_property():
    with pytest.raises(KeyError):
        run_detector("entropy", TENT, IV)


# -- cross-cutting properties ----------------------------------------------------------------


def test_truncation_transfers_transitivity():
    for name in ("tent_autonomous", "rotation_minimal", "prox1_h"):
        F = get_fixture(name).schedule
        params = DetectorParams.defaults(F.space)
        assert check_transitivity(F, params).status is W_
        for k in (1, 2, 3):
            assert check_transitivity(truncate(F, k), params).status is W_


def test_verdicts_are_deterministic():
    kernels.clear_caches()
    a = check_weak_mixing(SENS, IV).to_dict()
    kernels.clear_caches()
    assert check_weak_mixing(SENS, IV).to_dict() == a
