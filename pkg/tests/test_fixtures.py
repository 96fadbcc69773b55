import math
from fractions import Fraction

import pytest

from alterdyn.detectors import DetectorParams, check_proximal, run_detector
from alterdyn.fixtures import (
    REGISTRY,
    UnknownFixtureError,
    all_maps,
    commuting_check,
    get_fixture,
    prox1_f,
    prox2_g,
    prox3_f,
    prox3_g,
)
from alterdyn.maps import MapKind, identity_map, rotation, tent_map
from alterdyn.spaces import CIRCLE, UNIT_INTERVAL

REQUIRED = {
    "prox1", "prox2", "prox3", "sens", "shift_block", "shift_alternating",
    "rotation_minimal", "commuting_rotations", "tent_autonomous", "identity_autonomous",
}


def test_registry_contents():
    assert REQUIRED <= set(REGISTRY)


def test_unknown_fixture_lists_known_names():
    with pytest.raises(UnknownFixtureError) as err:
        get_fixture("logistic")
    assert "tent_autonomous" in str(err.value)


def test_sens_head_value():
    assert get_fixture("sens").schedule.index(1).eval_value(Fraction(1, 4)) == 0


def test_prox3_second_map_at_zero():
    assert get_fixture("prox3").schedule.index(2).eval_value(Fraction(0)) == Fraction(1, 2)


def test_alternating_fourth_map():
    assert get_fixture("shift_alternating").schedule.index(4).kind is MapKind.SHIFT_RIGHT


def test_prox1_anchor_values():
    f = prox1_f()
    assert [f.eval_value(Fraction(x)) for x in ("0", "1/3", "2/3", "1")] == [0, 1, 0, Fraction(2, 3)]


def test_coefficients_are_exact():
    for name in ("prox1", "prox1_h", "prox3", "sens", "tent_autonomous"):
        for f in get_fixture(name).schedule.generators():
            assert f.is_exact


def _run(entry, ex):
    params = DetectorParams.defaults(entry.space)
    if ex.property == "proximal":
        return check_proximal(entry.schedule, entry.point(ex.pair[0]), entry.point(ex.pair[1]), params)
    return run_detector(ex.property, entry.schedule, params)


@pytest.mark.parametrize(
    "name,ex",
    [(name, ex) for name, e in REGISTRY.items() for ex in e.expected],
    ids=lambda v: v if isinstance(v, str) else f"{v.property}{list(map(str, v.pair)) if v.pair else ''}",
)
def test_expected_table(name, ex):
    entry = get_fixture(name)
    assert _run(entry, ex).status is ex.status


def test_commuting_examples():
    assert commuting_check(prox3_f(), prox3_g(), grid=256)
    assert not commuting_check(prox1_f(), tent_map(), grid=256)
    for f in (prox1_f(), tent_map(), prox3_g()):
        assert commuting_check(f, identity_map(UNIT_INTERVAL))
    assert commuting_check(rotation(angle=1.0), rotation(angle=math.sqrt(2)))
    with pytest.raises(ValueError):
        commuting_check(tent_map(), prox2_g())


def test_prox2_attracting_fixed_point():
    g = prox2_g()
    theta, gaps = 3 * math.pi / 2, []
    for _ in range(12):
        theta = g.eval_value(theta)
        gaps.append(theta - math.pi)
    # the gap squares (in half turns) each step, then sits at float resolution
    assert all(b < a for a, b in zip(gaps, gaps[1:]) if a > 1e-12)
    assert all(g >= 0 for g in gaps) and gaps[-1] < 1e-12
    assert g.eval_value(math.pi) == pytest.approx(math.pi)
    assert g.eval_value(0.0) == pytest.approx(0.0)


def test_prox2_g_fixes_upper_semicircle_pointwise():
    g = prox2_g()
    for k in range(1, 20):
        theta = math.pi * k / 20
        assert g.eval_value(theta) == pytest.approx(theta)


def test_all_maps_unique_and_labelled():
    maps = all_maps()
    assert len({id(f) for _, f in maps}) == len(maps)
    assert len([f for _, f in maps]) == len({repr(f) for _, f in maps})
    assert any(label.startswith("prox2.") for label, _ in maps)
    assert all(f.space in (UNIT_INTERVAL, CIRCLE) or f.space.kind.value == "shift" for _, f in maps)


def test_fingerprints_are_stable_and_distinct():
    prints = {name: e.fingerprint() for name, e in REGISTRY.items()}
    assert prints == {name: e.fingerprint() for name, e in REGISTRY.items()}
    assert len(set(prints.values())) == len(prints)
