"""Pre-registered scenarios, one per result of the theory, with their expected
agreement or disagreement pattern."""

from __future__ import annotations

import math
from fractions import Fraction

from ..detectors import family_is_feeble_open
from ..family import (
    omega,
    periodic,
    rearrange_finite,
    insert_map,
    delete_map,
    truncate,
)
from ..fixtures import commuting_check, get_fixture
from ..maps import MapKind, identity_map, is_surjective, tent_map
from ..spaces import UNIT_INTERVAL, space_grid
from .config import DetectorSpec
from .runner import ComparisonReport, compare_systems

MIXING = ("transitivity", "weak_mixing", "topological_mixing")
SENSITIVITY = ("sensitivity", "cofinite_sensitivity", "syndetic_sensitivity")


class UnknownClaimError(KeyError):
    def __str__(self):
        return self.args[0]


def _specs(*props, **params) -> list:
    return [DetectorSpec(p, dict(params)) for p in props]


def _prox(x, y, horizon=64) -> DetectorSpec:
    return DetectorSpec("proximal", {"horizon": horizon}, (str(x), str(y)))


def _truncations(name: str, F=None, ks=(1, 2, 3)) -> list:
    F = F if F is not None else get_fixture(name).schedule
    return [(name, F)] + [(f"{name} truncate:{k}", truncate(F, k)) for k in ks]


class _Checks:
    def __init__(self, report: ComparisonReport):
        self.report = report

    def add(self, claim: str, ok: bool, detail: str = ""):
        self.report.checks.append({"claim": claim, "ok": bool(ok), "detail": detail})

    def status(self, label, key) -> str:
        return self.report.system(label).status(key)

    def witness(self, label, key, field):
        return self.report.system(label).verdicts[key].get("witnesses", {}).get(field)

    def expect(self, label, key, status):
        got = self.status(label, key)
        self.add(f"{key} of {label} is {status}", got == status, f"got {got}")

    def agree(self, labels, key, field=None):
        got = [self.status(label, key) for label in labels]
        ok = len(set(got)) == 1 and got[0] != "ERROR"
        detail = ", ".join(f"{label}: {s}" for label, s in zip(labels, got))
        if field:
            vals = [self.witness(label, key, field) for label in labels]
            ok = ok and len({str(v) for v in vals}) == 1
            detail += f"; {field}: " + ", ".join(map(str, vals))
        self.add(f"{key} agrees across {', '.join(labels)}" + (f" (same {field})" if field else ""), ok, detail)


def _run(variants, specs, claim_id) -> tuple:
    report = compare_systems(variants, specs, {"claim": claim_id})
    return report, _Checks(report)


def _labels(variants) -> list:
    return [label for label, _ in variants]


# --------------------------------------------------------------------------


def minimality_prop():
    rot = _truncations("rotation_minimal")
    ident = [("identity_autonomous", get_fixture("identity_autonomous").schedule)]
    report, c = _run(rot + ident, _specs("minimality", "equicontinuity"), "minimality-prop")
    c.agree(_labels(rot), "minimality")
    c.expect("rotation_minimal", "minimality", "WITNESSED")
    c.agree(_labels(rot), "equicontinuity")
    c.expect("identity_autonomous", "minimality", "REFUTED")
    return report


def equicontinuity_prop():
    alt = _truncations("shift_alternating")
    rot = _truncations("rotation_minimal")
    tent = _truncations("tent_autonomous")
    report, c = _run(alt + rot + tent, _specs("equicontinuity"), "equicontinuity-prop")
    for group, status in ((alt, "WITNESSED"), (rot, "WITNESSED"), (tent, "REFUTED")):
        c.agree(_labels(group), "equicontinuity")
        c.expect(group[0][0], "equicontinuity", status)
    return report


def prox_prop():
    entry = get_fixture("commuting_rotations")
    group = _truncations("commuting_rotations")
    pairs = [("0", "1"), ("0", "pi"), ("1/2", "1/2"), ("pi/3", "pi/3")]
    report, c = _run(group, [_prox(x, y) for x, y in pairs], "prox-prop")
    r1, r2 = entry.maps["r1"], entry.maps["r2"]
    c.add("the two rotations commute on the grid", commuting_check(r1, r2))
    c.add("both rotations are bijective", is_surjective(r1) and is_surjective(r2))
    for x, y in pairs:
        c.agree(_labels(group), f"proximal({x},{y})")
    c.expect("commuting_rotations", "proximal(0,1)", "NO_WITNESS_AT_SCALE")
    c.expect("commuting_rotations", "proximal(1/2,1/2)", "WITNESSED")
    return report


def prox1():
    e, eh = get_fixture("prox1"), get_fixture("prox1_h")
    variants = [("prox1", e.schedule), ("prox1 truncate:1", truncate(e.schedule, 1))]
    variants += [("prox1_h", eh.schedule), ("prox1_h truncate:1", truncate(eh.schedule, 1))]
    report, c = _run(variants, [_prox(0, 1, 200), _prox(0, "2/3", 200)], "prox1")
    key = "proximal(0,1)"
    c.expect("prox1", key, "NO_WITNESS_AT_SCALE")
    m = c.witness("prox1", key, "min_distance")
    c.add("min distance of (0, 1) under F is 2/3", abs(float(Fraction(str(m))) - 2 / 3) <= 1e-12, f"got {m}")
    c.expect("prox1 truncate:1", key, "WITNESSED")
    n = c.witness("prox1 truncate:1", key, "n")
    c.add("(0, 1) meets at n = 1 under the truncation", n == 1, f"got {n}")
    c.add("f and the tent map do not commute", not commuting_check(e.maps["f"], e.maps["g"]))
    c.expect("prox1_h", "proximal(0,2/3)", "WITNESSED")
    c.expect("prox1_h truncate:1", "proximal(0,2/3)", "NO_WITNESS_AT_SCALE")
    return report


def prox2():
    e = get_fixture("prox2")
    variants = [("prox2", e.schedule), ("prox2 truncate:1", truncate(e.schedule, 1))]
    report, c = _run(variants, [_prox("pi/4", "pi/2"), _prox(0, "pi")], "prox2")
    key = "proximal(pi/4,pi/2)"
    c.expect("prox2", key, "WITNESSED")
    c.expect("prox2 truncate:1", key, "NO_WITNESS_AT_SCALE")
    m = c.witness("prox2 truncate:1", key, "min_distance")
    c.add("min distance under the truncation is pi/4", abs(m - math.pi / 4) <= 1e-12, f"got {m}")
    c.add("f and g are bijective", is_surjective(e.maps["f"]) and is_surjective(e.maps["g"]))
    c.add("f and g do not commute", not commuting_check(e.maps["f"], e.maps["g"]))
    # endpoints 0 and pi are swapped onto pi and 0 and then fixed
    c.expect("prox2", "proximal(0,pi)", "NO_WITNESS_AT_SCALE")
    return report


def prox3():
    e = get_fixture("prox3")
    variants = [("prox3", e.schedule), ("prox3 truncate:1", truncate(e.schedule, 1))]
    report, c = _run(variants, [_prox("9/10", 1, 200)], "prox3")
    key = "proximal(9/10,1)"
    c.expect("prox3", key, "WITNESSED")
    c.add("distance is 0 from n = 1", c.witness("prox3", key, "n") == 1)
    c.expect("prox3 truncate:1", key, "NO_WITNESS_AT_SCALE")
    m = c.witness("prox3 truncate:1", key, "min_distance")
    c.add("min distance under the truncation is 1/10", abs(float(Fraction(str(m))) - 0.1) <= 1e-12, f"got {m}")
    c.add("f and g commute", commuting_check(e.maps["f"], e.maps["g"]))
    return report


def transitivity_prop():
    groups = [_truncations("tent_autonomous"), _truncations("rotation_minimal")]
    report, c = _run(groups[0] + groups[1], _specs("transitivity"), "transitivity-prop")
    for g in groups:
        c.expect(g[0][0], "transitivity", "WITNESSED")
        c.agree(_labels(g), "transitivity")
    return report


def _feeble_family():
    """{h, g, g, ...} from the prox1_h fixture: feeble open, not autonomous."""
    return get_fixture("prox1_h").schedule


def mixing_cor():
    tent = get_fixture("tent_autonomous").schedule
    g1 = _truncations("tent_autonomous") + [
        ("tent_autonomous insert:2:identity", insert_map(tent, 2, identity_map(UNIT_INTERVAL))),
        ("tent_autonomous delete:3", delete_map(tent, 3)),
    ]
    g2 = _truncations("prox1_h", _feeble_family())
    report, c = _run(g1 + g2, _specs(*MIXING), "mixing-cor")
    for g in (g1, g2):
        c.add(f"{g[0][0]} family is feeble open", family_is_feeble_open(g[0][1]))
        for p in MIXING:
            c.agree(_labels(g), p)
            c.expect(g[0][0], p, "WITNESSED")
    return report


def sens_example():
    e = get_fixture("sens")
    variants = [("sens", e.schedule), ("sens truncate:1", truncate(e.schedule, 1))]
    props = MIXING + ("sensitivity",)
    report, c = _run(variants, _specs(*props), "sens-example")
    for p in props:
        c.expect("sens", p, "NO_WITNESS_AT_SCALE")
        c.expect("sens truncate:1", p, "WITNESSED")
    d = c.witness("sens truncate:1", "sensitivity", "delta")
    c.add("truncated system has sensitivity constant 1/2", d == "1/2", f"got {d}")
    c.add("sens family is not feeble open", not family_is_feeble_open(e.schedule))
    c.add("truncation is the autonomous tent system", truncate(e.schedule, 1) == periodic([tent_map()]))
    return report


def sensitivity_prop():
    g1 = _truncations("tent_autonomous")
    g2 = _truncations("prox1_h", _feeble_family())
    sens = [("sens", get_fixture("sens").schedule), ("sens truncate:1", truncate(get_fixture("sens").schedule, 1))]
    report, c = _run(g1 + g2 + sens, _specs("sensitivity"), "sensitivity-prop")
    for g in (g1, g2):
        c.expect(g[0][0], "sensitivity", "WITNESSED")
        c.agree(_labels(g), "sensitivity", field="delta")
    # without feeble openness only F => F_k survives
    c.expect("sens", "sensitivity", "NO_WITNESS_AT_SCALE")
    c.expect("sens truncate:1", "sensitivity", "WITNESSED")
    return report


def syndetic_cor():
    tent = _truncations("tent_autonomous")
    block = _truncations("shift_block")
    specs = _specs("cofinite_sensitivity", "syndetic_sensitivity") + [
        DetectorSpec("syndetic_sensitivity", {"gap": 4}),
    ]
    report, c = _run(tent + block, specs[:2], "syndetic-cor")
    for p in ("cofinite_sensitivity", "syndetic_sensitivity"):
        c.expect("tent_autonomous", p, "WITNESSED")
        c.agree(_labels(tent), p, field="delta")
    c.agree(_labels(block), "cofinite_sensitivity")
    c.expect("shift_block", "cofinite_sensitivity", "NO_WITNESS_AT_SCALE")
    # block expansion gaps never exceed 4 (misses come in threes around the identity times)
    c.expect("shift_block", "syndetic_sensitivity", "NO_WITNESS_AT_SCALE")
    wide = compare_systems(block[:1], specs[2:], {"claim": "syndetic-cor", "gap": 4})
    status = wide.systems[0].status("syndetic_sensitivity")
    c.add("shift_block is syndetically sensitive with gap bound 4", status == "WITNESSED", f"got {status}")
    return report


def rearrange_finite_cor():
    F = _feeble_family()
    perms = ((2, 1), (3, 1, 2))
    g1 = [("prox1_h", F)] + [(f"prox1_h rearrange:{','.join(map(str, p))}", rearrange_finite(F, p)) for p in perms]
    R = get_fixture("commuting_rotations").schedule
    g2 = [("commuting_rotations", R), ("commuting_rotations rearrange:2,1", rearrange_finite(R, (2, 1)))]
    report, c = _run(g1, _specs(*MIXING, "sensitivity"), "rearrange-finite-cor")
    for p in MIXING + ("sensitivity",):
        c.agree(_labels(g1), p)
    c.agree(_labels(g1), "sensitivity", field="delta")
    rot = compare_systems(g2, _specs("minimality", "equicontinuity") + [_prox(0, 1), _prox("1/2", "1/2")])
    report.systems += rot.systems
    report.agreement.update({f"{k} (rotations)": v for k, v in rot.agreement.items()})
    for key in ("minimality", "equicontinuity", "proximal(0,1)", "proximal(1/2,1/2)"):
        c.agree(_labels(g2), key)
    for p in perms:
        G = rearrange_finite(F, p)
        m = len(p)
        same = all(truncate(G, m).index(i) == truncate(F, m).index(i) for i in range(1, 51))
        c.add(f"rearrangement {p} has the same tail after {m}", same)
    return report


def rearrange_infinite():
    F = get_fixture("shift_block").schedule
    G = get_fixture("shift_alternating").schedule
    report, c = _run([("shift_block", F), ("shift_alternating", G)], _specs("sensitivity", "equicontinuity"), "rearrange-infinite")
    c.expect("shift_block", "sensitivity", "WITNESSED")
    d = c.witness("shift_block", "sensitivity", "delta")
    c.add("block sensitivity constant is at least 1/2", d is not None and Fraction(d) >= Fraction(1, 2), f"got {d}")
    c.expect("shift_block", "equicontinuity", "REFUTED")
    c.expect("shift_alternating", "equicontinuity", "WITNESSED")
    c.expect("shift_alternating", "sensitivity", "NO_WITNESS_AT_SCALE")
    words = space_grid(F.space, 3)
    ident = all(omega(F, n, w) == w for n in (2, 6, 12, 20) for w in words)
    c.add("omega_{n(n+1)} of the block family is the identity on grid words", ident)
    counts = all(
        sum(F.index(i).kind is MapKind.SHIFT_LEFT for i in range(1, L + 1))
        == sum(G.index(i).kind is MapKind.SHIFT_LEFT for i in range(1, L + 1))
        for L in (2, 6, 12, 20, 30)
    )
    c.add("F and G use sigma equally often on each prefix 1..(n+1)(n+2)", counts)
    return report


CATALOGUE = {
    "minimality-prop": ("minimality survives truncation", minimality_prop),
    "equicontinuity-prop": ("equicontinuity survives truncation", equicontinuity_prop),
    "prox-prop": ("proximal pairs of a commuting bijective family survive truncation", prox_prop),
    "prox1": ("commutativity is needed to lift proximality from F_k to F", prox1),
    "prox2": ("bijectivity without commutativity does not push proximality to F_k", prox2),
    "prox3": ("commutativity without injectivity does not push proximality to F_k", prox3),
    "transitivity-prop": ("transitivity passes from F to F_k", transitivity_prop),
    "mixing-cor": ("mixing notions agree for feeble open alterations", mixing_cor),
    "sens-example": ("a non-feeble-open head destroys mixing and sensitivity", sens_example),
    "sensitivity-prop": ("sensitivity and its constant survive feeble open truncation", sensitivity_prop),
    "syndetic-cor": ("syndetic and cofinite sensitivity survive truncation", syndetic_cor),
    "rearrange-finite-cor": ("finite rearrangements of a feeble open family keep their dynamics", rearrange_finite_cor),
    "rearrange-infinite": ("an infinite rearrangement changes sensitivity and equicontinuity", rearrange_infinite),
}


def verify_paper(claim_id: str) -> ComparisonReport:
    try:
        _, fn = CATALOGUE[claim_id]
    except KeyError:
        raise UnknownClaimError(f"unknown id {claim_id!r}; known: {', '.join(CATALOGUE)}") from None
    return fn()
