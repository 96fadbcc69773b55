"""Command line entry point: ``alterdyn check | compare | run | verify-paper | fixtures list``.

Exit codes: 0 when every expectation holds, 1 when one is violated, 2 for
configuration errors.
"""

from __future__ import annotations

import json
import sys

import click

from ..detectors import SET_DETECTORS
from ..fixtures import REGISTRY
from .catalogue import CATALOGUE, verify_paper
from .config import (
    PROPERTIES,
    ConfigError,
    expand_suite,
    detector_from_dict,
    load_config,
    load_system,
    parse_transform,
    params_from_dict,
    config_from_dict,
)
from .runner import compare_systems, run_scenario

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


def _fail_config(exc):
    click.echo(f"configuration error: {exc}", err=True)
    sys.exit(EXIT_CONFIG)


def _emit(report, out):
    if out:
        report.write(out)
        click.echo(f"report written to {out}")


def _print_verdicts(report):
    for s in report.systems:
        for key, v in s.verdicts.items():
            summary = v.get("summary") or v.get("error", "")
            click.echo(f"{s.label:40s} {key:28s} {v['status']:20s} {summary}")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Detect dynamical properties of non-autonomous systems and compare them
    across truncations, alterations and rearrangements."""


@main.command()
@click.option("--system", "system_arg", required=True, help="Fixture name or JSON schedule file.")
@click.option("--property", "prop", required=True, type=click.Choice(PROPERTIES))
@click.option("--epsilon", default=None, help="Net radius, e.g. 1/16 or pi/16.")
@click.option("--horizon", type=int, default=None)
@click.option("--grid", type=int, default=None)
@click.option("--delta-list", default=None, help="Comma list, decreasing, e.g. 1/2,1/4,1/8.")
@click.option("--tol", type=float, default=None)
@click.option("--gap", type=int, default=None, help="Gap bound for syndetic sensitivity.")
@click.option("--pair", default=None, help="x,y for the proximal property.")
@click.option("--out", default=None, type=click.Path(dir_okay=False))
def check(system_arg, prop, epsilon, horizon, grid, delta_list, tol, gap, pair, out):
    """Run one detector on one system."""
    params = {
        k: v
        for k, v in dict(epsilon=epsilon, horizon=horizon, grid=grid, deltas=delta_list, tol=tol, gap=gap).items()
        if v is not None
    }
    try:
        label, F = load_system(system_arg)
        raw = {"property": prop, "params": params}
        if prop == "proximal":
            if not pair or pair.count(",") != 1:
                raise ConfigError("pair", "proximal needs --pair x,y")
            raw["pair"] = pair.split(",")
        spec = detector_from_dict(raw, "check")
        params_from_dict(params, F.space)
    except ConfigError as exc:
        _fail_config(exc)
    name = label if isinstance(label, str) else "inline"
    report = compare_systems([(name, F)], [spec], {"check": raw, "system": label})
    _print_verdicts(report)
    _emit(report, out)
    # a fixture with a registered expectation for this property must meet it
    entry = REGISTRY.get(label) if isinstance(label, str) else None
    status = report.systems[0].status(spec.key)
    if status == "ERROR":
        sys.exit(EXIT_VIOLATION)
    if entry is not None and not params:
        for ex in entry.expected:
            if ex.property == prop and (prop != "proximal" or tuple(spec.pair) == tuple(str(x) for x in ex.pair)):
                if ex.status.value != status:
                    click.echo(f"expected {ex.status.value}", err=True)
                    sys.exit(EXIT_VIOLATION)
    sys.exit(EXIT_OK)


@main.command()
@click.option("--system", "system_arg", required=True, help="Fixture name or JSON schedule file.")
@click.option("--transform", "transforms", multiple=True, help="truncate:K, insert:R:MAP, delete:K, rearrange:P1,P2,..., block_rearrange")
@click.option("--suite", default="all", help=f"'all' or a comma list of {', '.join(SET_DETECTORS)}.")
@click.option("--out", default=None, type=click.Path(dir_okay=False))
def compare(system_arg, transforms, suite, out):
    """Compare a system with its cumulatively transformed variants."""
    try:
        label, _ = load_system(system_arg)
        cfg = config_from_dict(
            {
                "system": label,
                "transformations": [parse_transform(t, f"--transform {t}").to_dict() for t in transforms],
                "detectors": expand_suite(suite),
                "output": out,
            }
        )
    except ConfigError as exc:
        _fail_config(exc)
    report = run_scenario(cfg)
    _print_verdicts(report)
    for key, row in report.agreement.items():
        for pair, verdict in row.items():
            click.echo(f"{key:28s} {pair:60s} {verdict}")
    _emit(report, out)
    errors = any(v["status"] == "ERROR" for s in report.systems for v in s.verdicts.values())
    sys.exit(EXIT_VIOLATION if errors else EXIT_OK)


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="Overrides the config's output field.")
def run(config, out):
    """Run a JSON scenario configuration."""
    try:
        cfg = load_config(config)
    except ConfigError as exc:
        _fail_config(exc)
    report = run_scenario(cfg)
    _print_verdicts(report)
    _emit(report, out or cfg.output)
    errors = any(v["status"] == "ERROR" for s in report.systems for v in s.verdicts.values())
    sys.exit(EXIT_VIOLATION if errors else EXIT_OK)


@main.command("verify-paper")
@click.argument("claim_id")
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="Write the report(s) as JSON.")
def verify_paper_cmd(claim_id, out):
    """Replay a registered claim (or 'all') and check its expected pattern."""
    ids = list(CATALOGUE) if claim_id == "all" else [claim_id]
    if claim_id != "all" and claim_id not in CATALOGUE:
        _fail_config(ConfigError("id", f"unknown id {claim_id!r}; known: all, {', '.join(CATALOGUE)}"))
    reports, ok = {}, True
    for cid in ids:
        report = verify_paper(cid)
        reports[cid] = report.to_dict()
        ok &= report.passed
        click.echo(f"[{'PASS' if report.passed else 'FAIL'}] {cid}: {CATALOGUE[cid][0]}")
        for chk in report.checks:
            mark = "ok" if chk["ok"] else "VIOLATED"
            click.echo(f"    {mark:8s} {chk['claim']}" + (f" ({chk['detail']})" if chk["detail"] and not chk["ok"] else ""))
    if out:
        with open(out, "w") as fh:
            json.dump(reports if claim_id == "all" else reports[claim_id], fh, indent=2, sort_keys=True)
            fh.write("\n")
    sys.exit(EXIT_OK if ok else EXIT_VIOLATION)


@main.group()
def fixtures():
    """Inspect the fixture registry."""


@fixtures.command("list")
def fixtures_list():
    for name, entry in REGISTRY.items():
        click.echo(f"{name:22s} {str(entry.space):12s} {entry.notes}")


if __name__ == "__main__":
    main()
