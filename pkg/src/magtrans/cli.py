"""Scenario runner: JSON scenario in, JSON report and exit code out.

Exit codes: 0 when every check passes, 1 when any check fails or crashes,
2 when the scenario itself is invalid.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import __version__
from .checks import REGISTRY, Context, Outcome
from .fields import GaugePotential, PhysicalConstants, builtin
from .poly import Poly

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
DEFAULT_CONSTANTS = {"e": "1", "c": "1", "m": "1", "hbar": "1"}


class ScenarioError(ValueError):
    """The scenario file is malformed or refers to unknown names."""


@dataclass(frozen=True)
class CheckRequest:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    name: str
    constants: PhysicalConstants
    potential: GaugePotential
    checks: tuple
    seed: int = 0
    outputs: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict, repr=False, compare=False)

    def context(self, export_dir: Path | None = None) -> Context:
        return Context(self.constants, self.potential, self.seed, export_dir)


def _parse_field(spec) -> GaugePotential:
    if not isinstance(spec, dict):
        raise ScenarioError("'field' must be an object")
    if "builtin" in spec:
        params = spec.get("params", {})
        if not isinstance(params, dict):
            raise ScenarioError("field params must be an object")
        return builtin(spec["builtin"], **params)
    if "polynomial" in spec:
        comps = spec["polynomial"]
        if not isinstance(comps, list) or len(comps) != 3:
            raise ScenarioError("inline polynomial potential needs three component term lists")
        polys = [Poly.from_json(c) for c in comps]
        return GaugePotential.polynomial(polys, label=spec.get("label", "polynomial"))
    raise ScenarioError("field needs either 'builtin' or 'polynomial'")


def _check_tolerances(name: str, params: dict) -> None:
    for key, value in params.items():
        if "tolerance" in key:
            if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
                raise ScenarioError(f"check {name!r}: {key} must be a positive number")


def parse_scenario(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        consts = PhysicalConstants.from_mapping({**DEFAULT_CONSTANTS, **data.get("constants", {})})
        potential = _parse_field(data.get("field"))
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(str(exc)) from exc
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioError("seed must be an integer")
    raw_checks = data.get("checks")
    if not isinstance(raw_checks, list) or not raw_checks:
        raise ScenarioError("'checks' must be a non-empty list")
    checks = []
    for entry in raw_checks:
        if isinstance(entry, str):
            entry = {"name": entry}
        if not isinstance(entry, dict) or "name" not in entry:
            raise ScenarioError(f"bad check entry {entry!r}")
        name = entry["name"]
        if name not in REGISTRY:
            raise ScenarioError(f"unknown check {name!r}")
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise ScenarioError(f"check {name!r}: params must be an object")
        _check_tolerances(name, params)
        checks.append(CheckRequest(name, params))
    outputs = data.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ScenarioError("'outputs' must be an object")
    return Scenario(name=str(data.get("name", "scenario")), constants=consts, potential=potential,
                    checks=tuple(checks), seed=seed, outputs=outputs, source=data)


def bundled_scenarios() -> list:
    root = resources.files("magtrans") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(ref: str) -> Scenario:
    """Load a scenario from a path, or by the name of a bundled scenario."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
    else:
        bundled = resources.files("magtrans") / "scenarios" / f"{ref}.json"
        if not bundled.is_file():
            raise ScenarioError(f"no scenario file or bundled scenario named {ref!r}")
        text = bundled.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc
    return parse_scenario(data)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value if value == value and abs(value) != float("inf") else str(value)
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return str(value)


def run_check(scenario: Scenario, index: int, export_dir: Path | None) -> dict:
    request = scenario.checks[index]
    check = REGISTRY[request.name]
    start = time.perf_counter()
    try:
        outcome = check.run(scenario.context(export_dir), request.params)
    except Exception as exc:  # a crashing check is recorded, not propagated
        outcome = Outcome(False, notes=[f"{type(exc).__name__}: {exc}",
                                        traceback.format_exc(limit=3)])
        status = "error"
    else:
        status = {True: "pass", False: "fail", None: "not-applicable"}[outcome.passed]
    return {
        "name": request.name,
        "anchor": check.anchor,
        "status": status,
        "params": _jsonable(request.params),
        "measured": _jsonable(outcome.measured),
        "expected": {"values": _jsonable(outcome.expected), "provenance": outcome.provenance},
        "residuals": _jsonable(outcome.residuals),
        "notes": _jsonable(outcome.notes),
        "artifacts": _jsonable(outcome.artifacts),
        "runtime_s": time.perf_counter() - start,
    }


def _run_in_worker(source: dict, index: int, export_dir: str | None) -> dict:
    scenario = parse_scenario(source)
    return run_check(scenario, index, Path(export_dir) if export_dir else None)


def run_scenario(scenario: Scenario, export_dir: Path | None = None, jobs: int = 1) -> dict:
    """Execute every check and assemble the report in declaration order."""
    if export_dir is not None:
        export_dir = Path(export_dir)
        export_dir.mkdir(parents=True, exist_ok=True)
    indices = range(len(scenario.checks))
    if jobs > 1 and len(scenario.checks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_in_worker, scenario.source, i,
                                   str(export_dir) if export_dir else None) for i in indices]
            results = [f.result() for f in futures]
    else:
        results = [run_check(scenario, i, export_dir) for i in indices]
    failed = any(r["status"] in ("fail", "error") for r in results)
    return {
        "scenario": scenario.name,
        "seed": scenario.seed,
        "gauge": scenario.potential.label,
        "constants": scenario.constants.to_json(),
        "version": __version__,
        "status": "fail" if failed else "pass",
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "checks": results,
    }


def write_report(report: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


def _summary_line(result: dict) -> str:
    return f"{result['status'].upper():15s} {result['name']} ({result['runtime_s']:.2f}s)"


def cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.jobs < 1:
        print("--jobs must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    export_dir = args.export_dir or scenario.outputs.get("export_dir")
    report = run_scenario(scenario, export_dir, args.jobs)
    for result in report["checks"]:
        print(_summary_line(result))
    out = args.out or scenario.outputs.get("report")
    if out:
        write_report(report, out)
        print(f"report written to {out}")
    print(f"overall: {report['status']}")
    return EXIT_PASS if report["status"] == "pass" else EXIT_FAIL


def cmd_list_checks(args) -> int:
    for check in REGISTRY.values():
        tol = "exact" if check.tolerance is None else f"{check.tolerance:g}"
        print(f"{check.name} — {check.anchor}  [tolerance: {tol}]")
        print(f"    {check.summary}")
    print(f"{len(REGISTRY)} checks registered")
    if getattr(args, "scenarios", False):
        print("bundled scenarios: " + ", ".join(bundled_scenarios()))
    return EXIT_PASS


def cmd_version(args) -> int:
    print(f"magtrans {__version__}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magtrans",
                                     description="Verify magnetic translation and rotation identities.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file or bundled scenario")
    run.add_argument("scenario", help="path to a scenario JSON file or a bundled scenario name")
    run.add_argument("--out", help="where to write the JSON report")
    run.add_argument("--export-dir", help="directory for CSV and wavefunction exports")
    run.add_argument("--jobs", type=int, default=1, help="number of worker processes")
    run.set_defaults(func=cmd_run)
    lst = sub.add_parser("list-checks", help="list registered checks")
    lst.add_argument("--scenarios", action="store_true", help="also list bundled scenarios")
    lst.set_defaults(func=cmd_list_checks)
    ver = sub.add_parser("version", help="print the package version")
    ver.set_defaults(func=cmd_version)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_PASS
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
