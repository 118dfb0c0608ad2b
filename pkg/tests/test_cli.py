import json
import subprocess
import sys

import pytest

from magtrans import __version__
from magtrans.checks import REGISTRY, Context, random_poly
from magtrans.cli import (
    EXIT_FAIL, EXIT_INVALID, EXIT_PASS, ScenarioError, bundled_scenarios, load_scenario, main,
    parse_scenario, run_scenario,
)


def write(tmp_path, data, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def uniform(checks, **extra):
    return {"name": "t", "seed": 1, "field": {"builtin": "symmetric", "params": {"B": ["0", "0", "1"]}},
            "checks": checks, **extra}


def strip_volatile(report):
    report = dict(report)
    report.pop("timestamp")
    report["checks"] = [{k: v for k, v in c.items() if k != "runtime_s"} for c in report["checks"]]
    return report


def test_list_checks(capsys):
    assert main(["list-checks"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "ray-phase — Eq. (19)" in out
    assert "passive-generator-existence — Eq. (8)" in out
    assert len(REGISTRY) >= 15
    assert f"{len(REGISTRY)} checks registered" in out


def test_version(capsys):
    assert main(["version"]) == EXIT_PASS
    assert __version__ in capsys.readouterr().out


def test_bundled_scenarios_exist():
    assert {"uniform-field-full-suite", "gradient-field", "dipole-field"} <= set(bundled_scenarios())


@pytest.mark.parametrize("name", ["uniform-field-full-suite", "gradient-field", "dipole-field", "landau-gauge"])
def test_bundled_scenarios_pass(tmp_path, name):
    out = tmp_path / "report.json"
    assert main(["run", name, "--out", str(out)]) == EXIT_PASS
    report = json.loads(out.read_text())
    assert report["status"] == "pass"
    assert all(c["status"] == "pass" for c in report["checks"])
    assert all(c["expected"]["provenance"] in {"PAPER", "TRIVIAL", "DERIVED"} for c in report["checks"])


def test_expecting_l1_in_uniform_field_fails(tmp_path):
    path = write(tmp_path, uniform([{"name": "rotation-generator-existence",
                                     "params": {"axes": [1], "expect": "exists"}}]))
    assert main(["run", path]) == EXIT_FAIL


def test_expected_absence_passes(tmp_path):
    path = write(tmp_path, uniform([{"name": "rotation-generator-existence",
                                     "params": {"axes": [1, 2], "expect": "absent"}}]))
    assert main(["run", path]) == EXIT_PASS


@pytest.mark.parametrize("scenario", [
    {"field": {"polynomial": [[{"coefficient": "1/x", "exponents": [1, 0, 0]}], [], []]},
     "checks": ["active-bracket"]},
    {"field": {"builtin": "symmetric", "params": {"B": ["0", "0", "1"]}}, "checks": ["no-such-check"]},
    {"field": {"builtin": "symmetric", "params": {"B": ["0", "0", "1"]}},
     "checks": [{"name": "flow-commutation", "params": {"tolerance": -1}}]},
    {"field": {"builtin": "warp"}, "checks": ["active-bracket"]},
    {"field": {"builtin": "symmetric", "params": {"B": ["0", "0", "1"]}}, "checks": []},
    {"constants": {"e": "0"}, "field": {"builtin": "zero"}, "checks": ["active-bracket"]},
    {"seed": "x", "field": {"builtin": "zero"}, "checks": ["active-bracket"]},
])
def test_invalid_scenarios_exit_2(tmp_path, scenario):
    assert main(["run", write(tmp_path, scenario)]) == EXIT_INVALID


def test_unreadable_input_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == EXIT_INVALID
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_INVALID
    assert main(["run", "uniform-field-full-suite", "--jobs", "0"]) == EXIT_INVALID
    assert main(["bogus"]) == EXIT_INVALID


def test_inline_polynomial_field():
    data = {"field": {"label": "landau-inline",
                      "polynomial": [[], [{"coefficient": "2", "exponents": [1, 0, 0]}], []]},
            "checks": ["passive-bracket-anomaly", "active-bracket"]}
    report = run_scenario(parse_scenario(data))
    assert report["gauge"] == "landau-inline" and report["status"] == "pass"


def test_crashing_check_is_recorded(tmp_path):
    # a field-free start with no duration cannot pick a time step
    data = {"field": {"builtin": "zero"}, "checks": ["conservation-drift", "active-bracket"]}
    report = run_scenario(parse_scenario(data))
    assert [c["status"] for c in report["checks"]] == ["error", "pass"]
    assert report["status"] == "fail"
    assert main(["run", write(tmp_path, data)]) == EXIT_FAIL


def test_not_applicable_does_not_fail():
    data = {"field": {"builtin": "dipole", "params": {"mu": ["0", "0", "1"]}},
            "checks": ["passive-generator-brackets", "ray-phase"]}
    report = run_scenario(parse_scenario(data))
    assert [c["status"] for c in report["checks"]] == ["not-applicable"] * 2
    assert report["status"] == "pass"


def test_deterministic_and_parallel_reports(tmp_path):
    checks = ["gauge-independence", "classical-quantum-consistency", "ray-phase", "bracket-gauge-invariance",
              "flow-commutation"]
    scenario = parse_scenario(uniform(checks))
    serial = strip_volatile(run_scenario(scenario))
    again = strip_volatile(run_scenario(scenario))
    parallel = strip_volatile(run_scenario(scenario, jobs=3))
    assert json.dumps(serial, sort_keys=True) == json.dumps(again, sort_keys=True)
    assert json.dumps(serial, sort_keys=True) == json.dumps(parallel, sort_keys=True)
    assert [c["name"] for c in parallel["checks"]] == checks


def test_seed_changes_sampling():
    a = Context(None, None, seed=1).rng("x")
    b = Context(None, None, seed=2).rng("x")
    assert random_poly(a, 3, 5, True) != random_poly(b, 3, 5, True)


def test_exports(tmp_path):
    data = uniform(["conservation-drift", "flow-commutation", "ray-phase"])
    report = run_scenario(parse_scenario(data), export_dir=tmp_path / "exports")
    files = {p.name for p in (tmp_path / "exports").iterdir()}
    assert {"trajectory.csv", "flow-passive-1.csv", "wavefunction-passive.csv",
            "wavefunction-passive.json"} <= files
    header = (tmp_path / "exports" / "trajectory.csv").read_text().splitlines()[0]
    assert header.startswith("t,x1,x2,x3,p1,p2,p3,pi1,pi2,pi3,H,G1")
    assert all(c["artifacts"] for c in report["checks"])


def test_outputs_block_sets_report_path(tmp_path):
    out = tmp_path / "nested" / "r.json"
    path = write(tmp_path, uniform(["active-bracket"], outputs={"report": str(out)}))
    assert main(["run", path]) == EXIT_PASS
    assert json.loads(out.read_text())["checks"][0]["anchor"] == "Eq. (14)"


def test_load_by_path_or_name(tmp_path):
    assert load_scenario("dipole-field").name == "dipole-field"
    with pytest.raises(ScenarioError):
        load_scenario("nothing-here")


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "magtrans", "version"], capture_output=True, text=True)
    assert done.returncode == 0 and __version__ in done.stdout
