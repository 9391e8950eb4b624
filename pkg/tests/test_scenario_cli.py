import json
import math
import os

import numpy as np
import pytest

from setmoduli import cli
from setmoduli.errors import ScenarioValidationError
from setmoduli.scenario import (
    load_scenario,
    reproduce_paper,
    run_scenario,
    scenario_from_dict,
    scenario_schema,
)

FAST_SCHEDULE = {"r0": 1e-1, "rho": 0.5, "levels": 8, "samples_per_radius": 32,
                 "seed": 7}


def lcp_doc(**overrides):
    doc = {
        "schema_version": 1,
        "name": "lcp-test",
        "family": {"kind": "lcp", "n": 1},
        "probe_directions": [[1.0, 1.0], [-1.0, -1.0]],
        "nominal_parameter": [-1.0, 1.0],
        "schedule": dict(FAST_SCHEDULE),
        "analyses": [
            {"kind": "calmness", "x": [1.0]},
            "lipusc",
            "hypotheses",
            {"kind": "verify_equality", "rel_tol": 0.05},
        ],
    }
    doc.update(overrides)
    return doc


class TestValidation:
    def test_wrong_schema_version(self):
        with pytest.raises(ScenarioValidationError) as e:
            scenario_from_dict(lcp_doc(schema_version=2))
        assert e.value.field == "schema_version"

    def test_mismatched_parameter_length_names_field(self):
        with pytest.raises(ScenarioValidationError) as e:
            scenario_from_dict(lcp_doc(nominal_parameter=[1.0, 2.0, 3.0]))
        assert e.value.field == "nominal_parameter"
        assert "length 2" in str(e.value)

    def test_unknown_family_kind(self):
        doc = lcp_doc()
        doc["family"] = {"kind": "nope"}
        with pytest.raises(ScenarioValidationError) as e:
            scenario_from_dict(doc)
        assert e.value.field == "family.kind"

    def test_analysis_family_compatibility(self):
        doc = lcp_doc(analyses=["exact_qp"])
        with pytest.raises(ScenarioValidationError) as e:
            scenario_from_dict(doc)
        assert "not valid for family kind" in str(e.value)

    def test_calmness_needs_point(self):
        doc = lcp_doc(analyses=[{"kind": "calmness"}])
        with pytest.raises(ScenarioValidationError):
            scenario_from_dict(doc)

    def test_bad_json_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json", encoding="utf-8")
        with pytest.raises(ScenarioValidationError):
            load_scenario(str(p))


class TestRunScenario:
    def test_run_and_report_roundtrip(self, tmp_path):
        scenario = scenario_from_dict(lcp_doc())
        report = run_scenario(scenario, out_dir=str(tmp_path))
        payload = json.loads((tmp_path / "report.json").read_text())
        assert payload["scenario_name"] == "lcp-test"
        kinds = [r["analysis"] for r in payload["results"]]
        assert kinds == ["calmness", "lipusc", "hypotheses", "verify_equality"]
        clm = payload["results"][0]["result"]
        assert clm["classification"] == "finite"
        assert abs(clm["value"] - 2.0) < 0.06
        eq = payload["results"][3]["result"]
        assert eq["verdict"] == "equal"

    def test_in_memory_equals_file_run(self, tmp_path):
        doc = lcp_doc()
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        r1 = run_scenario(str(path))
        r2 = run_scenario(scenario_from_dict(doc))
        d1, d2 = r1.to_dict(), r2.to_dict()
        d1.pop("wall_time_s"), d2.pop("wall_time_s")
        assert d1 == d2

    def test_traces_are_deterministic_and_well_formed(self, tmp_path):
        scenario = scenario_from_dict(lcp_doc())
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_scenario(scenario, out_dir=str(out1))
        run_scenario(scenario_from_dict(lcp_doc()), out_dir=str(out2))
        names = sorted(os.listdir(out1))
        assert "00_calmness.csv" in names
        assert "01_lipusc.csv" in names
        for name in names:
            if not name.endswith(".csv"):
                continue
            b1 = (out1 / name).read_bytes()
            b2 = (out2 / name).read_bytes()
            assert b1 == b2  # byte-identical under identical scenario + seed
            lines = b1.decode().strip().split("\n")
            assert lines[0] == "radius,worst_quotient,witness_param_packed,witness_x"
            radii = [float(l.split(",")[0]) for l in lines[1:]]
            assert radii == sorted(radii, reverse=True)

    def test_exact_qp_analysis(self):
        doc = {
            "schema_version": 1,
            "family": {"kind": "qp_optimal_canonical", "Q": [[1.0]], "A": [[1.0]]},
            "nominal_parameter": [-2.0, 1.0],
            "schedule": dict(FAST_SCHEDULE),
            "analyses": [{"kind": "exact_qp", "norm_choice": "spectral"}],
        }
        report = run_scenario(scenario_from_dict(doc))
        res = report.results[0][1]
        assert res["value"] == pytest.approx(1.0, abs=1e-9)
        assert res["certificates"][0]["D"] == [0]
        assert res["certificates"][0]["M_D"] == [[1.0, 1.0], [1.0, 0.0]]

    def test_exact_sublevel_analysis(self):
        doc = {
            "schema_version": 1,
            "family": {"kind": "sublevel_1d", "f": "sin",
                       "domain": [-2 * math.pi, 2 * math.pi]},
            "nominal_parameter": [0.0],
            "schedule": dict(FAST_SCHEDULE),
            "analyses": ["exact_sublevel"],
        }
        res = run_scenario(scenario_from_dict(doc)).results[0][1]
        assert res["value"] == pytest.approx(1.0, abs=1e-9)
        assert len(res["boundary_points"]) == 5

    def test_report_floats_roundtrip_losslessly(self, tmp_path):
        scenario = scenario_from_dict(lcp_doc(analyses=["lipusc"]))
        report = run_scenario(scenario, out_dir=str(tmp_path))
        payload = json.loads((tmp_path / "report.json").read_text())
        got = payload["results"][0]["result"]["value"]
        assert got == report.results[0][1].value  # exact, not approximate


class TestCli:
    def test_run_exit_codes(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(lcp_doc(analyses=["lipusc"])), encoding="utf-8")
        assert cli.main(["run", str(path)]) == 0
        assert cli.main(["run", str(tmp_path / "missing.json")]) == cli.EXIT_IO
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        assert cli.main(["run", str(bad)]) == cli.EXIT_VALIDATION
        invalid = tmp_path / "invalid.json"
        invalid.write_text(json.dumps(lcp_doc(nominal_parameter=[1.0])),
                           encoding="utf-8")
        assert cli.main(["run", str(invalid)]) == cli.EXIT_VALIDATION

    def test_run_precondition_failure_exit_code(self, tmp_path):
        # empty nominal image: x <= -2 and x >= -1
        doc = {
            "schema_version": 1,
            "family": {"kind": "lp_feasible", "A0": [[1.0], [-1.0]],
                       "b0": [-2.0, 1.0]},
            "nominal_parameter": [1.0, -1.0, -2.0, 1.0],
            "schedule": dict(FAST_SCHEDULE),
            "analyses": ["lipusc"],
        }
        path = tmp_path / "s.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        assert cli.main(["run", str(path)]) == cli.EXIT_SOLVER

    def test_overrides(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(lcp_doc(analyses=["lipusc"])), encoding="utf-8")
        rc = cli.main(["run", str(path), "--seed", "9", "--schedule-levels", "6",
                       "--samples", "16"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["seed"] == 9
        table = payload["results"][0]["result"]["per_radius_worst"]
        assert len(table) == 6

    def test_list_families_and_schema(self, capsys):
        assert cli.main(["list-families"]) == 0
        out = capsys.readouterr().out
        assert "lcp" in out and "sip_grid" in out
        assert cli.main(["schema"]) == 0
        schema = json.loads(capsys.readouterr().out)
        assert schema["$schema_version"] == 1
        assert "analyses" in schema["fields"]

    def test_reproduce_cli(self, capsys):
        assert cli.main(["reproduce", "lcp", "--seed", "0"]) == 0
        out = capsys.readouterr().out
        assert "pass" in out and "FAIL" not in out


class TestReproduce:
    def test_reproduce_emits_traces(self, tmp_path):
        report, rows = reproduce_paper("counterexample_escape", out_dir=str(tmp_path))
        assert all(r.passed for r in rows)
        files = os.listdir(tmp_path)
        assert "report.json" in files
        assert any(f.endswith(".csv") for f in files)
        # the final rows of the divergent trace grow steeply
        trace = sorted(f for f in files if "lipusc" in f and f.endswith(".csv"))[0]
        lines = (tmp_path / trace).read_text().strip().split("\n")[1:]
        worst = [float(l.split(",")[1]) for l in lines]
        assert worst[-1] >= 4.0 * worst[-3]
