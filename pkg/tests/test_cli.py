import json

import numpy as np
import pytest

from clonekit.cli import main


def write_task(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


FEAS_TASK = {
    "command": "feasibility",
    "kind": "joint",
    "alpha": 0.5,
    "beta": 0.8,
    "m": 1,
    "r": [[0.8], [0.8]],
}


class TestFeasibilityCommand:
    def test_boundary_report(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        code, out, err = run(capsys, ["feasibility", "--task", task])
        assert code == 0, err
        report = json.loads(out)
        assert report["results"]["feasible"] is True
        assert abs(report["results"]["slack"]) < 1e-12
        assert report["tool_version"] == "0.1.0"
        assert report["tolerance"] == pytest.approx(1e-9)

    def test_set_override(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        code, out, _ = run(capsys, ["feasibility", "--task", task, "--set", "r.0.0=0.9", "--set", "r.1.0=0.9"])
        assert code == 0
        assert json.loads(out)["results"]["feasible"] is False

    def test_env_tolerance(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("CLONEKIT_TOL", "1e-6")
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        code, out, _ = run(capsys, ["feasibility", "--task", task])
        assert code == 0
        assert json.loads(out)["tolerance"] == pytest.approx(1e-6)

    def test_flag_beats_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("CLONEKIT_TOL", "1e-6")
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        code, out, _ = run(capsys, ["feasibility", "--task", task, "--tol", "1e-12"])
        assert json.loads(out)["tolerance"] == pytest.approx(1e-12)


class TestValidationExitCode:
    def test_overlap_out_of_range(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", {**FEAS_TASK, "alpha": 1.5})
        code, _, err = run(capsys, ["feasibility", "--task", task])
        assert code == 2
        assert "validation" in err
        beta_task = write_task(tmp_path, "t2.json", {**FEAS_TASK, "beta": 1.5})
        assert run(capsys, ["feasibility", "--task", beta_task])[0] == 2

    def test_negative_r(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", {**FEAS_TASK, "r": [[-0.1], [0.1]]})
        assert run(capsys, ["feasibility", "--task", task])[0] == 2

    def test_bad_priors(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "optimize", "kind": "ncm", "alpha": 0.5, "m": 1, "priors": [0.7, 0.2]},
        )
        assert run(capsys, ["optimize", "--task", task])[0] == 2

    def test_command_mismatch(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        assert run(capsys, ["uqcm", "--task", task])[0] == 2

    def test_missing_field(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", {"command": "feasibility", "kind": "joint"})
        assert run(capsys, ["feasibility", "--task", task])[0] == 2

    def test_bad_set_path(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        assert run(capsys, ["feasibility", "--task", task, "--set", "r.x=1"])[0] == 2

    def test_boolean_overlap_rejected(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", {**FEAS_TASK, "alpha": True})
        assert run(capsys, ["feasibility", "--task", task])[0] == 2

    def test_simulate_needs_seed(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "simulate", "kind": "joint", "alpha": 0.5, "beta": 0.9, "m": 1,
             "r": [[0.5], [0.5]], "shots": 100},
        )
        assert run(capsys, ["simulate", "--task", task])[0] == 2


class TestErrorExitCodes:
    def test_infeasible_is_3(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "decompose", "kind": "joint", "alpha": 0.5, "beta": 0.8, "m": 1,
             "r": [[0.9], [0.9]]},
        )
        code, _, err = run(capsys, ["decompose", "--task", task])
        assert code == 3
        assert "infeasible" in err

    def test_numerical_failure_is_4(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "bounds", "alpha": 1.0, "beta": 0.5, "m": 1, "p_m": 1.0,
             "quantities": ["discrimination_bound"]},
        )
        code, _, err = run(capsys, ["bounds", "--task", task])
        assert code == 4
        assert "numerical" in err


class TestWorkedCommands:
    def test_decompose_worked_instance(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "decompose", "kind": "joint", "alpha": 0.5, "beta": 0.9, "m": 1,
             "r": [[0.5], [0.5]]},
        )
        code, out, _ = run(capsys, ["decompose", "--task", task])
        assert code == 0
        results = json.loads(out)["results"]
        assert results["case"] == "case2_II"
        assert results["root_t"] == pytest.approx(0.4, abs=1e-9)
        assert results["supp_r"][0][0] == pytest.approx(0.2, abs=1e-9)
        assert results["ncm_r"][0][0] == pytest.approx(0.375, abs=1e-9)

    def test_uqcm(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", {"command": "uqcm", "amplitudes": [0.6, 0.8]})
        code, out, _ = run(capsys, ["uqcm", "--task", task])
        assert code == 0
        assert json.loads(out)["results"]["distance"] == pytest.approx(1 / 18, abs=1e-12)

    def test_compose(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "compose",
             "supp": {"kind": "supplementary", "alpha": 0.5, "beta": 0.9, "m": 1, "r": [[0.2], [0.2]]},
             "ncm": {"kind": "ncm", "alpha": 0.5, "m": 1, "r": [[0.375], [0.375]]}},
        )
        code, out, _ = run(capsys, ["compose", "--task", task])
        assert code == 0
        results = json.loads(out)["results"]
        assert results["r"][0][0] == pytest.approx(0.5, abs=1e-12)
        assert results["feasibility"]["feasible"] is True

    def test_optimize_with_oracle(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "optimize", "kind": "ncm", "alpha": 0.5, "m": 1,
             "oracle_resolution": 1e-3},
        )
        code, out, _ = run(capsys, ["optimize", "--task", task])
        assert code == 0
        results = json.loads(out)["results"]
        assert results["value"] == pytest.approx(2 / 3, abs=1e-6)
        assert abs(results["value"] - results["oracle_value"]) <= 1e-3

    def test_synthesize(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "synthesize", "kind": "joint", "alpha": 0.5, "beta": 0.9, "m": 1,
             "r": [[0.5], [0.5]]},
        )
        code, out, _ = run(capsys, ["synthesize", "--task", task])
        assert code == 0
        results = json.loads(out)["results"]
        assert results["unitarity_defect"] < 1e-10
        assert results["slot_probs"][0][0] == pytest.approx(0.5, abs=1e-9)
        assert results["global_success"] == pytest.approx(0.5, abs=1e-9)

    def test_simulate_determinism(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "simulate", "kind": "joint", "alpha": 0.5, "beta": 0.9, "m": 1,
             "r": [[0.5], [0.5]], "shots": 2000, "input_index": 0},
        )
        code1, out1, _ = run(capsys, ["simulate", "--task", task, "--seed", "42"])
        code2, out2, _ = run(capsys, ["simulate", "--task", task, "--seed", "42"])
        assert code1 == code2 == 0
        assert out1 == out2
        counts = json.loads(out1)["results"]["counts"]
        assert sum(counts.values()) == 2000

    def test_explicit_states_checked(self, tmp_path, capsys):
        s = np.sqrt(0.75)
        task = write_task(
            tmp_path, "t.json",
            {"command": "synthesize", "kind": "joint", "alpha": 0.5, "beta": 0.9, "m": 1,
             "r": [[0.5], [0.5]],
             "states": {"psi": [[1.0, 0.0], [0.5, s]], "phi": [[1.0, 0.0], [0.9, np.sqrt(1 - 0.81)]]}},
        )
        assert run(capsys, ["synthesize", "--task", task])[0] == 0
        bad = write_task(
            tmp_path, "bad.json",
            {"command": "synthesize", "kind": "joint", "alpha": 0.6, "beta": 0.9, "m": 1,
             "r": [[0.5], [0.5]],
             "states": {"psi": [[1.0, 0.0], [0.5, s]], "phi": [[1.0, 0.0], [0.9, np.sqrt(1 - 0.81)]]}},
        )
        assert run(capsys, ["synthesize", "--task", bad])[0] == 2


class TestReportRoundTrip:
    def test_byte_identical_rerun(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        _, out1, _ = run(capsys, ["feasibility", "--task", task])
        _, out2, _ = run(capsys, ["feasibility", "--task", task])
        assert out1 == out2

    def test_report_reingestion(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        _, out1, _ = run(capsys, ["feasibility", "--task", task])
        report_path = tmp_path / "report.json"
        report_path.write_text(out1)
        _, out2, _ = run(capsys, ["feasibility", "--task", str(report_path)])
        assert out1 == out2

    def test_out_file(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        out_path = tmp_path / "report.json"
        code, out, _ = run(capsys, ["feasibility", "--task", task, "--out", str(out_path)])
        assert code == 0 and out == ""
        assert json.loads(out_path.read_text())["results"]["feasible"] is True


class TestSweep:
    def test_advantage_sweep_monotone(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "sweep",
             "run": {"command": "bounds", "alpha": 0.0, "beta": 0.8, "m": 1,
                     "quantities": ["advantage"]},
             "sweep": [{"name": "alpha", "start": 0.0, "stop": 0.9, "steps": 7}],
             "select": ["advantage.delta"]},
        )
        code, out, _ = run(capsys, ["sweep", "--task", task])
        assert code == 0
        results = json.loads(out)["results"]
        assert results["columns"] == ["alpha", "advantage.delta"]
        deltas = [row[1] for row in results["rows"]]
        assert all(d >= -1e-12 for d in deltas)
        assert all(b >= a - 1e-12 for a, b in zip(deltas, deltas[1:]))

    def test_single_point_sweep_matches_direct(self, tmp_path, capsys):
        direct_task = write_task(tmp_path, "d.json", {"command": "uqcm", "amplitudes": [0.6, 0.8]})
        _, direct_out, _ = run(capsys, ["uqcm", "--task", direct_task])
        direct = json.loads(direct_out)["results"]["distance"]
        sweep_task = write_task(
            tmp_path, "s.json",
            {"command": "sweep",
             "run": {"command": "uqcm", "amplitudes": [0.6, 0.8]},
             "sweep": [{"name": "amplitudes.0", "start": 0.6, "stop": 0.6, "steps": 1}]},
        )
        _, sweep_out, _ = run(capsys, ["sweep", "--task", sweep_task])
        results = json.loads(sweep_out)["results"]
        assert results["rows"][0][results["columns"].index("distance")] == direct

    def test_depth_sweep_nondecreasing(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "sweep",
             "run": {"command": "bounds", "alpha": 0.6, "beta": 0.5, "m": 1,
                     "quantities": ["single_slot_optimum"]},
             "sweep": [{"name": "m", "start": 1, "stop": 8, "steps": 8}],
             "select": ["single_slot_optimum"]},
        )
        code, out, _ = run(capsys, ["sweep", "--task", task])
        assert code == 0
        vals = [row[1] for row in json.loads(out)["results"]["rows"]]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_csv_emission(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "sweep",
             "run": {"command": "bounds", "alpha": 0.0, "quantities": ["duan_guo"]},
             "sweep": [{"name": "alpha", "start": 0.0, "stop": 0.5, "steps": 3}],
             "select": ["duan_guo"]},
        )
        code, out, _ = run(capsys, ["sweep", "--task", task, "--format", "csv"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "alpha,duan_guo"
        assert len(lines) == 4
        assert lines[1].split(",")[1] == "1"

    def test_csv_only_for_sweep(self, tmp_path, capsys):
        task = write_task(tmp_path, "t.json", FEAS_TASK)
        assert run(capsys, ["feasibility", "--task", task, "--format", "csv"])[0] == 2

    def test_axis_budget(self, tmp_path, capsys):
        task = write_task(
            tmp_path, "t.json",
            {"command": "sweep",
             "run": {"command": "bounds", "alpha": 0.0, "quantities": ["duan_guo"]},
             "sweep": [{"name": "alpha", "start": 0.0, "stop": 0.5, "steps": 20000}]},
        )
        assert run(capsys, ["sweep", "--task", task])[0] == 2
