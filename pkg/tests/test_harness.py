import copy
import json
import math

import numpy as np
import pytest

from lvsweep import cli, harness
from lvsweep.errors import ValidationError

BASE_DOC = {
    "schema_version": 1,
    "scenario": "soft",
    "params": {
        "f_A": 1.0, "f_a": 2.0, "D_A": 0.0, "D_a": 0.0,
        "C_AA": 1.0, "C_Aa": 0.9, "C_aA": 0.5, "C_aa": 1.0,
    },
    "scaling": [{"K": 150, "r_K": 0.0}],
    "n_replicates": 40,
    "seed_base": 424242,
    "epsilon": 0.1,
    "z": [0.3, 0.3, 0.2, 0.2],
}


def _doc(**overrides):
    doc = copy.deepcopy(BASE_DOC)
    doc.update(overrides)
    return doc


class TestSpecValidation:
    def test_good_document_loads(self):
        spec = harness.load_spec(_doc())
        assert spec.scenario == "soft"
        assert spec.scaling[0].K == 150

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError, match="unknown configuration keys"):
            harness.load_spec(_doc(recombination=0.1))

    def test_unknown_param_keys_rejected(self):
        doc = _doc()
        doc["params"]["gamma"] = 1.0
        with pytest.raises(ValidationError, match="unknown params keys"):
            harness.load_spec(doc)

    def test_schema_version_checked(self):
        with pytest.raises(ValidationError, match="schema_version"):
            harness.load_spec(_doc(schema_version=99))

    def test_zero_replicates_rejected(self):
        with pytest.raises(ValidationError, match="n_replicates"):
            harness.load_spec(_doc(n_replicates=0))

    def test_assumption_violation_names_inequality(self):
        doc = _doc()
        doc["params"]["C_aA"] = 5.0  # S_aA = 2 - 5 < 0
        with pytest.raises(ValidationError, match="S_aA"):
            harness.load_spec(doc)

    def test_hard_requires_fraction(self):
        doc = _doc(scenario="hard")
        del doc["z"]
        with pytest.raises(ValidationError, match="z_Ab1_frac"):
            harness.load_spec(doc)

    def test_soft_requires_mutant_mass(self):
        with pytest.raises(ValidationError, match="z_ab1"):
            harness.load_spec(_doc(z=[0.5, 0.5, 0.0, 0.0]))

    def test_monomorphic_requires_window(self):
        doc = _doc(scenario="monomorphic")
        del doc["z"]
        with pytest.raises(ValidationError, match="t_window"):
            harness.load_spec(doc)

    def test_spec_roundtrip(self):
        spec = harness.load_spec(_doc())
        again = harness.load_spec(spec.to_json_dict())
        assert again.to_json_dict() == spec.to_json_dict()


def _strip_wall_time(report: dict) -> dict:
    out = json.loads(json.dumps(report))
    out["meta"]["wall_time_s"] = None
    return out


class TestRunExperiment:
    def test_soft_cell_matches_trivial_prediction(self, tmp_path):
        # r = 0: the mean final proportion sits near z_ab1/z_a = 0.5
        spec = harness.load_spec(_doc(n_replicates=60))
        report = harness.run_experiment(spec, out_dir=tmp_path, progress=False)
        cell = report["cells"][0]
        assert cell["predicted"] == pytest.approx(0.5, abs=1e-9)
        lo, hi = cell["p_ci"]
        assert lo - 0.02 <= 0.5 <= hi + 0.02
        assert cell["n"] == 60
        assert not cell["degraded"]

    def test_report_written_and_deterministic(self, tmp_path):
        spec = harness.load_spec(_doc())
        r1 = harness.run_experiment(spec, out_dir=tmp_path / "a", progress=False)
        r2 = harness.run_experiment(spec, out_dir=tmp_path / "b", progress=False)
        a = _strip_wall_time(r1)
        b = _strip_wall_time(r2)
        a["meta"]["replicate_csv"] = b["meta"]["replicate_csv"] = []
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
        on_disk = json.loads((tmp_path / "a" / "report.json").read_text())
        assert _strip_wall_time(on_disk) == _strip_wall_time(r1)

    def test_worker_count_invariance(self, tmp_path):
        spec = harness.load_spec(_doc(n_replicates=24))
        r1 = harness.run_experiment(spec, out_dir=tmp_path / "w1", workers=1,
                                    progress=False)
        r2 = harness.run_experiment(spec, out_dir=tmp_path / "w2", workers=2,
                                    progress=False)
        a = _strip_wall_time(r1)
        b = _strip_wall_time(r2)
        a["meta"]["replicate_csv"] = b["meta"]["replicate_csv"] = []
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_csv_reproduces_aggregates(self, tmp_path):
        spec = harness.load_spec(_doc(n_replicates=50))
        report = harness.run_experiment(spec, out_dir=tmp_path, progress=False)
        cell = report["cells"][0]
        csv_path = tmp_path / "replicates_K150_r0.0.csv"
        lines = csv_path.read_text().strip().split("\n")
        header = lines[0].split(",")
        rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
        fixed = [r for r in rows if r["fixed"] == "1"]
        assert len(fixed) == cell["n_fixed"]
        p_vals = [float(r["p_ab1_final"]) for r in fixed if r["p_ab1_final"]]
        assert float(np.mean(p_vals)) == pytest.approx(cell["mean_p_ab1"], abs=1e-12)
        n_eff = sum(1 for r in rows if r["status"] != "truncated")
        assert len(fixed) / n_eff == pytest.approx(cell["fix_frac"], abs=1e-12)

    def test_breach_detection(self, tmp_path):
        spec = harness.load_spec(_doc(n_replicates=30, tolerance=1e-9))
        report = harness.run_experiment(spec, out_dir=tmp_path, progress=False)
        assert harness.report_breaches(report)  # MC gap exceeds 1e-9
        spec2 = harness.load_spec(_doc(n_replicates=30, tolerance=0.9))
        report2 = harness.run_experiment(spec2, out_dir=None, progress=False)
        assert not harness.report_breaches(report2)

    def test_monomorphic_cell(self):
        # nbar_a = 2: the time-averaged density should sit near it
        doc = _doc(scenario="monomorphic", n_replicates=6,
                   t_window=[5.0, 20.0], dt_sample=0.1)
        del doc["z"]
        doc["scaling"] = [{"K": 400, "r_K": 0.0}]
        report = harness.run_experiment(harness.load_spec(doc), progress=False)
        cell = report["cells"][0]
        assert cell["predicted"] == pytest.approx(2.0)
        assert abs(cell["gap"]) < 0.2

    def test_jumps_cell(self):
        doc = _doc(scenario="jumps", n_replicates=120)
        del doc["z"]
        doc["scaling"] = [{"K": 200, "r_K": 0.1}]
        report = harness.run_experiment(harness.load_spec(doc), progress=False)
        cell = report["cells"][0]
        assert cell["extra"]["n_conditioned"] >= 30
        # scalar = r_K * mean weighted upcrossing sum, bootstrap CI around it
        lo, hi = cell["extra"]["scalar_ci"]
        assert lo <= cell["extra"]["scalar_rK_weighted_upcrossings"] <= hi

    def test_genealogy_cell_and_csv(self, tmp_path):
        doc = _doc(scenario="genealogy", n_replicates=25, z_Ab1_frac=0.5)
        del doc["z"]
        doc["scaling"] = [{"K": 150, "r_K": 0.2}]
        spec = harness.load_spec(doc)
        report = harness.run_experiment(spec, out_dir=tmp_path, progress=False)
        cell = report["cells"][0]
        assert cell["extra"]["tag_violations"] == 0
        gpath = tmp_path / "origin_stats_K150_r0.2.csv"
        first = gpath.read_text().split("\n")[0]
        assert first == ("replicate,fixed,frac_zero_mrec,frac_one_mrec,"
                         "frac_multi_mrec,frac_b1_at_Teps")


class TestPredictTable:
    def test_hard_weak_row(self, tmp_path):
        K = 10_000
        r_K = 1.5 / (2.0 * math.log(K))
        doc = _doc(scenario="hard", regime="weak", z_Ab1_frac=0.5)
        del doc["z"]
        doc["scaling"] = [{"K": K, "r_K": r_K}]
        table = harness.predict_table(harness.load_spec(doc))
        row = table.split("\n")[1]
        assert "0.632121" in row
        assert "0.683940" in row or "0.683939" in row

    def test_soft_zero_recombination_row(self):
        table = harness.predict_table(harness.load_spec(_doc()))
        assert "0.000000" in table.split("\n")[1]


class TestCli:
    def _write(self, tmp_path, doc):
        p = tmp_path / "config.json"
        p.write_text(json.dumps(doc))
        return str(p)

    def test_predict_command(self, tmp_path, capsys):
        rc = cli.main(["predict", "--config", self._write(tmp_path, _doc())])
        assert rc == cli.EXIT_OK
        assert "p_ab1_limit" in capsys.readouterr().out

    def test_experiment_command(self, tmp_path):
        cfg = self._write(tmp_path, _doc(n_replicates=10))
        rc = cli.main(["experiment", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == cli.EXIT_OK
        assert (tmp_path / "out" / "report.json").exists()

    def test_validation_error_exit_code(self, tmp_path):
        rc = cli.main(["predict", "--config",
                       self._write(tmp_path, _doc(bogus_key=1))])
        assert rc == cli.EXIT_VALIDATION

    def test_tolerance_breach_exit_code(self, tmp_path):
        cfg = self._write(tmp_path, _doc(n_replicates=10, tolerance=1e-12))
        rc = cli.main(["experiment", "--config", cfg, "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_TOLERANCE

    def test_simulate_writes_trajectory(self, tmp_path):
        cfg = self._write(tmp_path, _doc())
        rc = cli.main(["simulate", "--config", cfg, "--dt", "0.5",
                       "--out", str(tmp_path / "sim")])
        assert rc == cli.EXIT_OK
        traj = (tmp_path / "sim" / "trajectory_0.csv").read_text()
        assert traj.startswith("t,n_Ab1,n_Ab2,n_ab1,n_ab2")

    def test_ode_command(self, tmp_path):
        cfg = self._write(tmp_path, _doc())
        rc = cli.main(["ode", "--config", cfg, "--r", "0.3", "--t-end", "20",
                       "--out", str(tmp_path / "ode")])
        assert rc == cli.EXIT_OK
        head = (tmp_path / "ode" / "ode_trajectory.csv").read_text().split("\n")[0]
        assert head == "t,n_Ab1,n_Ab2,n_ab1,n_ab2,h,F"

    def test_bdp_check_command(self, tmp_path):
        doc = _doc(scenario="bdp-check", n_replicates=25)
        del doc["z"]
        rc = cli.main(["bdp-check", "--config", self._write(tmp_path, doc),
                       "--out", str(tmp_path / "bdp")])
        assert rc == cli.EXIT_OK
        report = json.loads((tmp_path / "bdp" / "report.json").read_text())
        assert report["cells"][0]["extra"]["total_violations"] == 0
