"""End-to-end command tests: exit codes, artifacts, config precedence."""

import csv
import json
import math

import numpy as np
import pytest

from tula.analysis import classify_regime, estimate_lsi
from tula.cli import dump_config, load_config, main, run_gradient_suite
from tula.dynamics import TransformedPotential
from tula.targets import ExampleKind, make_example


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class TestConfigHandling:
    def test_dump_load_round_trip(self, tmp_path):
        opts = {"target": "t3_2", "b": 0.75, "assumption": "A4", "L": 6.0}
        path = tmp_path / "config.json"
        dump_config(opts, path)
        assert load_config(path) == opts

    def test_flags_override_config_which_overrides_defaults(self, tmp_path):
        cfg = tmp_path / "classify.json"
        dump_config({"assumption": "strong", "vartheta": 2.5, "b": 0.5,
                     "rho": 1.0, "d": 1}, cfg)
        # config alone: vartheta 2.5 > rho/(2b) = 1, the weak branch
        rc = main(["classify", "--config", str(cfg), "--out", str(tmp_path / "a")])
        assert rc == 0
        assert read_json(tmp_path / "a" / "verdict.json")["regime"] == "weak_poincare"
        # the explicit flag wins: vartheta 0.5 < 1 is super-Poincare
        rc = main(["classify", "--config", str(cfg), "--vartheta", "0.5",
                   "--out", str(tmp_path / "b")])
        assert rc == 0
        assert read_json(tmp_path / "b" / "verdict.json")["regime"] == "super_poincare"

    def test_unknown_config_key_is_a_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        dump_config({"assumption": "strong", "vartheta": 1.0, "b": 0.5,
                     "rho": 1.0, "stepsize": 0.1}, cfg)
        rc = main(["classify", "--config", str(cfg)])
        assert rc == 2
        assert "stepsize" in capsys.readouterr().err

    def test_config_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        rc = main(["classify", "--config", str(path)])
        assert rc == 2

    def test_missing_config_file(self, tmp_path):
        rc = main(["classify", "--config", str(tmp_path / "absent.json")])
        assert rc == 2


class TestUsageErrors:
    def test_no_command_exits_via_argparse(self):
        with pytest.raises(SystemExit):
            main([])

    def test_missing_target(self, capsys):
        assert main(["check", "--assumption", "A4"]) == 2
        assert "target" in capsys.readouterr().err

    def test_unknown_target(self, capsys):
        assert main(["check", "--target", "cauchy", "--assumption", "A4"]) == 2
        assert "unknown target" in capsys.readouterr().err

    def test_sample_needs_gamma_and_steps(self, tmp_path, capsys):
        rc = main(["sample", "--target", "t2_3", "--out", str(tmp_path)])
        assert rc == 2
        assert "gamma" in capsys.readouterr().err

    def test_classify_needs_constants(self, capsys):
        assert main(["classify", "--assumption", "strong", "--b", "0.5"]) == 2


class TestClassifyCommand:
    def test_matches_library_verdict(self, tmp_path):
        rc = main(["classify", "--assumption", "dissipativity", "--vartheta", "1.0",
                   "--d", "3", "--b", "0.75", "--alpha", "2.0", "--A", "3.0",
                   "--out", str(tmp_path)])
        assert rc == 0
        payload = read_json(tmp_path / "verdict.json")
        direct = classify_regime("dissipativity", vartheta=1.0, dimension=3,
                                 b=0.75, alpha=2.0, A=3.0).to_dict()
        assert payload == direct

    def test_stdout_carries_the_verdict(self, tmp_path, capsys):
        main(["classify", "--assumption", "strong", "--vartheta", "0.5",
              "--b", "0.5", "--d", "3", "--rho", "1.0", "--out", str(tmp_path)])
        out = json.loads(capsys.readouterr().out)
        assert out["regime"] == "super_poincare"


class TestCheckCommand:
    def test_passing_candidate_exits_zero(self, tmp_path):
        rc = main(["check", "--target", "t3_2", "--b", "0.75",
                   "--assumption", "A4", "--L", "6.0", "--out", str(tmp_path)])
        assert rc == 0
        payload = read_json(tmp_path / "assumption.json")
        assert payload["pass"] is True
        assert payload["fitted_constants"]["L"] == 6.0
        echo = payload["target"]
        assert echo["target"] == "t3_2" and echo["b"] == 0.75

    def test_failing_candidate_exits_one(self, tmp_path):
        rc = main(["check", "--target", "t3_2", "--b", "0.75",
                   "--assumption", "A4", "--L", "0.5", "--out", str(tmp_path)])
        assert rc == 1
        assert read_json(tmp_path / "assumption.json")["pass"] is False

    def test_tail_flag_maps_to_constant(self, tmp_path):
        rc = main(["check", "--target", "t3_2", "--b", "0.75",
                   "--assumption", "A5", "--C-tail", "0.001", "--out", str(tmp_path)])
        assert rc == 1
        payload = read_json(tmp_path / "assumption.json")
        assert payload["fitted_constants"]["C_tail"] == 0.001

    def test_custom_grid(self, tmp_path):
        rc = main(["check", "--target", "t3_2", "--b", "0.75",
                   "--assumption", "A4", "--L", "6.0", "--grid-min", "2.0",
                   "--grid-max", "50.0", "--grid-points", "64",
                   "--out", str(tmp_path)])
        assert rc == 0
        grid = read_json(tmp_path / "assumption.json")["grid"]
        assert len(grid) == 64
        assert grid[0] == pytest.approx(2.0)
        assert grid[-1] == pytest.approx(50.0)


class TestLsiCommand:
    def test_artifacts_match_direct_estimate(self, tmp_path):
        rc = main(["lsi", "--target", "example3", "--d", "4",
                   "--grid-size", "256", "--out", str(tmp_path)])
        assert rc == 0
        payload = read_json(tmp_path / "lsi.json")
        entry = make_example(ExampleKind.EXAMPLE3, 4, vartheta=1.0)
        direct = estimate_lsi(TransformedPotential(entry.potential, entry.transform),
                              grid_size=256)
        assert payload["bound"] == pytest.approx(direct.bound, rel=1e-12)
        assert payload["a0"] == pytest.approx(direct.a0, rel=1e-12)
        assert payload["bound"] == pytest.approx(16.0 / 28.0, rel=1e-3)
        with open(tmp_path / "lsi_table.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["r", "lambda1", "lambda2", "beta_bar"]
        assert len(rows) == 257
        assert float(rows[1][0]) == pytest.approx(direct.radii[0])

    def test_inapplicable_profile_exits_one(self, tmp_path, capsys):
        rc = main(["lsi", "--target", "t2_1", "--b", "1.0", "--out", str(tmp_path)])
        assert rc == 1
        assert "nonpositive" in capsys.readouterr().err


class TestGradcheckCommand:
    def test_small_suite_passes(self, tmp_path):
        rc = main(["gradcheck", "--target", "t", "--d", "2", "--kappa", "2.5",
                   "--points", "40", "--seed", "1", "--out", str(tmp_path)])
        assert rc == 0
        payload = read_json(tmp_path / "gradcheck.json")
        assert payload["pass"] is True
        assert payload["points"] == 40
        assert payload["grad_max_rel"] < payload["grad_tol"]
        assert payload["hess_max_rel"] < payload["hess_tol"]

    def test_suite_rejects_empty(self):
        entry = make_example(ExampleKind.MULTIVARIATE_T, 2, kappa=2.5)
        tp = TransformedPotential(entry.potential, entry.transform)
        with pytest.raises(ValueError, match="num_points"):
            run_gradient_suite(tp, num_points=0)


class TestSampleCommand:
    def test_artifacts_without_diagnostics(self, tmp_path):
        rc = main(["sample", "--target", "t2_3", "--gamma", "0.01",
                   "--steps", "200", "--seed", "0", "--skip-diagnostics",
                   "--out", str(tmp_path)])
        assert rc == 0
        summary = read_json(tmp_path / "summary.json")
        assert summary["any_diverged"] is False
        assert summary["chains"][0]["recorded"] == 201
        assert summary["target"]["target"] == "t2_3"
        assert "transform" in summary
        assert not (tmp_path / "diagnostics.json").exists()

        with open(tmp_path / "trace.csv", newline="") as fh:
            trace = list(csv.DictReader(fh))
        assert len(trace) == 201
        with open(tmp_path / "chain.csv", newline="") as fh:
            chain_rows = [r for r in csv.DictReader(fh) if r["space"] == "x"]
        # the trace radius is the norm of the paired chain.csv x row
        x0 = np.array([float(chain_rows[0]["coord0"]), float(chain_rows[0]["coord1"])])
        assert float(trace[0]["radius_x"]) == pytest.approx(np.linalg.norm(x0), rel=1e-12)

    def test_diagnostics_artifact(self, tmp_path):
        rc = main(["sample", "--target", "t2_3", "--gamma", "0.01",
                   "--steps", "400", "--seed", "2", "--chains", "2",
                   "--threshold", "2.0", "--threshold", "5.0",
                   "--out", str(tmp_path)])
        assert rc == 0
        payload = read_json(tmp_path / "diagnostics.json")
        assert payload["burn_in"] == 200  # half of the recorded rows
        assert [t["threshold"] for t in payload["tails"]] == [2.0, 5.0]
        assert "pass" in payload

    def test_explicit_burn_in(self, tmp_path):
        rc = main(["sample", "--target", "t2_3", "--gamma", "0.01",
                   "--steps", "120", "--seed", "2", "--burn-in", "30",
                   "--out", str(tmp_path)])
        assert rc == 0
        assert read_json(tmp_path / "diagnostics.json")["burn_in"] == 30

    def test_divergence_exits_one_without_diagnostics(self, tmp_path, capsys):
        rc = main(["sample", "--target", "example6", "--d", "2",
                   "--gamma", "5.0", "--steps", "300", "--seed", "1",
                   "--out", str(tmp_path)])
        assert rc == 1
        assert "divergence" in capsys.readouterr().err
        assert read_json(tmp_path / "summary.json")["any_diverged"] is True
        assert not (tmp_path / "diagnostics.json").exists()
