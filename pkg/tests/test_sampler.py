"""Langevin loop tests: determinism, divergence handling, planning, CSV."""

import csv
import math

import numpy as np
import pytest

from tula.dynamics import TransformedPotential
from tula.sampler import (
    ChainRun,
    DivergenceError,
    SamplerConfig,
    plan_step_size,
    run_summary,
    run_tula,
    run_ula,
    tula_step,
    write_chain_csv,
)
from tula.targets import ExampleKind, make_example
from tula.transform import h_forward

# tula step from y = (1, 0), gamma = 0.01, zero noise, on the t-dist
# d=2 kappa=1 b=1 potential: 1 - 0.01 * (6e^2/(1+e^2) - 4)  [mpmath, 40 digits]
STEP_COORD0 = 0.9871521753213271


@pytest.fixture
def tp():
    entry = make_example(ExampleKind.EXAMPLE6, 2, vartheta=1.0)
    return TransformedPotential(entry.potential, entry.transform)


@pytest.fixture
def tp_t21():
    entry = make_example(ExampleKind.MULTIVARIATE_T, 2, kappa=1.0, b=1.0)
    return TransformedPotential(entry.potential, entry.transform)


class TestTulaStep:
    def test_frozen_drift_step(self, tp_t21):
        y = tula_step(tp_t21, np.array([1.0, 0.0]), 0.01, np.zeros(2))
        np.testing.assert_allclose(y, [STEP_COORD0, 0.0], rtol=1e-13, atol=1e-15)

    def test_noise_enters_with_sqrt_scale(self, tp_t21):
        noise = np.array([0.5, -1.0])
        drift_only = tula_step(tp_t21, np.array([1.0, 0.0]), 0.04, np.zeros(2))
        stepped = tula_step(tp_t21, np.array([1.0, 0.0]), 0.04, noise)
        np.testing.assert_allclose(stepped - drift_only,
                                   math.sqrt(0.08) * noise, rtol=1e-13)

    def test_rejects_nonfinite_state(self, tp_t21):
        with pytest.raises(DivergenceError):
            tula_step(tp_t21, np.array([np.nan, 0.0]), 0.01, np.zeros(2))

    def test_rejects_bad_gamma_and_shape(self, tp_t21):
        with pytest.raises(ValueError, match="gamma"):
            tula_step(tp_t21, np.zeros(2), 0.0, np.zeros(2))
        with pytest.raises(ValueError, match="noise shape"):
            tula_step(tp_t21, np.zeros(2), 0.01, np.zeros(3))


class TestSamplerConfig:
    def test_validation(self):
        with pytest.raises(ValueError, match="step_size"):
            SamplerConfig(step_size=0.0, num_steps=10)
        with pytest.raises(ValueError, match="num_steps"):
            SamplerConfig(step_size=0.1, num_steps=0)
        with pytest.raises(ValueError, match="thin"):
            SamplerConfig(step_size=0.1, num_steps=10, thin=0)
        with pytest.raises(ValueError, match="num_chains"):
            SamplerConfig(step_size=0.1, num_steps=10, num_chains=0)

    def test_to_dict_round_trips_through_json_types(self):
        cfg = SamplerConfig(step_size=0.05, num_steps=100, seed=7,
                            initial_point=np.array([1.0, 2.0]), num_chains=3)
        d = cfg.to_dict()
        assert d["initial_point"] == [1.0, 2.0]
        assert d["num_chains"] == 3


class TestDeterminism:
    def test_same_seed_same_trajectories(self, tp):
        cfg = SamplerConfig(step_size=0.05, num_steps=200, seed=42, num_chains=2)
        a = run_tula(tp, cfg)
        b = run_tula(tp, cfg)
        for ya, yb in zip(a.ys, b.ys):
            np.testing.assert_array_equal(ya, yb)

    def test_chain_streams_do_not_depend_on_sibling_count(self, tp):
        """Chain k draws from a spawn-keyed stream, so adding chains to a
        run must not change the chains already there."""
        solo = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=150, seed=9, num_chains=1))
        trio = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=150, seed=9, num_chains=3))
        np.testing.assert_array_equal(solo.ys[0], trio.ys[0])

    def test_thread_count_does_not_change_results(self, tp, monkeypatch):
        cfg = SamplerConfig(step_size=0.05, num_steps=100, seed=3, num_chains=4)
        monkeypatch.setenv("TULA_THREADS", "1")
        serial = run_tula(tp, cfg)
        monkeypatch.setenv("TULA_THREADS", "4")
        threaded = run_tula(tp, cfg)
        for ya, yb in zip(serial.ys, threaded.ys):
            np.testing.assert_array_equal(ya, yb)

    def test_different_seeds_differ(self, tp):
        a = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=50, seed=0))
        b = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=50, seed=1))
        assert not np.array_equal(a.ys[0], b.ys[0])

    def test_invalid_thread_env(self, tp, monkeypatch):
        monkeypatch.setenv("TULA_THREADS", "zero")
        with pytest.raises(ValueError, match="TULA_THREADS"):
            run_tula(tp, SamplerConfig(step_size=0.05, num_steps=10, num_chains=2))
        monkeypatch.setenv("TULA_THREADS", "0")
        with pytest.raises(ValueError, match="TULA_THREADS"):
            run_tula(tp, SamplerConfig(step_size=0.05, num_steps=10, num_chains=2))


class TestRecording:
    def test_thinning_keeps_every_kth(self, tp):
        cfg = SamplerConfig(step_size=0.05, num_steps=100, seed=0, thin=10)
        run = run_tula(tp, cfg)
        np.testing.assert_array_equal(run.steps[0], np.arange(0, 101, 10))
        assert run.ys[0].shape == (11, 2)

    def test_iterate_zero_always_recorded(self, tp):
        cfg = SamplerConfig(step_size=0.05, num_steps=7, seed=0, thin=3,
                            initial_point=np.array([0.5, 0.5]))
        run = run_tula(tp, cfg)
        np.testing.assert_array_equal(run.ys[0][0], [0.5, 0.5])
        np.testing.assert_array_equal(run.steps[0], [0, 3, 6])

    def test_xs_maps_through_transform(self, tp):
        run = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=20, seed=5))
        np.testing.assert_allclose(run.xs[0], h_forward(tp.transform, run.ys[0]), rtol=1e-12)

    def test_pooled_drops_burn_in(self, tp):
        run = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=30, seed=5, num_chains=2))
        pooled = run.pooled(space="y", burn_in=10)
        assert pooled.shape == (2 * (31 - 10), 2)
        with pytest.raises(ValueError, match="burn_in"):
            run.pooled(burn_in=100)

    def test_initial_point_shapes(self, tp):
        shared = SamplerConfig(step_size=0.05, num_steps=5, num_chains=2,
                               initial_point=np.array([1.0, 0.0]))
        run = run_tula(tp, shared)
        np.testing.assert_array_equal(run.ys[0][0], run.ys[1][0])

        per_chain = SamplerConfig(step_size=0.05, num_steps=5, num_chains=2,
                                  initial_point=np.array([[1.0, 0.0], [0.0, 1.0]]))
        run2 = run_tula(tp, per_chain)
        np.testing.assert_array_equal(run2.ys[1][0], [0.0, 1.0])

        with pytest.raises(ValueError, match="dimension"):
            run_tula(tp, SamplerConfig(step_size=0.05, num_steps=5,
                                       initial_point=np.array([1.0, 0.0, 0.0])))
        with pytest.raises(ValueError, match="per-chain"):
            run_tula(tp, SamplerConfig(step_size=0.05, num_steps=5, num_chains=3,
                                       initial_point=np.array([[1.0, 0.0]] * 2)))

    def test_random_starts_without_explicit_scale(self, tp):
        """No initial point and no scale: the curvature-probe default."""
        run = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=10, seed=2))
        assert np.all(np.isfinite(run.ys[0]))


class TestDivergence:
    def test_oversized_step_flags_and_truncates(self, tp):
        cfg = SamplerConfig(step_size=5.0, num_steps=200, seed=1, num_chains=2,
                            initial_point=np.array([1.0, 0.0]))
        run = run_tula(tp, cfg)
        assert run.any_diverged
        for y, flag in zip(run.ys, run.diverged):
            assert flag
            assert np.all(np.isfinite(y))  # finite prefix kept
            assert y.shape[0] < 201

    def test_summary_reports_divergence(self, tp):
        cfg = SamplerConfig(step_size=5.0, num_steps=200, seed=1,
                            initial_point=np.array([1.0, 0.0]))
        summary = run_summary(run_tula(tp, cfg))
        assert summary["any_diverged"] is True
        assert summary["chains"][0]["diverged"] is True

    def test_healthy_run_summary(self, tp):
        summary = run_summary(run_tula(tp, SamplerConfig(step_size=0.05, num_steps=50, seed=0)))
        assert summary["any_diverged"] is False
        assert summary["chains"][0]["recorded"] == 51
        assert summary["chains"][0]["last_step"] == 50
        for key in ("x_radius_mean", "y_radius_mean", "x_radius_second_moment"):
            assert summary[key] > 0.0


class TestRunUla:
    def test_untransformed_run_keeps_spaces_equal(self):
        entry = make_example(ExampleKind.WARMUP, 2)
        run = run_ula(entry.potential, SamplerConfig(step_size=0.01, num_steps=50, seed=0))
        assert run.transform is None
        np.testing.assert_array_equal(run.xs[0], run.ys[0])

    def test_step_schedule_override(self, tp):
        """A constant schedule reproduces the fixed-step run exactly."""
        cfg = SamplerConfig(step_size=0.05, num_steps=40, seed=8)
        fixed = run_tula(tp, cfg)
        scheduled = run_tula(tp, cfg, step_schedule=lambda k: 0.05)
        np.testing.assert_array_equal(fixed.ys[0], scheduled.ys[0])


class TestPlanner:
    def test_frozen_example(self):
        """L=8, C=4/7, d=4, eps=0.1, H0=4 resolves to gamma = 7/81920 and
        14653 iterations (the raw bound is 14652.07)."""
        gamma, steps = plan_step_size(8.0, 4.0 / 7.0, 4, 0.1, 4.0)
        assert gamma == min(1.0, 0.1 / 16.0) / (2.0 * 64.0 * (4.0 / 7.0))
        assert gamma == pytest.approx(7.0 / 81920.0, rel=1e-12)
        assert steps == 14653

    def test_accuracy_branch(self):
        """The eps/(4d) factor saturates at 1 once eps >= 4d."""
        cap, _ = plan_step_size(2.0, 1.0, 4, 16.0, 4.0)
        above, _ = plan_step_size(2.0, 1.0, 4, 32.0, 4.0)
        below, _ = plan_step_size(2.0, 1.0, 4, 8.0, 4.0)
        assert cap == above == 1.0 / 8.0
        assert below == pytest.approx(cap / 2.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            plan_step_size(0.0, 1.0, 2, 0.1, 1.0)
        with pytest.raises(ValueError):
            plan_step_size(1.0, -1.0, 2, 0.1, 1.0)
        with pytest.raises(ValueError, match="dimension"):
            plan_step_size(1.0, 1.0, 0, 0.1, 1.0)
        with pytest.raises(ValueError):
            plan_step_size(1.0, 1.0, 2, 0.0, 1.0)


class TestCsvExport:
    def test_rows_round_trip_bit_exact(self, tp, tmp_path):
        run = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=10, seed=4, num_chains=2))
        path = tmp_path / "chain.csv"
        write_chain_csv(run, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["chain", "step", "space", "coord0", "coord1"]
        body = rows[1:]
        assert len(body) == 2 * 2 * 11  # chains x spaces x records
        y_rows = [r for r in body if r[2] == "y" and r[0] == "0"]
        parsed = np.array([[float(v) for v in r[3:]] for r in y_rows])
        np.testing.assert_array_equal(parsed, run.ys[0])  # repr round trip

    def test_x_rows_match_transform(self, tp, tmp_path):
        run = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=5, seed=4))
        path = tmp_path / "chain.csv"
        write_chain_csv(run, path)
        with open(path, newline="") as fh:
            rows = [r for r in csv.DictReader(fh) if r["space"] == "x" and r["step"] == "0"]
        x0 = np.array([float(rows[0]["coord0"]), float(rows[0]["coord1"])])
        np.testing.assert_array_equal(x0, run.xs[0][0])


class TestChainRunContainer:
    def test_spaces_and_flags_are_tuples(self, tp):
        run = run_tula(tp, SamplerConfig(step_size=0.05, num_steps=5, num_chains=2))
        assert isinstance(run, ChainRun)
        assert isinstance(run.ys, tuple) and isinstance(run.diverged, tuple)
        assert len(run.ys) == len(run.steps) == len(run.diverged) == 2
