"""
Tests for trainer - Harness pillar's desk-scale AdamW training loop.
"""

import csv

import pytest
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

import numpy as np

from evaluation.measures import mae
from harness.config import RunConfig
from harness.pipeline import build_store, forward_pipeline, predict
from harness.scenes import SceneSpec, generate_scene
from harness.trainer import AdamW, mean_report, moving_average, train_toy, write_loss_csv
from harness.trainer import core as trainer_core
from objective.losses import LossReport
from tensor.errors import ContractError, DivergenceError
from tensor.tape import ParamStore

SPEC = SceneSpec(seed=0)


class TestAdamW:
    """Test the optimizer update rule."""

    def test_first_step(self):
        """Test the bias-corrected first step with decoupled decay."""
        store = ParamStore(0)
        store.set("w", [1.0, -2.0])
        store.grads["w"][:] = [0.5, -4.0]
        AdamW(lr=0.1, weight_decay=0.01).step(store)
        # the bias-corrected first step moves each entry by lr * sign(grad)
        expected = np.array([1.0, -2.0]) * (1 - 0.1 * 0.01) - 0.1 * np.array([1.0, -1.0])
        assert np.allclose(store.values["w"], expected, atol=1e-7)

    def test_frozen_parameters_untouched(self):
        """Test that frozen prefixes are skipped."""
        store = ParamStore(0)
        store.set("encoder.w", [1.0])
        store.set("head.w", [1.0])
        store.freeze("encoder")
        store.grads["encoder.w"][:] = 3.0
        store.grads["head.w"][:] = 3.0
        AdamW(lr=0.1).step(store)
        assert store.values["encoder.w"][0] == 1.0
        assert store.values["head.w"][0] < 1.0

    def test_zero_learning_rate_is_identity(self):
        """Test that lr = 0 leaves values untouched."""
        store = ParamStore(0)
        store.set("w", [0.3, -0.7])
        store.grads["w"][:] = [1.0, 2.0]
        AdamW(lr=0.0).step(store)
        assert store.values["w"].tolist() == [0.3, -0.7]


class TestTrainToy:
    """Test the training loop."""

    def test_needs_a_scene(self):
        """Test that an empty scene list is a ContractError."""
        with pytest.raises(ContractError):
            train_toy(RunConfig(), [], steps=1)

    def test_zero_learning_rate_keeps_parameters(self):
        """Test that lr = 0 leaves every parameter bit-identical."""
        config = RunConfig(learning_rate=0.0)
        store = build_store(config)
        scene = generate_scene(SPEC)
        forward_pipeline(scene.image, scene.prompt, config, store)
        before = store.copy()
        train_toy(config, [SPEC], steps=2, store=store)
        assert store.names() == before.names()
        for name in store.names():
            assert store.values[name].tobytes() == before.values[name].tobytes()

    def test_log_and_callback(self):
        """Test the per-step log and the step callback."""
        seen = []
        config = RunConfig(learning_rate=1e-3, batch_size=2)
        specs = [SceneSpec(seed=0), SceneSpec(seed=1, class_name="owl")]
        result = train_toy(config, specs, steps=3, on_step=lambda step, report: seen.append(step))
        assert seen == [0, 1, 2]
        assert len(result.totals()) == 3
        assert all(np.isfinite(result.totals()))
        assert result.log[0].lam == config.lam

    def test_training_changes_prediction(self):
        """Test that two steps at the default rate move the prediction."""
        config = RunConfig()
        scene = generate_scene(SPEC)
        before = predict(scene.image, scene.prompt, config, build_store(config))
        result = train_toy(config, [SPEC], steps=2)
        after = predict(scene.image, scene.prompt, config, result.store)
        assert not np.array_equal(before, after)

    def test_first_steps_reduce_the_loss(self):
        """Test that ten default steps on one scene lower the loss."""
        result = train_toy(RunConfig(), [SPEC], steps=10)
        totals = result.totals()
        assert totals[-1] < totals[0]

    def test_non_finite_loss_diverges(self, monkeypatch):
        """Test that a NaN loss raises DivergenceError with exit code 3."""
        nan = LossReport(float("nan"), 0.0, 0.0, 0.1, float("nan"))
        monkeypatch.setattr(trainer_core, "mean_report", lambda reports: nan)
        with pytest.raises(DivergenceError) as info:
            train_toy(RunConfig(), [SPEC], steps=5)
        assert info.value.exit_code == 3

    def test_runaway_loss_diverges(self, monkeypatch):
        """Test that 20 steps above 10x the first loss raise DivergenceError."""
        totals = iter([1.0] + [50.0] * 40)

        def fake(reports):
            total = next(totals)
            return LossReport(total, 0.0, 0.0, 0.1, total)
        monkeypatch.setattr(trainer_core, "mean_report", fake)
        with pytest.raises(DivergenceError, match="20 steps"):
            train_toy(RunConfig(), [SPEC], steps=40)

    @pytest.mark.slow
    def test_single_scene_overfit(self):
        """Test that 300 default steps fit one 64x64 scene with a settling loss."""
        config = RunConfig()
        result = train_toy(config, [SPEC], steps=300)
        scene = generate_scene(SPEC)
        assert mae(predict(scene.image, scene.prompt, config, result.store), scene.mask) < 0.05
        assert np.all(np.diff(moving_average(result.totals(), 20)) <= 0)


class TestLogs:
    """Test loss summaries and the CSV log."""

    def test_mean_report(self):
        """Test the per-component mean over reports."""
        reports = [LossReport(0.2, 0.4, 1.0, 0.1, 0.7), LossReport(0.4, 0.6, 0.0, 0.1, 1.0)]
        mean = mean_report(reports)
        assert (mean.l_wbce, mean.l_wiou, mean.l_cos) == pytest.approx((0.3, 0.5, 0.5))
        assert mean.total == pytest.approx(0.85)

    def test_moving_average(self):
        """Test the valid-mode moving average and the short-log fallback."""
        assert moving_average([1.0, 2.0, 3.0, 4.0], window=2).tolist() == [1.5, 2.5, 3.5]
        assert moving_average([1.0, 2.0], window=5).tolist() == [1.0, 2.0]

    def test_write_loss_csv(self, tmp_path):
        """Test the CSV header and row format."""
        path = tmp_path / "loss.csv"
        write_loss_csv([LossReport(0.5, 0.25, 1.0, 0.1, 0.85)], path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["step", "l_wbce", "l_wiou", "l_cos", "total"]
        assert rows[1] == ["0", "0.5", "0.25", "1", "0.85"]
