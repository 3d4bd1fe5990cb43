"""
Tests for codeval - Evaluation pillar's dataset evaluator and sfgeval command.
"""

import argparse
import logging

import pytest
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

import numpy as np

from evaluation.codeval import evaluate_dataset, format_csv, format_text, pair_files
from evaluation.codeval import cli as eval_cli
from evaluation.measures import MetricsReport, evaluate_image
from harness.formats import read_pgm, write_pgm
from tensor.errors import InputError


def _mask(n=16, seed=0):
    rng = np.random.default_rng(seed)
    gt = np.zeros((n, n))
    r, c = rng.integers(2, n // 2, size=2)
    gt[r:r + n // 3, c:c + n // 3] = 1.0
    return gt


def _flipped(gt, count, seed=0):
    """Binary prediction that disagrees with gt on exactly `count` pixels."""
    pred = gt.reshape(-1).copy()
    idx = np.random.default_rng(seed).permutation(pred.size)[:count]
    pred[idx] = 1.0 - pred[idx]
    return pred.reshape(gt.shape)


@pytest.fixture
def dataset(tmp_path):
    pred_dir, gt_dir = tmp_path / "pred", tmp_path / "gt"
    pred_dir.mkdir()
    gt_dir.mkdir()
    for i in range(10):
        gt = _mask(seed=i)
        write_pgm(gt_dir / f"scene_{i:02d}.pgm", gt)
        pred = np.clip(gt * 0.8 + np.random.default_rng(100 + i).random(gt.shape) * 0.3, 0, 1)
        write_pgm(pred_dir / f"scene_{i:02d}.pgm", pred)
    return pred_dir, gt_dir


class TestEvaluateDataset:
    """Test evaluate_dataset and file pairing."""

    def test_same_directory_is_perfect(self, dataset):
        """Test that scoring masks against themselves is perfect."""
        _, gt_dir = dataset
        evaluation = evaluate_dataset(gt_dir, gt_dir)
        report = evaluation.report
        assert evaluation.complete
        assert report.n_images == 10
        assert report.mae == 0.0
        for value in (report.s_measure, report.f_beta_w, report.e_measure):
            assert abs(value - 1.0) <= 1e-6

    def test_mean_of_known_maes(self, tmp_path):
        """Test the dataset MAE is the mean of per-image MAEs."""
        pred_dir, gt_dir = tmp_path / "pred", tmp_path / "gt"
        pred_dir.mkdir()
        gt_dir.mkdir()
        gt = np.zeros((10, 10))
        gt[2:7, 3:8] = 1.0
        for name, count in (("a", 10), ("b", 30)):
            write_pgm(gt_dir / f"{name}.pgm", gt)
            write_pgm(pred_dir / f"{name}.pgm", _flipped(gt, count))
        evaluation = evaluate_dataset(pred_dir, gt_dir)
        assert evaluation.per_image["a"].mae == pytest.approx(0.1, abs=1e-12)
        assert evaluation.per_image["b"].mae == pytest.approx(0.3, abs=1e-12)
        assert evaluation.report.mae == pytest.approx(0.2, abs=1e-12)

    def test_matches_per_image_calls(self, dataset):
        """Test the dataset report against per-image evaluate_image calls."""
        pred_dir, gt_dir = dataset
        evaluation = evaluate_dataset(pred_dir, gt_dir)
        reports = [evaluate_image(read_pgm(pred_dir / f"scene_{i:02d}.pgm"),
                                  read_pgm(gt_dir / f"scene_{i:02d}.pgm")) for i in range(10)]
        expected = tuple(sum(r.values()[k] for r in reports) / 10 for k in range(4))
        assert evaluation.report.values() == pytest.approx(expected, abs=1e-12)

    def test_missing_counterparts_are_listed(self, dataset, caplog):
        """Test that unpaired files are skipped and reported."""
        pred_dir, gt_dir = dataset
        (gt_dir / "scene_03.pgm").unlink()
        write_pgm(gt_dir / "extra.pgm", _mask())
        with caplog.at_level(logging.WARNING, logger="evaluation.codeval.core"):
            evaluation = evaluate_dataset(pred_dir, gt_dir)
        assert not evaluation.complete
        assert evaluation.report.n_images == 9
        assert any("scene_03.pgm (no mask)" in m for m in evaluation.missing)
        assert any("extra.pgm (no prediction)" in m for m in evaluation.missing)
        assert "Skipping" in caplog.text

    def test_other_files_are_ignored(self, dataset):
        """Test that non-map files do not count as missing."""
        pred_dir, gt_dir = dataset
        (pred_dir / "notes.txt").write_text("not a map")
        pairs, missing = pair_files(pred_dir, gt_dir)
        assert len(pairs) == 10 and not missing

    def test_not_a_directory(self, tmp_path):
        """Test that a missing directory is an InputError."""
        with pytest.raises(InputError):
            evaluate_dataset(tmp_path / "absent", tmp_path)


class TestFormatting:
    """Test the text and CSV renderings."""

    def test_text_table(self, dataset):
        """Test the text table layout with per-image rows."""
        evaluation = evaluate_dataset(*dataset)
        lines = format_text(evaluation, per_image=True).splitlines()
        assert lines[0].split() == ["image", *MetricsReport.COLUMNS]
        assert lines[1].startswith("scene_00")
        assert lines[-2].startswith("mean")
        assert lines[-1] == "n_images=10"

    def test_csv_mean_only(self, dataset):
        """Test the CSV output without per-image rows."""
        evaluation = evaluate_dataset(*dataset)
        lines = format_csv(evaluation).splitlines()
        assert lines[0] == "image,S_m,F_beta_w,MAE,E_m"
        assert len(lines) == 2
        assert lines[1].startswith("mean,")


class TestCommand:
    """Test the sfgeval run function."""

    def _args(self, pred, gt, **kwargs):
        return argparse.Namespace(pred=str(pred), gt=str(gt), per_image=kwargs.get("per_image", False),
                                  format=kwargs.get("format", "text"))

    def test_perfect_row(self, dataset, capsys):
        """Test the printed mean row for a perfect dataset."""
        _, gt_dir = dataset
        assert eval_cli.run(self._args(gt_dir, gt_dir)) == 0
        mean_row = capsys.readouterr().out.splitlines()[-2].split()
        assert mean_row == ["mean", "1.0000", "1.0000", "0.0000", "1.0000"]

    def test_missing_gives_status_one(self, dataset, capsys):
        """Test that an incomplete pairing exits with status 1."""
        pred_dir, gt_dir = dataset
        (pred_dir / "scene_05.pgm").unlink()
        assert eval_cli.run(self._args(pred_dir, gt_dir, format="csv")) == 1
        assert "Missing counterpart" in capsys.readouterr().err
