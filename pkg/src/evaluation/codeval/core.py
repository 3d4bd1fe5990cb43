"""
codeval - dataset-level evaluation of prediction maps against masks.

Predictions and masks are 8-bit PGM files paired by filename stem.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from evaluation.measures import MetricsReport, evaluate_image
from harness.formats import read_pgm
from tensor.errors import InputError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
SUFFIXES = (".pgm",)


@dataclass
class DatasetEvaluation:
    report: MetricsReport
    per_image: Dict[str, MetricsReport] = field(default_factory=dict)
    missing: List[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.missing


def _stems(directory: Path) -> Dict[str, Path]:
    if not directory.is_dir():
        raise InputError(f"Not a directory: {directory}")
    return {p.stem: p for p in sorted(directory.iterdir())
            if p.is_file() and p.suffix.lower() in SUFFIXES}


def pair_files(pred_dir: PathLike, gt_dir: PathLike) -> Tuple[List[Tuple[str, Path, Path]], List[str]]:
    """Returns (matched (stem, pred, gt) triples, descriptions of unmatched files)."""
    preds, gts = _stems(Path(pred_dir)), _stems(Path(gt_dir))
    pairs = [(stem, preds[stem], gts[stem]) for stem in sorted(preds.keys() & gts.keys())]
    missing = [f"{preds[s]} (no mask)" for s in sorted(preds.keys() - gts.keys())]
    missing += [f"{gts[s]} (no prediction)" for s in sorted(gts.keys() - preds.keys())]
    return pairs, missing


def evaluate_dataset(pred_dir: PathLike, gt_dir: PathLike) -> DatasetEvaluation:
    pairs, missing = pair_files(pred_dir, gt_dir)
    for entry in missing:
        logger.warning("Skipping %s", entry)
    per_image = {stem: evaluate_image(read_pgm(p), read_pgm(g)) for stem, p, g in pairs}
    return DatasetEvaluation(MetricsReport.mean(per_image.values()), per_image, missing)


def _rows(evaluation: DatasetEvaluation, per_image: bool) -> Sequence[Tuple[str, MetricsReport]]:
    rows = list(evaluation.per_image.items()) if per_image else []
    rows.append(("mean", evaluation.report))
    return rows


def format_text(evaluation: DatasetEvaluation, per_image: bool = False) -> str:
    """Fixed-width table in the column order S_m, F_beta_w, MAE, E_m."""
    rows = _rows(evaluation, per_image)
    width = max(len("image"), *(len(name) for name, _ in rows))
    lines = [f"{'image':<{width}}  " + "  ".join(f"{c:>8}" for c in MetricsReport.COLUMNS)]
    for name, report in rows:
        lines.append(f"{name:<{width}}  " + "  ".join(f"{v:>8.4f}" for v in report.values()))
    lines.append(f"n_images={evaluation.report.n_images}")
    return "\n".join(lines)


def format_csv(evaluation: DatasetEvaluation, per_image: bool = False) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("image",) + MetricsReport.COLUMNS)
    for name, report in _rows(evaluation, per_image):
        writer.writerow((name,) + tuple(f"{v:.6f}" for v in report.values()))
    return out.getvalue().rstrip("\n")
