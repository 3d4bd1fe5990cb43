"""
ablation - component and prompt studies on synthetic scenes.

Each row trains a fresh model per seed with identical budgets, scores it
on held-out scenes and reports the per-metric median over seeds.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np
from rich.table import Table

from evaluation.measures import MetricsReport, evaluate_image
from harness.config import TOGGLES, RunConfig
from harness.pipeline import predict
from harness.scenes import SceneSpec, generate_scene
from harness.trainer import train_toy
from semantic.encoders import PROMPT_TEMPLATES
from tensor.errors import ConfigError
from tensor.tape import ParamStore

logger = logging.getLogger(__name__)


def _toggles(*enabled: str) -> Dict[str, bool]:
    return {name: name in enabled for name in TOGGLES}


# BCA is part of the BIN row: both come from the cross-modal guidance stage.
PRESETS: Dict[str, Dict[str, bool]] = {
    "base": _toggles(),
    "+bin": _toggles("bin", "bca"),
    "+bin+mfa": _toggles("bin", "bca", "mfa"),
    "+bin+mfa+iseb": _toggles("bin", "bca", "mfa", "iseb"),
    "+bin+mfa+mbfm": _toggles("bin", "bca", "mfa", "mbfm"),
    "+bin+mfa+mbfm+fsf": _toggles("bin", "bca", "mfa", "mbfm", "fsf"),
    "+bin+mfa+mbfm+iseb": _toggles("bin", "bca", "mfa", "mbfm", "iseb"),
    "full": _toggles(*TOGGLES),
}


@dataclass(frozen=True)
class AblationRow:
    name: str
    report: MetricsReport
    seeds: int


def preset(name: str) -> Dict[str, bool]:
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ConfigError(f"Unknown ablation preset '{name}'; expected one of {', '.join(PRESETS)}.") from None


def evaluate_scenes(specs: Sequence[SceneSpec], config: RunConfig, store: ParamStore) -> MetricsReport:
    reports = []
    for spec in specs:
        scene = generate_scene(spec)
        reports.append(evaluate_image(predict(scene.image, scene.prompt, config, store), scene.mask))
    return MetricsReport.mean(reports)


def median_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    columns = np.array([r.values() for r in reports])
    return MetricsReport(*(float(v) for v in np.median(columns, axis=0)),
                         n_images=reports[0].n_images)


def _study(config: RunConfig, train: Sequence[SceneSpec], test: Sequence[SceneSpec],
           seeds: Sequence[int], steps: Optional[int]) -> MetricsReport:
    reports = []
    for seed in seeds:
        run = replace(config, seed=seed)
        result = train_toy(run, train, steps=steps)
        reports.append(evaluate_scenes(test, run, result.store))
    return median_report(reports)


def run_ablation(config: RunConfig, train: Sequence[SceneSpec], test: Sequence[SceneSpec],
                 names: Sequence[str] = tuple(PRESETS), seeds: Sequence[int] = (0, 1, 2),
                 steps: Optional[int] = None) -> List[AblationRow]:
    rows = []
    for name in names:
        logger.info("Ablation row %s", name)
        row_config = config.with_toggles(**preset(name))
        rows.append(AblationRow(name, _study(row_config, train, test, seeds, steps), len(seeds)))
    return rows


def run_prompt_ablation(config: RunConfig, train: Sequence[SceneSpec], test: Sequence[SceneSpec],
                        templates: Sequence[str] = tuple(PROMPT_TEMPLATES),
                        seeds: Sequence[int] = (0, 1, 2),
                        steps: Optional[int] = None) -> List[AblationRow]:
    """Full model under each prompt template, same budget per template."""
    rows = []
    for template in templates:
        logger.info("Prompt row %s", template)
        row_train = [replace(s, template=template) for s in train]
        row_test = [replace(s, template=template) for s in test]
        row_config = replace(config, prompt=template)
        rows.append(AblationRow(template, _study(row_config, row_train, row_test, seeds, steps), len(seeds)))
    return rows


def ablation_table(rows: Sequence[AblationRow], title: str = "Ablation") -> Table:
    table = Table(title=title)
    table.add_column("setting")
    for column in MetricsReport.COLUMNS:
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(row.name, *(f"{v:.4f}" for v in row.report.values()))
    return table
