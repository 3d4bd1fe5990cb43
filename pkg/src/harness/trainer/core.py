"""
trainer - desk-scale training with AdamW.

One optimizer step averages the composite loss over a batch of scenes
(cycled in order), accumulates tape gradients into the ParamStore and
applies AdamW with decoupled weight decay to every trainable parameter.
Frozen encoder weights are never touched.
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from harness.config import RunConfig
from harness.pipeline import EncodedInputs, build_store, encode, forward_pipeline
from harness.scenes import Scene, SceneSpec, generate_scene
from objective.losses import LossReport, composite_loss
from tensor.errors import ContractError, DivergenceError
from tensor.tape import ParamScope, ParamStore, Tape, backward

logger = logging.getLogger(__name__)

BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8
DIVERGENCE_FACTOR = 10.0
DIVERGENCE_PATIENCE = 20


class AdamW:
    """Adam moments with weight decay applied directly to the parameters."""

    def __init__(self, lr: float, weight_decay: float = 0.01, betas=BETAS, eps: float = ADAM_EPS):
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.step_count = 0
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}

    def step(self, store: ParamStore) -> None:
        self.step_count += 1
        t = self.step_count
        for name in store.trainable():
            value, grad = store.values[name], store.grads[name]
            m = self.m.setdefault(name, np.zeros_like(value))
            v = self.v.setdefault(name, np.zeros_like(value))
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            m_hat = m / (1.0 - self.beta1 ** t)
            v_hat = v / (1.0 - self.beta2 ** t)
            value *= 1.0 - self.lr * self.weight_decay
            value -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class TrainResult:
    store: ParamStore
    log: List[LossReport] = field(default_factory=list)

    def totals(self) -> List[float]:
        return [r.total for r in self.log]


def mean_report(reports: Sequence[LossReport]) -> LossReport:
    n = len(reports)
    wbce = sum(r.l_wbce for r in reports) / n
    wiou = sum(r.l_wiou for r in reports) / n
    cos = sum(r.l_cos for r in reports) / n
    lam = reports[0].lam
    return LossReport(wbce, wiou, cos, lam, (wbce + wiou) + lam * cos)


def train_toy(config: RunConfig, specs: Sequence[SceneSpec], steps: Optional[int] = None,
              store: Optional[ParamStore] = None,
              on_step: Optional[Callable[[int, LossReport], None]] = None) -> TrainResult:
    """
    Train for `steps` optimizer steps (default: config.epochs).

    Raises DivergenceError when the batch loss stays above 10x the first
    step's loss for 20 consecutive steps.
    """
    if not specs:
        raise ContractError("train_toy needs at least one scene.")
    steps = config.epochs if steps is None else steps
    store = build_store(config) if store is None else store
    scenes: List[Scene] = [generate_scene(s) for s in specs]
    encoded: List[EncodedInputs] = [encode(s.image, s.prompt, store) for s in scenes]
    batch = min(config.batch_size, len(scenes))
    optimizer = AdamW(config.learning_rate, config.weight_decay)
    result = TrainResult(store)

    logger.info("Training %d steps on %d scenes (batch %d, lr %g)",
                steps, len(scenes), batch, config.learning_rate)
    initial = None
    above = 0
    for step in range(steps):
        store.zero_grad()
        reports = []
        for j in range(batch):
            index = (step * batch + j) % len(scenes)
            scene = scenes[index]
            tape = Tape()
            prediction, inter = forward_pipeline(scene.image, scene.prompt, config,
                                                 ParamScope(store, tape), encoded[index])
            report = composite_loss(prediction, scene.mask, encoded[index].text,
                                    inter["align.visual"], config.lam)
            backward(tape, report.node * (1.0 / batch), store)
            reports.append(report)
        optimizer.step(store)

        summary = mean_report(reports)
        result.log.append(summary)
        if on_step is not None:
            on_step(step, summary)
        logger.debug("step %d total %.6f wbce %.6f wiou %.6f cos %.6f",
                     step, summary.total, summary.l_wbce, summary.l_wiou, summary.l_cos)

        if not np.isfinite(summary.total):
            raise DivergenceError(f"Loss became non-finite at step {step}.")
        if initial is None:
            initial = summary.total
        above = above + 1 if summary.total > DIVERGENCE_FACTOR * initial else 0
        if above >= DIVERGENCE_PATIENCE:
            raise DivergenceError(
                f"Loss {summary.total:.4g} stayed above {DIVERGENCE_FACTOR:g}x the initial "
                f"{initial:.4g} for {DIVERGENCE_PATIENCE} steps (step {step}); lower the learning rate."
            )

    if result.log:
        logger.info("Finished: loss %.6f -> %.6f", result.log[0].total, result.log[-1].total)
    return result


def moving_average(values: Sequence[float], window: int = 20) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.size < window:
        return values.copy()
    return np.convolve(values, np.ones(window) / window, mode="valid")


def write_loss_csv(log: Sequence[LossReport], path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(("step", "l_wbce", "l_wiou", "l_cos", "total"))
        for step, report in enumerate(log):
            writer.writerow((step, f"{report.l_wbce:.8g}", f"{report.l_wiou:.8g}",
                             f"{report.l_cos:.8g}", f"{report.total:.8g}"))
