"""
gradcheck - compare tape gradients against central finite differences.

A check samples parameter entries at random, perturbs each by +/- eps in
place and evaluates the loss twice without a tape. When the secant over
[-eps, +eps] straddles a kink (a ReLU or max switching), the estimate is
retried once with eps/100 before an entry is declared failed.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from tensor.errors import ContractError
from tensor.tape import ParamScope, ParamStore, Tape, Tensor, backward

LossFn = Callable[[ParamScope], Tensor]


@dataclass(frozen=True)
class GradSample:
    name: str
    index: Tuple[int, ...]
    analytic: float
    numeric: float
    rel_error: float
    refined: bool = False


@dataclass
class GradCheckReport:
    case: str
    tolerance: float
    samples: List[GradSample] = field(default_factory=list)

    @property
    def max_rel_error(self) -> float:
        return max((s.rel_error for s in self.samples), default=0.0)

    @property
    def passed(self) -> bool:
        return bool(self.samples) and self.max_rel_error < self.tolerance


def relative_error(analytic: float, numeric: float, floor: float = 1e-6) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def _evaluate(loss_fn: LossFn, store: ParamStore) -> float:
    loss = loss_fn(ParamScope(store))
    if loss.size != 1:
        raise ContractError(f"Loss must be scalar, got shape {loss.shape}.")
    return float(loss.data)


def numerical_gradient(loss_fn: LossFn, store: ParamStore, name: str,
                       index: Tuple[int, ...], eps: float = 1e-4) -> float:
    value = store.values[name]
    original = value[index]
    try:
        value[index] = original + eps
        plus = _evaluate(loss_fn, store)
        value[index] = original - eps
        minus = _evaluate(loss_fn, store)
    finally:
        value[index] = original
    return (plus - minus) / (2.0 * eps)


def analytic_gradients(loss_fn: LossFn, store: ParamStore) -> Tuple[float, dict]:
    """Run one taped forward/backward; returns (loss, {name: grad copy})."""
    tape = Tape()
    loss = loss_fn(ParamScope(store, tape))
    store.zero_grad()
    backward(tape, loss, store)
    return float(loss.data), {name: g.copy() for name, g in store.grads.items()}


def check_gradients(loss_fn: LossFn, store: ParamStore, names: Optional[Sequence[str]] = None,
                    samples: int = 10, eps: float = 1e-4, tolerance: float = 1e-4,
                    seed: int = 0, case: str = "") -> GradCheckReport:
    """
    Check `samples` randomly chosen parameter entries of `store`.

    Args:
        loss_fn: builds the scalar loss from a ParamScope (taped or not).
        names: parameters eligible for sampling; defaults to every trainable
            parameter that exists after the first forward pass.
    """
    _, grads = analytic_gradients(loss_fn, store)
    pool = list(names) if names is not None else store.trainable()
    pool = [n for n in pool if store.values[n].size > 0]
    if not pool:
        raise ContractError(f"No parameters to check for case '{case}'.")

    rng = np.random.default_rng(seed)
    report = GradCheckReport(case=case, tolerance=tolerance)
    for _ in range(samples):
        name = pool[rng.integers(len(pool))]
        shape = store.values[name].shape
        index = tuple(int(rng.integers(s)) for s in shape)
        analytic = float(grads[name][index])
        numeric = numerical_gradient(loss_fn, store, name, index, eps)
        error = relative_error(analytic, numeric)
        refined = False
        if error >= tolerance:
            numeric = numerical_gradient(loss_fn, store, name, index, eps / 100.0)
            error = relative_error(analytic, numeric)
            refined = True
        report.samples.append(GradSample(name, index, analytic, numeric, error, refined))
    return report
