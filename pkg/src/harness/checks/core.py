"""
checks - named finite-difference gradient cases.

Every case builds its inputs from the seed, wires one module (or loss)
behind a fixed random linear readout and hands the scalar to
tensor.gradcheck. Shapes follow a 64x64 input image: the scale-3 grid is
8x8, the pyramid carries 32/64/96 channels.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from harness.config import RunConfig
from harness.pipeline import forward_pipeline
from harness.scenes import SceneSpec, generate_scene
from objective.losses import composite_loss, cosine_loss, weighted_bce, weighted_iou
from semantic.bca import bca_forward
from semantic.bin import RefinedPyramid, bin_flow, bin_gate
from semantic.encoders import ENCODER_PREFIX, PYRAMID_CHANNELS, TEXT_DIM, FeaturePyramid, stub_text_encoder
from semantic.mfa import mfa_forward
from spectral.bands import BandSpec, mbfm_forward
from spectral.fsf import fsf_forward
from structure.decoder import decoder_forward
from structure.iseb import iseb_forward
from tensor.errors import CheckFailure, ConfigError
from tensor.gradcheck import GradCheckReport, LossFn, check_gradients
from tensor.ops import mul, sigmoid
from tensor.ops import sum as total_sum
from tensor.tape import ParamScope, ParamStore, Tensor, named_generator

GRID = 8
PROMPT = "Camouflaged owl naturally blending into the surrounding environment."


@dataclass(frozen=True)
class CheckCase:
    name: str
    build: Callable[[int], LossFn]
    tolerance: float = 1e-4


class _Inputs:
    """Seeded input factory; every array is keyed by its own name."""

    def __init__(self, case: str, seed: int):
        self.case = case
        self.seed = seed

    def normal(self, name: str, shape) -> np.ndarray:
        return named_generator(self.seed, f"check.{self.case}.{name}").standard_normal(shape)

    def positive(self, name: str, shape) -> np.ndarray:
        return np.abs(self.normal(name, shape))

    def readout(self, out: Tensor, name: str = "readout") -> Tensor:
        return total_sum(mul(out, self.normal(name, out.shape)))

    def pyramid(self) -> FeaturePyramid:
        c3, c4, c5 = PYRAMID_CHANNELS
        return FeaturePyramid(
            Tensor(self.positive("v3", (c3, GRID, GRID))),
            Tensor(self.positive("v4", (c4, GRID // 2, GRID // 2))),
            Tensor(self.positive("v5", (c5, GRID // 4, GRID // 4))),
        )

    def refined(self) -> RefinedPyramid:
        v = self.pyramid()
        return RefinedPyramid(v.v3, v.v4, v.v5)


def _mask(size: int = 64) -> np.ndarray:
    return generate_scene(SceneSpec(seed=7, size=size)).mask


def _bin_gate(seed: int) -> LossFn:
    data = _Inputs("bin_gate", seed)
    pyr, t = data.pyramid(), stub_text_encoder(PROMPT)

    def loss(scope: ParamScope) -> Tensor:
        gated = bin_gate(pyr, t, scope)
        return sum((data.readout(v, f"readout{i}") for i, v in enumerate(gated.levels())), Tensor(0.0))
    return loss


def _bin_flow(seed: int) -> LossFn:
    data = _Inputs("bin_flow", seed)
    pyr = data.pyramid()

    def loss(scope: ParamScope) -> Tensor:
        refined = bin_flow(pyr, scope)
        return sum((data.readout(v, f"readout{i}") for i, v in enumerate(refined.levels())), Tensor(0.0))
    return loss


def _bca(seed: int) -> LossFn:
    data = _Inputs("bca_forward", seed)
    x, t = data.normal("x", (PYRAMID_CHANNELS[0], GRID, GRID)), stub_text_encoder(PROMPT)
    return lambda scope: data.readout(bca_forward(x, t, scope))


def _mfa(seed: int) -> LossFn:
    data = _Inputs("mfa_forward", seed)
    pyr = data.pyramid()
    return lambda scope: data.readout(mfa_forward(pyr.v3, pyr.v4, pyr.v5, scope))


def _mbfm(seed: int) -> LossFn:
    data = _Inputs("mbfm_forward", seed)
    x = data.normal("x", (32, GRID, GRID))
    return lambda scope: data.readout(mbfm_forward(x, BandSpec(), scope))


def _fsf(seed: int) -> LossFn:
    data = _Inputs("fsf_forward", seed)
    f_spa = data.normal("spa", (32, GRID, GRID))
    f_freq = data.normal("freq", (32, GRID, GRID))
    return lambda scope: data.readout(fsf_forward(f_spa, f_freq, scope))


def _iseb(seed: int) -> LossFn:
    data = _Inputs("iseb_forward", seed)
    main = data.normal("main", (32, GRID, GRID))
    aux = data.normal("aux", (32, GRID // 2, GRID // 2))
    return lambda scope: data.readout(iseb_forward(main, aux, scope))


def _decoder(seed: int) -> LossFn:
    data = _Inputs("decoder_forward", seed)
    f_fs = data.normal("f_fs", (32, GRID, GRID))
    pyr = data.refined()
    return lambda scope: data.readout(decoder_forward(f_fs, pyr, scope))


def _prediction(scope: ParamScope, data: _Inputs, shape) -> Tensor:
    logits = scope.get("logits", shape, init=0.0)
    return sigmoid(logits + data.normal("logits", shape))


def _loss_case(name: str, fn) -> Callable[[int], LossFn]:
    def build(seed: int) -> LossFn:
        data = _Inputs(name, seed)
        gt = _mask()
        return lambda scope: fn(_prediction(scope, data, gt.shape), gt)
    return build


def _cosine(seed: int) -> LossFn:
    t = stub_text_encoder(PROMPT)
    data = _Inputs("cosine_loss", seed)

    def loss(scope: ParamScope) -> Tensor:
        visual = scope.get("visual", (TEXT_DIM,), init=0.0) + data.normal("visual", (TEXT_DIM,))
        return cosine_loss(t, visual)
    return loss


def _composite(seed: int) -> LossFn:
    t = stub_text_encoder(PROMPT)
    data = _Inputs("composite_loss", seed)
    gt = _mask()

    def loss(scope: ParamScope) -> Tensor:
        visual = scope.get("visual", (TEXT_DIM,), init=0.0) + data.normal("visual", (TEXT_DIM,))
        return composite_loss(_prediction(scope, data, gt.shape), gt, t, visual).node
    return loss


def _pipeline(seed: int) -> LossFn:
    scene = generate_scene(SceneSpec(seed=seed))
    config = RunConfig(seed=seed)

    def loss(scope: ParamScope) -> Tensor:
        prediction, inter = forward_pipeline(scene.image, scene.prompt, config, scope)
        return composite_loss(prediction, scene.mask, stub_text_encoder(scene.prompt),
                              inter["align.visual"], config.lam).node
    return loss


CASES: Dict[str, CheckCase] = {case.name: case for case in (
    CheckCase("bin_gate", _bin_gate),
    CheckCase("bin_flow", _bin_flow),
    CheckCase("bca_forward", _bca),
    CheckCase("mfa_forward", _mfa),
    CheckCase("mbfm_forward", _mbfm),
    CheckCase("fsf_forward", _fsf),
    CheckCase("iseb_forward", _iseb),
    CheckCase("decoder_forward", _decoder),
    CheckCase("weighted_bce", _loss_case("weighted_bce", weighted_bce), 1e-3),
    CheckCase("weighted_iou", _loss_case("weighted_iou", weighted_iou), 1e-3),
    CheckCase("cosine_loss", _cosine),
    CheckCase("composite_loss", _composite, 1e-3),
    CheckCase("pipeline", _pipeline, 1e-3),
)}


def resolve(names: Optional[Sequence[str]] = None) -> List[CheckCase]:
    if not names or "all" in names:
        return list(CASES.values())
    unknown = [n for n in names if n not in CASES]
    if unknown:
        raise ConfigError(f"Unknown gradcheck case(s): {', '.join(unknown)}; "
                          f"expected one of {', '.join(CASES)}.")
    return [CASES[n] for n in names]


def run_check(name: str, samples: int = 10, seed: int = 0) -> GradCheckReport:
    case = resolve([name])[0]
    store = ParamStore(seed)
    store.freeze(ENCODER_PREFIX)
    return check_gradients(case.build(seed), store, samples=samples,
                           tolerance=case.tolerance, seed=seed, case=name)


def run_checks(names: Optional[Sequence[str]] = None, samples: int = 10, seed: int = 0,
               strict: bool = False) -> List[GradCheckReport]:
    """Run the selected cases; with `strict` a failing case raises CheckFailure."""
    reports = [run_check(case.name, samples, seed) for case in resolve(names)]
    failed = [r.case for r in reports if not r.passed]
    if strict and failed:
        raise CheckFailure(f"Gradient check failed for: {', '.join(failed)}")
    return reports
