"""
pipeline - end-to-end assembly of the network from the module toggles.

    encoders -> bin_gate -> bin_flow -> bca (scale 3) -> mfa
             -> F_spa = F_mfa, F_freq = mbfm(F_mfa) -> fsf -> decoder

A disabled module is replaced by pass-through wiring: BIN hands the raw
pyramid on, BCA leaves the scale-3 map unchanged, MFA falls back to the
summing fuse, MBFM yields F_freq = F_mfa, FSF forwards F_freq and the
decoder sums instead of attending when ISEB is off.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from harness.config import RunConfig
from objective.losses import visual_operand
from semantic.bca import bca_attend
from semantic.bin import RefinedPyramid, bin_flow, bin_gate
from semantic.encoders import (ENCODER_PREFIX, FeaturePyramid, TextEmbedding, stub_text_encoder,
                               stub_vision_encoder)
from semantic.mfa import baseline_fuse, mfa_forward
from spectral.bands import mbfm_forward
from spectral.fft import next_power_of_two
from spectral.fsf import fsf_forward
from structure.decoder import decoder_forward
from tensor.errors import ShapeError
from tensor.ops import crop, pad_zeros
from tensor.tape import ParamScope, ParamStore, Tensor

Intermediates = Dict[str, Tensor]


@dataclass(frozen=True, eq=False)
class EncodedInputs:
    """Outputs of the frozen encoders; constant across training steps."""
    pyramid: FeaturePyramid
    text: TextEmbedding


def build_store(config: RunConfig) -> ParamStore:
    store = ParamStore(config.seed)
    store.freeze(ENCODER_PREFIX)
    return store


def _scope(params: Union[ParamScope, ParamStore]) -> ParamScope:
    return params if isinstance(params, ParamScope) else ParamScope(params)


def encode(image: np.ndarray, prompt: str, params: Union[ParamScope, ParamStore]) -> EncodedInputs:
    root = ParamScope(_scope(params).store)
    return EncodedInputs(stub_vision_encoder(image, root), stub_text_encoder(prompt))


def _frequency_branch(f_mfa: Tensor, config: RunConfig, params: ParamScope) -> Tensor:
    _, h, w = f_mfa.shape
    ph, pw = next_power_of_two(h), next_power_of_two(w)
    padded = pad_zeros(f_mfa, ph, pw)
    return crop(mbfm_forward(padded, config.band_spec, params), h, w)


def forward_pipeline(image: np.ndarray, prompt: str, config: RunConfig,
                     params: Union[ParamScope, ParamStore],
                     encoded: Optional[EncodedInputs] = None) -> Tuple[Tensor, Intermediates]:
    """
    Returns the (H, W) prediction and the named intermediate maps.

    `encoded` skips the frozen encoders when their outputs are already known.
    """
    scope = _scope(params)
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        image = np.broadcast_to(image, (3,) + image.shape)
    if encoded is None:
        encoded = encode(image, prompt, scope)
    pyramid, text = encoded.pyramid, encoded.text
    out: Intermediates = {}

    if config.bin:
        gated = bin_gate(pyramid, text, scope.child("bin"))
        for level, gate, v in zip((3, 4, 5), gated.gates.levels(), gated.levels()):
            out[f"bin.gate{level}"] = gate
            out[f"bin.gated{level}"] = v
        refined = bin_flow(gated, scope.child("bin"))
    else:
        refined = RefinedPyramid(pyramid.v3, pyramid.v4, pyramid.v5)
    out["bin.p3"], out["bin.n4"], out["bin.n5"] = refined.levels()

    f3 = refined.p3
    if config.bca:
        attention = bca_attend(f3, text, scope.child("bca"))
        f3 = attention.output
        out["bca.text_to_visual"] = attention.text_to_visual
        out["bca.visual_to_text"] = attention.visual_to_text
        out["bca.output"] = f3

    if config.mfa:
        f_mfa = mfa_forward(f3, refined.n4, refined.n5, scope.child("mfa"))
    else:
        f_mfa = baseline_fuse(f3, refined.n4, refined.n5, scope.child("fuse"))
    out["mfa.output"] = f_mfa

    f_freq = _frequency_branch(f_mfa, config, scope.child("mbfm")) if config.mbfm else f_mfa
    out["mbfm.output"] = f_freq
    f_fs = fsf_forward(f_mfa, f_freq, scope.child("fsf")) if config.fsf else f_freq
    out["fsf.output"] = f_fs

    out["align.visual"] = visual_operand(f_mfa, scope.child("align"))
    prediction = decoder_forward(f_fs, refined, scope.child("decoder"), use_iseb=config.iseb,
                                 out_size=image.shape[1:], trace=out)
    if prediction.shape != image.shape[1:]:
        raise ShapeError(f"Prediction {prediction.shape} does not match image {image.shape[1:]}.")
    out["prediction"] = prediction
    return prediction, out


def predict(image: np.ndarray, prompt: str, config: RunConfig,
            params: Union[ParamScope, ParamStore]) -> np.ndarray:
    """Tape-free forward pass returning the prediction as an array."""
    prediction, _ = forward_pipeline(image, prompt, config, _scope(params).detached())
    return prediction.data
