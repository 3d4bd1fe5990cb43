"""
Tests for decoder - Structure pillar's progressive prediction decoder.
"""

import pytest
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from semantic.bin import RefinedPyramid
from structure.decoder import DECODER_WIDTH, decoder_forward
from tensor import ops
from tensor.gradcheck import check_gradients
from tensor.tape import ParamScope, ParamStore, Tensor


def _inputs(size=64, seed=0):
    rng = np.random.default_rng(seed)
    s = size // 8
    pyramid = RefinedPyramid(Tensor(rng.standard_normal((32, s, s))),
                             Tensor(rng.standard_normal((64, s // 2, s // 2))),
                             Tensor(rng.standard_normal((96, s // 4, s // 4))))
    return rng.standard_normal((32, s, s)), pyramid


def _project(p, name, x, bias=True):
    y = np.einsum("oc,chw->ohw", p[f"{name}.weight"], x)
    return y + p[f"{name}.bias"][:, None, None] if bias else y


def _resize(x, size):
    if x.shape[1:] == tuple(size):
        return x
    a_h = ops.interpolation_matrix(size[0], x.shape[1])
    a_w = ops.interpolation_matrix(size[1], x.shape[2])
    return np.einsum("ih,chw,jw->cij", a_h, x, a_w)


def _conv3(p, name, x):
    padded = np.pad(x, ((0, 0), (1, 1), (1, 1)), mode="edge")
    windows = sliding_window_view(padded, (3, 3), axis=(1, 2))
    return (np.einsum("ocij,chwij->ohw", p[f"{name}.weight"], windows)
            + p[f"{name}.bias"][:, None, None])


def _iseb(p, name, main, aux):
    c, h, w = main.shape
    aux = _resize(aux, (h, w))
    q = _project(p, f"{name}.query", main, bias=False).reshape(c, -1).T
    k = _project(p, f"{name}.key", aux, bias=False).reshape(c, -1).T
    v = _project(p, f"{name}.value", aux, bias=False).reshape(c, -1).T
    scores = q @ k.T / np.sqrt(c)
    scores = np.exp(scores - scores.max(axis=1, keepdims=True))
    attention = scores / scores.sum(axis=1, keepdims=True)
    return main + (attention @ v).T.reshape(c, h, w)


def _decoder_by_hand(f_fs, pyramid, p):
    state = _project(p, "entry", pyramid.n5.data)
    skips = {pyramid.n4.shape[1:]: ("skip_n4", pyramid.n4.data),
             pyramid.p3.shape[1:]: ("skip_p3", pyramid.p3.data)}
    for k in (1, 2, 3):
        h, w = state.shape[1:]
        state = _resize(state, (2 * h, 2 * w))
        if state.shape[1:] in skips:
            name, level = skips[state.shape[1:]]
            state = state + _project(p, f"stage{k}.{name}", level)
        state = _iseb(p, f"stage{k}.iseb", state, f_fs)
        state = np.maximum(_conv3(p, f"stage{k}.conv", state), 0.0)
    logits = _project(p, "head", state)
    h, w = state.shape[1:]
    return _resize(1.0 / (1.0 + np.exp(-logits)), (4 * h, 4 * w))[0]


class TestDecoder:
    """Test decoder_forward."""

    @pytest.mark.parametrize("size", [64, 128])
    def test_output_matches_image_size(self, size):
        """Test that the prediction matches the image size."""
        f_fs, pyramid = _inputs(size)
        prediction = decoder_forward(f_fs, pyramid, ParamScope(ParamStore(0)))
        assert prediction.shape == (size, size)

    def test_values_strictly_inside_unit_interval(self):
        """Test that the sigmoid output never touches 0 or 1."""
        f_fs, pyramid = _inputs()
        prediction = decoder_forward(f_fs, pyramid, ParamScope(ParamStore(1))).data
        assert ((prediction > 0) & (prediction < 1)).all()

    def test_zero_head_gives_half(self):
        """Test that a zero head predicts 0.5 everywhere."""
        f_fs, pyramid = _inputs()
        store = ParamStore(0)
        store.set("head.weight", np.zeros((1, DECODER_WIDTH)))
        store.set("head.bias", np.zeros(1))
        prediction = decoder_forward(f_fs, pyramid, ParamScope(store)).data
        assert np.allclose(prediction, 0.5, atol=1e-15)

    def test_matches_manual_composition(self):
        """Test against a hand-wired decoder."""
        f_fs, pyramid = _inputs(seed=2)
        store = ParamStore(5)
        prediction = decoder_forward(f_fs, pyramid, ParamScope(store)).data
        expected = _decoder_by_hand(f_fs, pyramid, store.values)
        assert np.abs(prediction - expected).max() < 1e-9

    def test_out_size_override(self):
        """Test an explicit output size."""
        f_fs, pyramid = _inputs()
        prediction = decoder_forward(f_fs, pyramid, ParamScope(ParamStore(0)), out_size=(40, 24))
        assert prediction.shape == (40, 24)

    def test_trace_records_stages(self):
        """Test the traced stage maps and their shapes."""
        f_fs, pyramid = _inputs()
        trace = {}
        decoder_forward(f_fs, pyramid, ParamScope(ParamStore(0)), trace=trace)
        assert sorted(trace) == ["decoder.logits", "decoder.stage1", "decoder.stage2",
                                 "decoder.stage3"]
        assert trace["decoder.stage3"].shape == (DECODER_WIDTH, 16, 16)

    def test_without_iseb_uses_no_attention(self):
        """Test that disabling ISEB creates no attention weights."""
        f_fs, pyramid = _inputs()
        store = ParamStore(0)
        decoder_forward(f_fs, pyramid, ParamScope(store), use_iseb=False)
        assert not any(".iseb." in name for name in store.names())

    def test_gradients(self):
        """Test decoder gradients against finite differences."""
        f_fs, pyramid = _inputs(seed=3)
        target = np.random.default_rng(4).random((64, 64))

        def loss(scope):
            prediction = decoder_forward(f_fs, pyramid, scope)
            return ops.sum(ops.mul(prediction, target))
        report = check_gradients(loss, ParamStore(6), samples=12)
        assert report.passed, report.samples
