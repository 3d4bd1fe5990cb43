"""
Tests for bands - Spectral pillar's radial band split and MBFM.
"""

import pytest
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

import numpy as np

from spectral.bands import (DEFAULT_EDGES, BandSpec, band_decompose, band_energies,
                            make_band_masks, mbfm_forward, normalized_radius, split_bands)
from spectral.fft import fft2d, ifft2_complex
from tensor import ops
from tensor.errors import ConfigError
from tensor.gradcheck import check_gradients
from tensor.tape import ParamScope, ParamStore

SPECS = [BandSpec(()), BandSpec(), BandSpec((0.1, 0.5)), BandSpec.equal_width(5)]


def _grid(shape, seed=0):
    return np.random.default_rng(seed).standard_normal(shape)


def _checkerboard(h, w):
    return (-1.0) ** np.add.outer(np.arange(h), np.arange(w))


class TestBandSpec:
    """Test BandSpec validation and parsing."""

    def test_defaults(self):
        """Test the default three equal-width bands."""
        spec = BandSpec()
        assert spec.edges == DEFAULT_EDGES
        assert spec.band_count == 3
        assert spec.bounds == (0.0, 1 / 3, 2 / 3, 1.0)

    @pytest.mark.parametrize("edges", [(0.0,), (1.0,), (0.5, 0.5), (0.6, 0.3), (-0.2, 0.4)])
    def test_invalid_edges(self, edges):
        """Test that edges outside (0, 1) or out of order raise ConfigError."""
        with pytest.raises(ConfigError):
            BandSpec(edges)

    def test_equal_width(self):
        """Test equal-width band construction."""
        assert BandSpec.equal_width(4).edges == (0.25, 0.5, 0.75)
        assert BandSpec.equal_width(1).band_count == 1
        with pytest.raises(ConfigError):
            BandSpec.equal_width(0)

    def test_parse(self):
        """Test parsing comma-separated edges."""
        assert BandSpec.parse("0.25, 0.5").edges == (0.25, 0.5)
        assert BandSpec.parse("").band_count == 1
        with pytest.raises(ConfigError):
            BandSpec.parse("low,high")
        with pytest.raises(ConfigError):
            BandSpec.parse("0.7,0.2")


class TestMasks:
    """Test make_band_masks on the normalized radius."""

    def test_single_band_is_all_ones(self):
        """Test that no edges give one all-pass mask."""
        (mask,) = make_band_masks(BandSpec(()), 8, 8)
        assert (mask == 1.0).all()

    @pytest.mark.parametrize("spec", SPECS)
    @pytest.mark.parametrize("h,w", [(8, 8), (16, 4), (1, 32)])
    def test_masks_partition_the_plane(self, spec, h, w):
        """Test that every frequency belongs to exactly one band."""
        masks = make_band_masks(spec, h, w)
        assert len(masks) == spec.band_count
        assert np.array_equal(np.sum(masks, axis=0), np.ones((h, w)))

    @pytest.mark.parametrize("h,w", [(8, 8), (8, 16), (32, 4)])
    def test_dc_and_nyquist_placement(self, h, w):
        """Test DC lands in the first band and Nyquist in the last."""
        r = normalized_radius(h, w)
        assert r[0, 0] == 0.0
        assert r[h // 2, w // 2] == pytest.approx(1.0)
        masks = make_band_masks(BandSpec(), h, w)
        assert masks[0][0, 0] == 1.0
        assert masks[-1][h // 2, w // 2] == 1.0

    def test_masks_are_radially_symmetric(self):
        """Test masks are symmetric under frequency negation."""
        for mask in make_band_masks(BandSpec(), 16, 16):
            mirrored = np.roll(np.flip(mask), shift=(1, 1), axis=(0, 1))
            assert np.array_equal(mask, mirrored)

    def test_masked_spectra_stay_real(self):
        """Test that each band of a real grid inverts to a real grid."""
        rep = fft2d(_grid((16, 16)))
        for mask in make_band_masks(BandSpec.equal_width(4), 16, 16):
            assert np.abs(ifft2_complex(rep.masked(mask).complex()).imag).max() < 1e-9


class TestDecomposition:
    """Test band_decompose, split_bands and band_energies."""

    @pytest.mark.parametrize("spec", SPECS)
    def test_bands_reconstruct_input(self, spec):
        """Test that the bands of one grid sum back to it."""
        x = _grid((16, 8), seed=4)
        assert np.abs(np.sum(split_bands(x, spec), axis=0) - x).max() < 1e-8

    @pytest.mark.parametrize("spec", [BandSpec(), BandSpec((0.15, 0.4, 0.8))])
    def test_band_decompose_partitions_random_features(self, spec):
        """Test that band-major copies of random (4, 16, 16) maps sum back to the input."""
        rng = np.random.default_rng(21)
        for _ in range(20):
            x = rng.standard_normal((4, 16, 16))
            out = band_decompose(x, spec).data
            assert out.shape == (4 * spec.band_count, 16, 16)
            total = out.reshape(spec.band_count, 4, 16, 16).sum(axis=0)
            assert np.abs(total - x).max() < 1e-8

    def test_band_decompose_is_band_major(self):
        """Test that channels are grouped by band."""
        x = _grid((2, 8, 8))
        out = band_decompose(x, BandSpec()).data
        assert out.shape == (6, 8, 8)
        assert np.allclose(out[2:4], split_bands(x, BandSpec())[1], atol=1e-12)

    def test_checkerboard_has_no_low_band(self):
        """Test that a Nyquist checkerboard has nothing in the low band."""
        low = split_bands(_checkerboard(8, 8), BandSpec())[0]
        assert np.abs(low).max() < 1e-8

    def test_checkerboard_energy_in_last_band(self):
        """Test that a checkerboard's energy sits in the top band."""
        energies = band_energies(_checkerboard(16, 16), BandSpec())
        assert energies[-1] == pytest.approx(energies.sum())

    def test_constant_energy_in_first_band(self):
        """Test that a constant grid's energy is all DC."""
        energies = band_energies(np.full((8, 8), 2.0), BandSpec())
        assert energies[0] == pytest.approx((2.0 * 64) ** 2)
        assert energies[1:].sum() == pytest.approx(0.0, abs=1e-18)

    def test_band_decompose_gradient(self):
        """Test band_decompose gradients against finite differences."""
        def loss(scope):
            out = band_decompose(scope.get("x", (2, 8, 8)), BandSpec((0.3,)))
            r = np.random.default_rng(1).standard_normal(out.shape)
            return ops.sum(ops.mul(out, r))
        assert check_gradients(loss, ParamStore(0), samples=12).passed


class TestMBFM:
    """Test the Multi-Band Fourier Module."""

    def test_shape_is_preserved(self):
        """Test that the module keeps the input shape."""
        x = _grid((4, 16, 8))
        assert mbfm_forward(x, BandSpec(), ParamScope(ParamStore(0))).shape == x.shape

    def test_single_band_identity_projection_doubles(self):
        """Test one band with an identity projection returns 2x."""
        x = _grid((3, 8, 8))
        store = ParamStore(0)
        store.set("proj.weight", np.eye(3))
        store.set("proj.bias", np.zeros(3))
        out = mbfm_forward(x, BandSpec(()), ParamScope(store)).data
        assert np.abs(out - 2 * x).max() < 1e-9

    def test_zero_projection_is_residual(self):
        """Test that a zero projection leaves only the residual."""
        x = _grid((2, 8, 8))
        store = ParamStore(0)
        store.set("proj.weight", np.zeros((2, 6)))
        store.set("proj.bias", np.zeros(2))
        assert np.array_equal(mbfm_forward(x, BandSpec(), ParamScope(store)).data, x)

    def test_projection_width_follows_band_count(self):
        """Test the projection input width is C times the band count."""
        store = ParamStore(0)
        mbfm_forward(_grid((4, 8, 8)), BandSpec.equal_width(5), ParamScope(store))
        assert store.values["proj.weight"].shape == (4, 20)

    def test_gradients(self):
        """Test module gradients against finite differences."""
        x = _grid((4, 8, 8), seed=2)

        def loss(scope):
            out = mbfm_forward(x, BandSpec(), scope)
            r = np.random.default_rng(3).standard_normal(out.shape)
            return ops.sum(ops.mul(out, r))
        report = check_gradients(loss, ParamStore(5), samples=12)
        assert report.passed, report.samples
