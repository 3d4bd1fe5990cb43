"""
Tests for encoders - Semantic pillar's frozen backbone stand-ins.
"""

import pytest
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

import numpy as np

from semantic.encoders import (DEFAULT_TEMPLATE, PROMPT_TEMPLATES, TEXT_DIM, TextEmbedding,
                               hash_tokens, render_prompt, stub_text_encoder,
                               stub_vision_encoder)
from tensor.errors import InputError, ShapeError
from tensor.tape import ParamScope, ParamStore, Tape

CAT = "Camouflaged cat naturally blending into the surrounding environment."
OWL = "Camouflaged owl naturally blending into the surrounding environment."


def _random_prompts(count, seed=0):
    rng = np.random.default_rng(seed)
    letters = np.array(list("abcdefghijklmnopqrstuvwxyz"))
    prompts = []
    for _ in range(count):
        words = ["".join(rng.choice(letters, size=rng.integers(5, 9)))
                 for _ in range(rng.integers(4, 7))]
        prompts.append(" ".join(words))
    return prompts


def _zero_bias_store(seed=0):
    store = ParamStore(seed)
    for name, width in (("stage3", 32), ("stage4", 64), ("stage5", 96)):
        store.set(f"encoder.{name}.bias", np.zeros(width))
    return store


class TestTextEncoder:
    """Test the hashed trigram text encoder."""

    def test_deterministic(self):
        """Test that a prompt always hashes to the same embedding."""
        assert np.array_equal(stub_text_encoder(CAT).values, stub_text_encoder(CAT).values)

    def test_class_token_separates(self):
        """Test that changing the class word changes the embedding."""
        cat, owl = stub_text_encoder(CAT).values, stub_text_encoder(OWL).values
        assert float(cat @ owl) < 1.0

    def test_unit_norm(self):
        """Test unit length over 100 random prompts."""
        for prompt in _random_prompts(100):
            embedding = stub_text_encoder(prompt)
            assert embedding.dim == TEXT_DIM
            assert abs(np.linalg.norm(embedding.values) - 1.0) <= 1e-9

    def test_case_and_punctuation_insensitive(self):
        """Test that case and punctuation do not change the embedding."""
        a = stub_text_encoder("Camouflaged Cat!").values
        b = stub_text_encoder("camouflaged cat").values
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("prompt", ["擬態した猫", "Caméléon camouflé", "Тигр в траве"])
    def test_non_ascii_prompts(self, prompt):
        """Test that prompts in other scripts hash to their own unit vector."""
        embedding = stub_text_encoder(prompt).values
        assert abs(np.linalg.norm(embedding) - 1.0) <= 1e-9
        assert not np.array_equal(embedding, stub_text_encoder("cat").values)

    def test_accents_are_distinct_tokens(self):
        """Test that an accented word is not folded onto its ASCII spelling."""
        a = stub_text_encoder("caméléon").values
        b = stub_text_encoder("cameleon").values
        assert not np.array_equal(a, b)

    @pytest.mark.parametrize("prompt", ["", "   ", "!!! ..."])
    def test_unusable_prompts(self, prompt):
        """Test that prompts without word characters raise InputError."""
        with pytest.raises(InputError):
            stub_text_encoder(prompt)

    def test_hash_counts_trigrams(self):
        """Test that a one-letter token contributes exactly one trigram."""
        # "<a>" is the only trigram of the token "a"
        assert np.abs(hash_tokens("a")).sum() == 1.0

    def test_embedding_rejects_non_unit(self):
        """Test that TextEmbedding refuses a non-unit vector."""
        with pytest.raises(InputError):
            TextEmbedding(np.ones(TEXT_DIM))


class TestPrompts:
    """Test prompt templates."""

    def test_named_template(self):
        """Test rendering by template name."""
        assert render_prompt("blend-class", "cat") == CAT
        assert render_prompt("photo-object", "cat") == "A photo of camouflaged object."

    def test_literal_template(self):
        """Test rendering a literal template string."""
        assert render_prompt("Hidden <class> here.", "frog") == "Hidden frog here."

    def test_default_is_blend_class(self):
        """Test the six templates and the default."""
        assert PROMPT_TEMPLATES["blend-class"] == DEFAULT_TEMPLATE
        assert len(PROMPT_TEMPLATES) == 6


class TestVisionEncoder:
    """Test the strided conv pyramid."""

    def test_shapes_for_64(self):
        """Test pyramid shapes for a 64x64 image."""
        image = np.random.default_rng(0).random((3, 64, 64))
        pyramid = stub_vision_encoder(image, ParamScope(ParamStore(0)))
        assert pyramid.shapes() == ((32, 8, 8), (64, 4, 4), (96, 2, 2))

    def test_zero_image_zero_bias(self):
        """Test that a black image with zero biases gives an all-zero pyramid."""
        pyramid = stub_vision_encoder(np.zeros((3, 64, 64)), ParamScope(_zero_bias_store()))
        assert not any(level.data.any() for level in pyramid.levels())

    @pytest.mark.parametrize("shape", [(3, 48, 64), (3, 64, 40), (64, 64)])
    def test_bad_shapes(self, shape):
        """Test that malformed image shapes raise ShapeError."""
        with pytest.raises(ShapeError):
            stub_vision_encoder(np.zeros(shape), ParamScope(ParamStore(0)))

    def test_translation_by_32_shifts_v5_by_one_cell(self):
        """Test that the stride-32 level moves one cell per 32-pixel shift."""
        image = np.zeros((3, 128, 128))
        image[:, 16:24, 16:24] = 1.0
        shifted = np.roll(image, (32, 32), axis=(1, 2))
        scope = ParamScope(_zero_bias_store(3))
        v5 = stub_vision_encoder(image, scope).v5.data
        v5_shifted = stub_vision_encoder(shifted, scope).v5.data
        assert v5.any()
        assert np.allclose(np.roll(v5, (1, 1), axis=(1, 2)), v5_shifted, atol=1e-12)

    def test_encoder_stays_off_the_tape(self):
        """Test that the frozen encoder records nothing on a tape."""
        tape = Tape()
        store = ParamStore(0)
        pyramid = stub_vision_encoder(np.ones((3, 32, 32)), ParamScope(store, tape))
        assert pyramid.v5.tape is None
        assert len(tape) == 0
        assert all(name.startswith("encoder.") for name in store.names())

    def test_deterministic_per_seed(self):
        """Test that the pyramid depends only on the image and seed."""
        image = np.random.default_rng(1).random((3, 32, 32))
        a = stub_vision_encoder(image, ParamScope(ParamStore(4))).v3.data
        b = stub_vision_encoder(image, ParamScope(ParamStore(4))).v3.data
        assert np.array_equal(a, b)
