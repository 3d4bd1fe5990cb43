from .core import DECODER_WIDTH, OUTPUT_SCALE, STAGES, decoder_forward

__all__ = ["DECODER_WIDTH", "OUTPUT_SCALE", "STAGES", "decoder_forward"]
