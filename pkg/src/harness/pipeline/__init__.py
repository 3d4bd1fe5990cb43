from .core import EncodedInputs, Intermediates, build_store, encode, forward_pipeline, predict

__all__ = ["EncodedInputs", "Intermediates", "build_store", "encode", "forward_pipeline", "predict"]
