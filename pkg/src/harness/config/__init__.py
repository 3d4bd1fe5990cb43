from .core import TOGGLES, RunConfig, load_config, parse_key_values

__all__ = ["TOGGLES", "RunConfig", "load_config", "parse_key_values"]
