from .core import REDUCTION, SPATIAL_KERNEL, channel_gate, fsf_forward, spatial_gate

__all__ = ["REDUCTION", "SPATIAL_KERNEL", "channel_gate", "fsf_forward", "spatial_gate"]
