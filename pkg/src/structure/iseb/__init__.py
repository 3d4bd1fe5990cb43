from .core import attend, iseb_forward

__all__ = ["attend", "iseb_forward"]
