from .core import conv, linear_project, scalar

__all__ = ["conv", "linear_project", "scalar"]
