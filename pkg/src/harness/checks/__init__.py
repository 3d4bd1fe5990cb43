from .core import CASES, CheckCase, resolve, run_check, run_checks

__all__ = ["CASES", "CheckCase", "resolve", "run_check", "run_checks"]
