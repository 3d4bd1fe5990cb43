from .core import DatasetEvaluation, evaluate_dataset, format_csv, format_text, pair_files

__all__ = ["DatasetEvaluation", "evaluate_dataset", "format_csv", "format_text", "pair_files"]
