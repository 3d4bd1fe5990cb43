from .core import (
    PRESETS,
    AblationRow,
    ablation_table,
    evaluate_scenes,
    median_report,
    preset,
    run_ablation,
    run_prompt_ablation,
)

__all__ = [
    "PRESETS", "AblationRow", "ablation_table", "evaluate_scenes", "median_report",
    "preset", "run_ablation", "run_prompt_ablation",
]
