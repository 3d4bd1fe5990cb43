from .core import AdamW, TrainResult, mean_report, moving_average, train_toy, write_loss_csv

__all__ = ["AdamW", "TrainResult", "mean_report", "moving_average", "train_toy", "write_loss_csv"]
