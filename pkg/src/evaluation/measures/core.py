"""
measures - the four camouflaged/salient object detection metrics.

All functions take a prediction in [0, 1] and a ground-truth mask (binarized
at 0.5) of the same (H, W) shape and return a float in [0, 1].

    mae                  mean |pred - gt|
    s_measure            0.5 * object-aware + 0.5 * region-aware structure
    e_measure            enhanced alignment, mean over 256 thresholds
    weighted_f_measure   F-beta (beta^2 = 1) with dependency-aware error weights
"""

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from scipy.ndimage import convolve, distance_transform_edt

from tensor.errors import ShapeError

EPS = np.spacing(1.0)
S_ALPHA = 0.5
E_THRESHOLDS = (np.arange(256) + 0.5) / 256.0
WF_KERNEL = 7
WF_SIGMA = 5.0


def _prepare(pred, gt) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.ndim == 3 and pred.shape[0] == 1:
        pred = pred[0]
    if gt.ndim == 3 and gt.shape[0] == 1:
        gt = gt[0]
    if pred.shape != gt.shape:
        raise ShapeError(f"Prediction {pred.shape} and mask {gt.shape} differ in shape.")
    if pred.ndim != 2 or pred.size == 0:
        raise ShapeError(f"Metrics need a non-empty (H, W) map, got shape {pred.shape}.")
    return pred, gt > 0.5


def _unit(value: float) -> float:
    return float(min(max(value, 0.0), 1.0))


def mae(pred, gt) -> float:
    pred, gt = _prepare(pred, gt)
    return _unit(np.abs(pred - gt).mean())


# --- S-measure ---

def _object_score(values: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    x = values.mean()
    sigma = values.std(ddof=1) if values.size > 1 else 0.0
    return 2.0 * x / (x * x + 1.0 + sigma + EPS)


def _object_term(pred: np.ndarray, gt: np.ndarray) -> float:
    u = gt.mean()
    fg = _object_score(pred[gt])
    bg = _object_score(1.0 - pred[~gt])
    return u * fg + (1.0 - u) * bg


def _centroid(gt: np.ndarray) -> Tuple[float, float]:
    """Foreground centroid in pixel-edge coordinates (pixel j spans [j, j + 1))."""
    h, w = gt.shape
    if not gt.any():
        return w / 2.0, h / 2.0
    y, x = np.argwhere(gt).mean(axis=0) + 0.5
    return float(x), float(y)


def _ssim(pred: np.ndarray, gt: np.ndarray, weight: np.ndarray) -> float:
    """SSIM with per-pixel membership weights in [0, 1]."""
    n = weight.sum()
    if n <= 0:
        return 0.0
    x, y = (weight * pred).sum() / n, (weight * gt).sum() / n
    denom = max(n - 1.0, 1.0)
    sigma_x = (weight * (pred - x) ** 2).sum() / denom
    sigma_y = (weight * (gt - y) ** 2).sum() / denom
    sigma_xy = (weight * (pred - x) * (gt - y)).sum() / denom
    alpha = 4.0 * x * y * sigma_xy
    beta = (x * x + y * y) * (sigma_x + sigma_y)
    if alpha != 0:
        return alpha / (beta + EPS)
    return 1.0 if beta == 0 else 0.0


def _split(extent: int, at: float) -> np.ndarray:
    """Share of each pixel lying before the cut `at`; the cut pixel is split."""
    return np.clip(at - np.arange(extent), 0.0, 1.0)


def _region_term(pred: np.ndarray, gt: np.ndarray) -> float:
    h, w = gt.shape
    x, y = _centroid(gt)
    g = gt.astype(np.float64)
    left, top = _split(w, x), _split(h, y)
    rows, cols = (top, 1.0 - top), (left, 1.0 - left)
    score = 0.0
    for r in rows:
        for c in cols:
            weight = np.outer(r, c)
            score += weight.sum() / (h * w) * _ssim(pred, g, weight)
    return score


def s_measure(pred, gt) -> float:
    pred, gt = _prepare(pred, gt)
    y = gt.mean()
    if y == 0:
        return _unit(1.0 - pred.mean())
    if y == 1:
        return _unit(pred.mean())
    score = S_ALPHA * _object_term(pred, gt) + (1.0 - S_ALPHA) * _region_term(pred, gt)
    return _unit(score)


# --- E-measure ---

def enhanced_alignment(binary: np.ndarray, gt: np.ndarray) -> np.ndarray:
    """Per-pixel (phi + 1)^2 / 4 for boolean maps of identical shape."""
    b = binary.astype(np.float64)
    g = gt.astype(np.float64)
    db = b - b.mean(axis=(-2, -1), keepdims=True)
    dg = g - g.mean()
    phi = 2.0 * db * dg / (db * db + dg * dg + EPS)
    return (phi + 1.0) ** 2 / 4.0


def e_measure(pred, gt) -> float:
    pred, gt = _prepare(pred, gt)
    binary = pred[None] >= E_THRESHOLDS[:, None, None]
    fg = gt.mean()
    if fg == 0:
        scores = 1.0 - binary.mean(axis=(1, 2))
    elif fg == 1:
        scores = binary.mean(axis=(1, 2))
    else:
        scores = enhanced_alignment(binary, gt).mean(axis=(1, 2))
    return _unit(scores.mean())


# --- Weighted F-measure ---

def gaussian_kernel(size: int = WF_KERNEL, sigma: float = WF_SIGMA) -> np.ndarray:
    """Normalized size x size Gaussian, tiny tails zeroed."""
    m = (size - 1) / 2.0
    yy, xx = np.ogrid[-m:m + 1, -m:m + 1]
    h = np.exp(-(xx * xx + yy * yy) / (2.0 * sigma * sigma))
    h[h < np.finfo(h.dtype).eps * h.max()] = 0.0
    return h / h.sum()


def weighted_f_measure(pred, gt) -> float:
    pred, gt = _prepare(pred, gt)
    if not gt.any():
        return 0.0
    g = gt.astype(np.float64)
    dist, (iy, ix) = distance_transform_edt(~gt, return_indices=True)

    error = np.abs(pred - g)
    spread = error.copy()
    bg = ~gt
    spread[bg] = error[iy[bg], ix[bg]]
    smoothed = convolve(spread, gaussian_kernel(), mode="constant", cval=0.0)
    dependent = np.where(gt & (smoothed < error), smoothed, error)

    importance = np.where(bg, 2.0 - np.exp(np.log(0.5) / 5.0 * dist), 1.0)
    weighted = dependent * importance

    tp = g.sum() - weighted[gt].sum()
    fp = weighted[bg].sum()
    recall = 1.0 - weighted[gt].mean()
    precision = tp / (tp + fp + EPS)
    return _unit(2.0 * recall * precision / (recall + precision + EPS))


# --- Reports ---

@dataclass(frozen=True)
class MetricsReport:
    s_measure: float
    f_beta_w: float
    mae: float
    e_measure: float
    n_images: int = 1

    COLUMNS = ("S_m", "F_beta_w", "MAE", "E_m")

    def values(self) -> Tuple[float, float, float, float]:
        return self.s_measure, self.f_beta_w, self.mae, self.e_measure

    @classmethod
    def mean(cls, reports: Iterable["MetricsReport"]) -> "MetricsReport":
        """Arithmetic mean with compensated summation; order-independent."""
        reports = list(reports)
        if not reports:
            return cls(0.0, 0.0, 0.0, 0.0, 0)
        n = len(reports)
        columns = list(zip(*(r.values() for r in reports)))
        return cls(*(math.fsum(col) / n for col in columns), n_images=n)


def evaluate_image(pred, gt) -> MetricsReport:
    return MetricsReport(
        s_measure=s_measure(pred, gt),
        f_beta_w=weighted_f_measure(pred, gt),
        mae=mae(pred, gt),
        e_measure=e_measure(pred, gt),
    )
