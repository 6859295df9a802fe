"""Similarity / dissimilarity metrics and the scorer used to drive G-CLAHE.

Raw metric functions return the textbook value. :class:`SimilarityScorer`
re-orients them so that a larger score always means "more similar":
MSE, RMSE and MAE are negated and the structural-content ratio is turned
into ``-|1 - SC|``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .imagecore import as_gray_image

PSNR_CAP_DB = 100.0
SSIM_WINDOW = 8
SSIM_C1 = (0.01 * 255) ** 2
SSIM_C2 = (0.03 * 255) ** 2

METRICS = ("ssim", "psnr", "mse", "sci", "rmse", "mae")
DISSIMILARITY_METRICS = frozenset({"mse", "rmse", "mae"})


class MetricError(ValueError):
    """Raised when a metric is undefined for the given images."""


def _pair(a, b):
    a = as_gray_image(a)
    b = as_gray_image(b)
    if a.shape != b.shape:
        raise MetricError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def mse(a, b) -> float:
    a, b = _pair(a, b)
    diff = a.astype(np.int64) - b.astype(np.int64)
    return float(np.sum(diff * diff)) / diff.size


def rmse(a, b) -> float:
    return math.sqrt(mse(a, b))


def mae(a, b) -> float:
    a, b = _pair(a, b)
    diff = np.abs(a.astype(np.int64) - b.astype(np.int64))
    return float(np.sum(diff)) / diff.size


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB; identical images give ``PSNR_CAP_DB``."""
    err = mse(a, b)
    if err == 0:
        return PSNR_CAP_DB
    return 10.0 * math.log10(255.0**2 / err)


def sci(reference, test) -> float:
    """Structural content ``sum(reference**2) / sum(test**2)``.

    Not symmetric: swapping the images inverts the ratio.
    """
    reference, test = _pair(reference, test)
    denom = int(np.sum(test.astype(np.int64) ** 2))
    if denom == 0:
        raise MetricError("structural content is undefined for an all-zero test image")
    return int(np.sum(reference.astype(np.int64) ** 2)) / denom


def _window_sums(x: np.ndarray, win_h: int, win_w: int) -> np.ndarray:
    # Exact integer box sums over every valid window position.
    s = np.zeros((x.shape[0] + 1, x.shape[1] + 1), dtype=np.int64)
    s[1:, 1:] = np.cumsum(np.cumsum(x, axis=0), axis=1)
    return s[win_h:, win_w:] - s[:-win_h, win_w:] - s[win_h:, :-win_w] + s[:-win_h, :-win_w]


def ssim(a, b) -> float:
    """Mean SSIM over all 8x8 windows (uniform weights, stride 1).

    Images smaller than the window along either axis are treated as one
    global window. Window statistics use population (biased) moments.
    """
    a, b = _pair(a, b)
    h, w = a.shape
    if h < SSIM_WINDOW or w < SSIM_WINDOW:
        win_h, win_w = h, w
    else:
        win_h = win_w = SSIM_WINDOW
    n = win_h * win_w
    a = a.astype(np.int64)
    b = b.astype(np.int64)
    sa = _window_sums(a, win_h, win_w)
    sb = _window_sums(b, win_h, win_w)
    saa = _window_sums(a * a, win_h, win_w)
    sbb = _window_sums(b * b, win_h, win_w)
    sab = _window_sums(a * b, win_h, win_w)
    # n*n*var is an exact integer; convert once to float.
    nn = float(n * n)
    mu_a = sa / float(n)
    mu_b = sb / float(n)
    var_a = (n * saa - sa * sa) / nn
    var_b = (n * sbb - sb * sb) / nn
    cov = (n * sab - sa * sb) / nn
    num = (2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return float(np.mean(num / den))


_RAW = {"ssim": ssim, "psnr": psnr, "mse": mse, "sci": sci, "rmse": rmse, "mae": mae}


def metric_function(metric: str):
    """Raw metric callable for a lowercase metric id."""
    try:
        return _RAW[metric]
    except KeyError:
        raise MetricError(f"unknown metric {metric!r}; valid ids: {', '.join(METRICS)}") from None


@dataclass(frozen=True)
class MetricScore:
    """An oriented score; larger is more similar.

    Ordering is only defined between scores of the same metric.
    """

    value: float
    metric: str

    def _check(self, other):
        if not isinstance(other, MetricScore):
            return NotImplemented
        if other.metric != self.metric:
            raise TypeError(f"cannot compare {self.metric} score with {other.metric} score")
        return other.value

    def __lt__(self, other):
        v = self._check(other)
        return v if v is NotImplemented else self.value < v

    def __le__(self, other):
        v = self._check(other)
        return v if v is NotImplemented else self.value <= v

    def __gt__(self, other):
        v = self._check(other)
        return v if v is NotImplemented else self.value > v

    def __ge__(self, other):
        v = self._check(other)
        return v if v is NotImplemented else self.value >= v

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class SimilarityScorer:
    """Wraps one metric id and orients it so that higher means more similar."""

    metric: str = "ssim"

    def __post_init__(self):
        metric_function(self.metric)

    @property
    def higher_is_better(self) -> bool:
        """Orientation of the raw metric value."""
        return self.metric not in DISSIMILARITY_METRICS and self.metric != "sci"

    def __call__(self, reference, candidate) -> MetricScore:
        return score(self, reference, candidate)


def score(scorer: SimilarityScorer, reference, candidate) -> MetricScore:
    raw = metric_function(scorer.metric)(reference, candidate)
    if scorer.metric in DISSIMILARITY_METRICS:
        value = -raw
    elif scorer.metric == "sci":
        value = -abs(1.0 - raw)
    else:
        value = raw
    return MetricScore(float(value), scorer.metric)
