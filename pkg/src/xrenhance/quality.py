"""Image quality measures used to compare enhancement methods.

Includes a self-contained Canny edge detector. The smoothing kernel is the
classic 5x5 integer approximation of a sigma=1.4 Gaussian (weights sum to
159); keeping the kernel integral makes every gradient an exact integer, so
thresholding and non-maximum suppression do not depend on summation order.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imagecore import as_gray_image, compute_histogram

GAUSS_5X5 = np.array(
    [
        [2, 4, 5, 4, 2],
        [4, 9, 12, 9, 4],
        [5, 12, 15, 12, 5],
        [4, 9, 12, 9, 4],
        [2, 4, 5, 4, 2],
    ],
    dtype=np.int64,
)
GAUSS_NORM = int(GAUSS_5X5.sum())  # 159

CANNY_LOW = 50.0
CANNY_HIGH = 150.0

_TAN_22_5 = math.tan(math.radians(22.5))
_TAN_67_5 = math.tan(math.radians(67.5))


def _correlate_edge(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    # Integer correlation with replicated borders.
    kh, kw = kernel.shape
    ph, pw = kh // 2, kw // 2
    padded = np.pad(img, ((ph, ph), (pw, pw)), mode="edge")
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.int64)
    for dy in range(kh):
        for dx in range(kw):
            k = kernel[dy, dx]
            if k:
                out += k * padded[dy : dy + h, dx : dx + w]
    return out


def _sobel(smooth: np.ndarray):
    p = np.pad(smooth, 1, mode="edge")
    tl, tc, tr = p[:-2, :-2], p[:-2, 1:-1], p[:-2, 2:]
    ml, mr = p[1:-1, :-2], p[1:-1, 2:]
    bl, bc, br = p[2:, :-2], p[2:, 1:-1], p[2:, 2:]
    gx = (tr + 2 * mr + br) - (tl + 2 * ml + bl)
    gy = (bl + 2 * bc + br) - (tl + 2 * tc + tr)
    return gx, gy


def gradients(image):
    """Sobel gradients of the Gaussian-smoothed image.

    Returns ``(gx, gy)`` as int64 arrays scaled by 159 (the kernel norm);
    divide the magnitude by 159 to get 0..255-scale gradient units.
    """
    img = as_gray_image(image).astype(np.int64)
    return _sobel(_correlate_edge(img, GAUSS_5X5))


def non_max_suppression(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Squared magnitudes of local maxima along the quantized gradient direction.

    Direction is binned to 0/45/90/135 degrees. A pixel survives when it is
    strictly larger than its neighbor on the left (above, for vertical
    gradients) and no smaller than the opposite neighbor; the asymmetry
    keeps plateaus one pixel thick. The one-pixel frame is always zero.
    """
    m2 = gx * gx + gy * gy
    h, w = m2.shape
    out = np.zeros_like(m2)
    if h < 3 or w < 3:
        return out
    ax, ay = np.abs(gx), np.abs(gy)
    horiz = ay <= _TAN_22_5 * ax
    vert = ~horiz & (ay >= _TAN_67_5 * ax)
    diag = ~horiz & ~vert & (gx * gy > 0)
    anti = ~horiz & ~vert & ~diag

    c = m2[1:-1, 1:-1]
    # (strict neighbor, non-strict neighbor) per direction bin
    pairs = [
        (horiz, m2[1:-1, :-2], m2[1:-1, 2:]),
        (vert, m2[:-2, 1:-1], m2[2:, 1:-1]),
        (diag, m2[:-2, :-2], m2[2:, 2:]),
        (anti, m2[2:, :-2], m2[:-2, 2:]),
    ]
    keep = np.zeros_like(c, dtype=bool)
    for mask, strict, loose in pairs:
        keep |= mask[1:-1, 1:-1] & (c > strict) & (c >= loose)
    out[1:-1, 1:-1] = np.where(keep, c, 0)
    return out


def hysteresis(nms_m2: np.ndarray, low: float, high: float) -> np.ndarray:
    """Keep weak pixels only when 8-connected (through candidates) to a strong one."""
    lo2 = (low * GAUSS_NORM) ** 2
    hi2 = (high * GAUSS_NORM) ** 2
    alive = nms_m2 > 0
    candidates = alive & (nms_m2 >= lo2)
    strong = alive & (nms_m2 >= hi2)
    labels, count = ndimage.label(candidates, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        return np.zeros_like(candidates)
    seeded = np.zeros(count + 1, dtype=bool)
    seeded[labels[strong]] = True
    seeded[0] = False
    return seeded[labels]


def canny(image, low: float = CANNY_LOW, high: float = CANNY_HIGH) -> np.ndarray:
    """Boolean edge map of ``image``.

    Parameters
    ----------
    image : array_like
        8-bit grayscale image. Anything smaller than 3x3 yields an empty map.
    low, high : float
        Hysteresis thresholds in 0..255-scale gradient magnitude units.
    """
    if low < 0 or high < 0:
        raise ValueError(f"thresholds must be non-negative, got low={low}, high={high}")
    if low > high:
        raise ValueError(f"low threshold {low} exceeds high threshold {high}")
    img = as_gray_image(image)
    if img.shape[0] < 3 or img.shape[1] < 3:
        return np.zeros(img.shape, dtype=bool)
    gx, gy = gradients(img)
    return hysteresis(non_max_suppression(gx, gy), low, high)


def edge_count(edges) -> int:
    return int(np.count_nonzero(edges))


def edge_density(edges) -> float:
    edges = np.asarray(edges)
    return edge_count(edges) / edges.size


def entropy(image) -> float:
    """Shannon entropy of the gray-level distribution, in bits."""
    hist = compute_histogram(image)
    p = hist[hist > 0] / hist.sum()
    return float(-np.sum(p * np.log2(p))) + 0.0


def mean_value(image) -> float:
    img = as_gray_image(image)
    return float(img.sum(dtype=np.int64)) / img.size


def average_gradient(image) -> float:
    """Mean of ``sqrt((gx**2 + gy**2) / 2)`` over forward differences."""
    img = as_gray_image(image)
    if img.shape[0] < 2 or img.shape[1] < 2:
        raise ValueError(f"average gradient needs at least a 2x2 image, got shape {img.shape}")
    f = img.astype(np.float64)
    gx = f[:-1, 1:] - f[:-1, :-1]
    gy = f[1:, :-1] - f[:-1, :-1]
    return float(np.mean(np.sqrt((gx * gx + gy * gy) / 2.0)))


@dataclass(frozen=True)
class QualityReport:
    edge_count: int
    edge_density: float
    mean_value: float
    entropy: float
    average_gradient: float


def quality_report(image, canny_low: float = CANNY_LOW, canny_high: float = CANNY_HIGH) -> QualityReport:
    img = as_gray_image(image)
    edges = canny(img, canny_low, canny_high)
    return QualityReport(
        edge_count=edge_count(edges),
        edge_density=edge_density(edges),
        mean_value=mean_value(img),
        entropy=entropy(img),
        average_gradient=average_gradient(img),
    )
