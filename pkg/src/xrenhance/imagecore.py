"""Raster validation and the histogram / CDF primitives shared by every enhancer.

Images are plain 2-D ``numpy.uint8`` arrays indexed ``[row, col]``; histograms
and CDFs are 256-element integer arrays. Nothing here mutates its input.
"""

import numpy as np

LEVELS = 256
MAX_LEVEL = LEVELS - 1

# Slack used when rounding non-negative reals to the nearest integer. Values
# derived from integer ratios land on exact .5 ties that floating point may
# miss by a few ulps; the slack is far below the smallest non-tie gap.
_TIE_SLACK = 1e-9


class ImageError(ValueError):
    """Raised for inputs that are not valid 8-bit grayscale rasters."""


def as_gray_image(image) -> np.ndarray:
    """Validate ``image`` and return it as a 2-D uint8 array.

    Integer and float arrays are accepted as long as every value is an
    integer in [0, 255]; anything else raises :class:`ImageError`.
    """
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ImageError(f"expected a 2-D grayscale image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ImageError(f"image must have at least one pixel, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr
    if arr.dtype == bool or not np.issubdtype(arr.dtype, np.number):
        raise ImageError(f"unsupported pixel dtype {arr.dtype}")
    if np.issubdtype(arr.dtype, np.floating) and not np.all(arr == np.round(arr)):
        raise ImageError("pixel values must be integers")
    lo, hi = arr.min(), arr.max()
    if lo < 0 or hi > MAX_LEVEL:
        raise ImageError(f"pixel values must lie in [0, 255], got [{lo}, {hi}]")
    return arr.astype(np.uint8)


def round_half_up(values):
    """Round non-negative reals to the nearest integer, halves upward.

    For non-negative inputs this is round-half-away-from-zero. Returns an
    int64 array (or a Python int for scalar input).
    """
    out = np.floor(np.asarray(values, dtype=np.float64) + 0.5 + _TIE_SLACK).astype(np.int64)
    return int(out) if out.ndim == 0 else out


def compute_histogram(image) -> np.ndarray:
    """Count the pixels at each gray level.

    Parameters
    ----------
    image : array_like
        8-bit grayscale image.

    Returns
    -------
    np.ndarray
        ``int64`` array of length 256 summing to the pixel count.
    """
    img = as_gray_image(image)
    return np.bincount(img.ravel(), minlength=LEVELS).astype(np.int64)


def compute_cdf(hist) -> np.ndarray:
    """Running prefix sum of a histogram (exact integers)."""
    hist = np.asarray(hist)
    if np.any(hist < 0):
        raise ValueError("histogram counts must be non-negative")
    return np.cumsum(hist, dtype=np.int64)


def normalize_cdf(cdf, n: int) -> np.ndarray:
    """Divide a CDF by the pixel count so that its last entry is exactly 1."""
    if n <= 0:
        raise ValueError(f"pixel count must be positive, got {n}")
    cdf = np.asarray(cdf, dtype=np.int64)
    if cdf[-1] != n:
        raise ValueError(f"CDF ends at {cdf[-1]}, expected the pixel count {n}")
    return cdf / float(n)
