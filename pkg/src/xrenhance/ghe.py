"""Global histogram equalization."""

import numpy as np

from .imagecore import (
    MAX_LEVEL,
    as_gray_image,
    compute_cdf,
    compute_histogram,
    normalize_cdf,
    round_half_up,
)


def build_equalization_lut(ncdf) -> np.ndarray:
    """Map each gray level to ``round(ncdf[level] * 255)``.

    Parameters
    ----------
    ncdf : array_like
        Normalized CDF, 256 non-decreasing values in [0, 1].

    Returns
    -------
    np.ndarray
        ``uint8`` lookup table of length 256, monotone non-decreasing.
    """
    ncdf = np.asarray(ncdf, dtype=np.float64)
    table = round_half_up(ncdf * MAX_LEVEL)
    return np.clip(table, 0, MAX_LEVEL).astype(np.uint8)


def apply_lut(image, lut) -> np.ndarray:
    img = as_gray_image(image)
    lut = np.asarray(lut)
    if lut.shape != (256,):
        raise ValueError(f"lookup table must have 256 entries, got shape {lut.shape}")
    return np.asarray(lut, dtype=np.uint8)[img]


def equalization_lut(image) -> np.ndarray:
    """The GHE lookup table of ``image`` (histogram -> CDF -> NCDF -> table)."""
    img = as_gray_image(image)
    cdf = compute_cdf(compute_histogram(img))
    return build_equalization_lut(normalize_cdf(cdf, img.size))


def ghe(image) -> np.ndarray:
    """Equalize ``image`` with a single image-wide mapping."""
    img = as_gray_image(image)
    return apply_lut(img, equalization_lut(img))
