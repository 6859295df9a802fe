"""Contrast-limited adaptive histogram equalization.

The image is cut into a ``grid x grid`` array of tiles. Each tile gets its own
equalization table built from a clipped histogram, and every output pixel is a
bilinear blend of the tables of the (up to) four tiles whose centers surround
it, evaluated at the pixel's own intensity.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .imagecore import LEVELS, MAX_LEVEL, as_gray_image, round_half_up


class ParameterError(ValueError):
    """Raised when tiling or clipping parameters do not fit the image."""


@dataclass(frozen=True)
class ClaheParams:
    """Tiling and contrast-limit settings.

    Parameters
    ----------
    grid : int
        Tiles per axis; the image is split into ``grid * grid`` tiles.
    clip_factor : float or None
        Clip limit as a multiple of the average per-bin count of a tile.
        ``None`` (or ``math.inf``) disables clipping, which gives plain AHE.
    """

    grid: int = 8
    clip_factor: Optional[float] = 2.0

    def __post_init__(self):
        if isinstance(self.grid, bool) or int(self.grid) != self.grid or self.grid < 1:
            raise ParameterError(f"grid must be an integer >= 1, got {self.grid!r}")
        if self.clip_factor is not None:
            cf = float(self.clip_factor)
            if math.isnan(cf) or cf < 1:
                raise ParameterError(f"clip_factor must be >= 1 or unlimited, got {self.clip_factor!r}")

    @property
    def unlimited(self) -> bool:
        return self.clip_factor is None or math.isinf(self.clip_factor)


@dataclass
class TileGrid:
    """Tile boundaries, centers and (once built) the per-tile lookup tables.

    ``x_bounds``/``y_bounds`` hold ``grid + 1`` cut positions; tile ``(ty, tx)``
    covers rows ``y_bounds[ty]:y_bounds[ty + 1]`` and the analogous columns.
    Centers are in pixel-index coordinates, so a pixel sits exactly on a
    center only when the tile extent is odd. ``luts`` is indexed
    ``[ty, tx, level]``.
    """

    x_bounds: np.ndarray
    y_bounds: np.ndarray
    luts: Optional[np.ndarray] = None

    @property
    def grid(self) -> int:
        return len(self.x_bounds) - 1

    @property
    def x_centers(self) -> np.ndarray:
        return (self.x_bounds[:-1] + self.x_bounds[1:] - 1) / 2.0

    @property
    def y_centers(self) -> np.ndarray:
        return (self.y_bounds[:-1] + self.y_bounds[1:] - 1) / 2.0

    def tile_sizes(self) -> np.ndarray:
        """Pixel count of every tile, shape ``(grid, grid)``."""
        return np.outer(np.diff(self.y_bounds), np.diff(self.x_bounds))


def _cuts(length: int, grid: int) -> np.ndarray:
    return (np.arange(grid + 1, dtype=np.int64) * length) // grid


def partition(image, grid: int) -> TileGrid:
    """Split ``image`` into a balanced ``grid x grid`` tiling.

    Tile ``t`` along an axis of length ``n`` spans ``[floor(t*n/grid),
    floor((t+1)*n/grid))``, so tile extents differ by at most one pixel.
    """
    img = as_gray_image(image)
    h, w = img.shape
    if isinstance(grid, bool) or int(grid) != grid:
        raise ParameterError(f"grid must be an integer, got {grid!r}")
    grid = int(grid)
    if grid < 1:
        raise ParameterError(f"grid must be >= 1, got {grid}")
    if grid > min(w, h):
        raise ParameterError(
            f"grid {grid} exceeds min(width, height) = {min(w, h)} for a {w}x{h} image"
        )
    return TileGrid(x_bounds=_cuts(w, grid), y_bounds=_cuts(h, grid))


def clip_limit_for(clip_factor: float, tile_pixels: int) -> int:
    """Absolute clip limit: ``max(1, round(clip_factor * tile_pixels / 256))``."""
    return max(1, round_half_up(clip_factor * tile_pixels / LEVELS))


def _clip_rows(hists: np.ndarray, limits: np.ndarray) -> np.ndarray:
    # Row-wise clip + single-pass redistribution. The remainder goes one unit
    # each to the lowest-indexed bins.
    hists = np.asarray(hists, dtype=np.int64)
    limits = np.asarray(limits, dtype=np.int64).reshape(-1, 1)
    nbins = hists.shape[1]
    clipped = np.minimum(hists, limits)
    excess = (hists - clipped).sum(axis=1, keepdims=True)
    share, remainder = np.divmod(excess, nbins)
    out = clipped + share
    out += np.arange(nbins)[None, :] < remainder
    return out


def clip_histogram(hist, clip_limit: int) -> np.ndarray:
    """Cap every bin at ``clip_limit`` and spread the excess over all bins.

    The excess is added uniformly (``excess // nbins`` per bin) and the
    remainder one unit at a time to the lowest-indexed bins. Only one pass is
    made, so a bin may end up above the limit by at most
    ``ceil(excess / nbins)``. The total count is preserved exactly.
    """
    hist = np.asarray(hist, dtype=np.int64)
    if hist.ndim != 1:
        raise ValueError("expected a 1-D histogram")
    if clip_limit < 1:
        raise ParameterError(f"clip_limit must be >= 1, got {clip_limit}")
    return _clip_rows(hist[None, :], np.array([clip_limit]))[0]


def tile_histograms(image, grid: TileGrid) -> np.ndarray:
    """Histograms of every tile, shape ``(grid, grid, 256)``."""
    img = as_gray_image(image)
    n = grid.grid
    row_tile = np.repeat(np.arange(n), np.diff(grid.y_bounds))
    col_tile = np.repeat(np.arange(n), np.diff(grid.x_bounds))
    tile_id = row_tile[:, None] * n + col_tile[None, :]
    flat = tile_id.ravel() * LEVELS + img.ravel()
    counts = np.bincount(flat, minlength=n * n * LEVELS)
    return counts.reshape(n, n, LEVELS).astype(np.int64)


def build_tile_luts(image, grid: TileGrid, clip_factor: Optional[float]) -> TileGrid:
    """Return a copy of ``grid`` carrying one equalization table per tile.

    Each tile histogram is clipped (unless ``clip_factor`` is unlimited),
    accumulated, normalized by the tile's pixel count and mapped to 0..255.
    """
    n = grid.grid
    hists = tile_histograms(image, grid).reshape(n * n, LEVELS)
    sizes = grid.tile_sizes().ravel()
    if clip_factor is not None and not math.isinf(clip_factor):
        limits = np.array([clip_limit_for(clip_factor, int(s)) for s in sizes])
        hists = _clip_rows(hists, limits)
    cdf = np.cumsum(hists, axis=1)
    ncdf = cdf / sizes[:, None].astype(np.float64)
    luts = np.clip(round_half_up(ncdf * MAX_LEVEL), 0, MAX_LEVEL).astype(np.uint8)
    return TileGrid(grid.x_bounds, grid.y_bounds, luts.reshape(n, n, LEVELS))


def _axis_weights(length: int, centers: np.ndarray):
    """Lower/upper tile index and upper-tile weight for each coordinate."""
    pos = np.arange(length, dtype=np.float64)
    n = len(centers)
    lo = np.clip(np.searchsorted(centers, pos, side="right") - 1, 0, n - 1)
    hi = np.minimum(lo + 1, n - 1)
    span = centers[hi] - centers[lo]
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(span > 0, (pos - centers[lo]) / np.where(span > 0, span, 1.0), 0.0)
    # Outside the outer ring of centers: clamp to the edge tile.
    w = np.clip(w, 0.0, 1.0)
    w[pos <= centers[0]] = 0.0
    w[pos >= centers[-1]] = 0.0
    return lo, hi, w


def bilinear_blend(image, grid: TileGrid) -> np.ndarray:
    """Blend the four surrounding tile mappings at every pixel.

    Pixels beyond the outermost tile centers fall back to linear
    interpolation along the border and to the nearest tile in the corners.
    The blend is computed in float64 and rounded once.
    """
    if grid.luts is None:
        raise ValueError("grid has no lookup tables; call build_tile_luts first")
    img = as_gray_image(image)
    h, w = img.shape
    y0, y1, wy = _axis_weights(h, grid.y_centers)
    x0, x1, wx = _axis_weights(w, grid.x_centers)
    luts = grid.luts
    v = img
    r0, r1 = y0[:, None], y1[:, None]
    c0, c1 = x0[None, :], x1[None, :]
    a = luts[r0, c0, v].astype(np.float64)
    b = luts[r0, c1, v].astype(np.float64)
    c = luts[r1, c0, v].astype(np.float64)
    d = luts[r1, c1, v].astype(np.float64)
    wy = wy[:, None]
    wx = wx[None, :]
    blended = (1.0 - wy) * ((1.0 - wx) * a + wx * b) + wy * ((1.0 - wx) * c + wx * d)
    return np.clip(round_half_up(blended), 0, MAX_LEVEL).astype(np.uint8)


def clahe(image, params: ClaheParams = ClaheParams()) -> np.ndarray:
    """Partition, build clipped per-tile tables and blend them."""
    img = as_gray_image(image)
    grid = partition(img, params.grid)
    clip = None if params.unlimited else float(params.clip_factor)
    return bilinear_blend(img, build_tile_luts(img, grid, clip))
