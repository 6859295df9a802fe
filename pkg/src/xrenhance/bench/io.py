"""Image ingestion and output.

Binary PGM (P5) is read and written natively so golden files stay bit-exact
without third-party codecs. PNG and the other raster formats Pillow knows are
decoded through Pillow and reduced to 8-bit gray.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from ..imagecore import as_gray_image

PGM_SUFFIXES = {".pgm", ".pnm"}
IMAGE_SUFFIXES = PGM_SUFFIXES | {".png", ".jpg", ".jpeg", ".tif", ".tiff", ".bmp"}


class IngestError(Exception):
    """An input file could not be turned into an 8-bit grayscale image."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = str(path)
        self.reason = reason


def luma(rgb: np.ndarray) -> np.ndarray:
    """Integer luma ``round(0.299 R + 0.587 G + 0.114 B)`` of an (H, W, 3) array."""
    rgb = rgb.astype(np.int64)
    y = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
    return y.astype(np.uint8)


def _pgm_header(data: bytes):
    # Returns (magic, width, height, maxval, offset of the raster).
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError("truncated header")
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    magic = tokens[0].decode("ascii", "replace")
    if magic not in ("P5", "P2"):
        raise ValueError(f"unsupported PNM type {magic!r} (expected P5 or P2)")
    width, height, maxval = (int(t) for t in tokens[1:])
    # exactly one whitespace byte separates the header from a binary raster
    return magic, width, height, maxval, pos + 1


def read_pgm(path) -> np.ndarray:
    """Decode a P5 (binary) or P2 (ASCII) graymap.

    Files with ``maxval > 255`` hold 16-bit samples; these are reduced to
    8 bits by dropping the low byte.
    """
    data = Path(path).read_bytes()
    magic, width, height, maxval, offset = _pgm_header(data)
    if width < 1 or height < 1:
        raise ValueError(f"zero-sized image ({width}x{height})")
    if not 0 < maxval < 65536:
        raise ValueError(f"invalid maxval {maxval}")
    count = width * height
    if magic == "P2":
        values = np.array(data[offset - 1 :].split()[:count], dtype=np.int64)
        if values.size != count:
            raise ValueError("truncated raster")
    else:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[offset : offset + count * dtype.itemsize]
        if len(raw) != count * dtype.itemsize:
            raise ValueError("truncated raster")
        values = np.frombuffer(raw, dtype=dtype).astype(np.int64)
    if values.max(initial=0) > maxval:
        raise ValueError("sample exceeds maxval")
    if maxval > 255:
        values = values >> 8
    return values.reshape(height, width).astype(np.uint8)


def write_pgm(path, image) -> None:
    """Write an 8-bit image as binary PGM (P5, maxval 255)."""
    img = as_gray_image(image)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(img).tobytes())


def _from_pillow(path) -> np.ndarray:
    with Image.open(path) as im:
        im.load()
        mode = im.mode
        if mode in ("I;16", "I;16B", "I;16L", "I"):
            arr = np.array(im).astype(np.int64)
            if arr.min() < 0 or arr.max() > 65535:
                raise ValueError(f"unsupported sample range for mode {mode}")
            return (arr >> 8).astype(np.uint8)
        if mode == "L":
            return np.array(im, dtype=np.uint8)
        if mode in ("LA", "1"):
            return np.array(im.convert("L"), dtype=np.uint8)
        return luma(np.array(im.convert("RGB"), dtype=np.uint8))


def ingest(path) -> np.ndarray:
    """Load ``path`` as an 8-bit grayscale image.

    Color is reduced with the integer luma rule, 16-bit samples by a right
    shift of 8. Any failure is reported as :class:`IngestError` carrying the
    path and the reason.
    """
    p = Path(path)
    if not p.is_file():
        raise IngestError(p, "no such file")
    try:
        if p.suffix.lower() in PGM_SUFFIXES:
            img = read_pgm(p)
        else:
            img = _from_pillow(p)
    except IngestError:
        raise
    except Exception as exc:  # decoder errors come in many types
        raise IngestError(p, str(exc) or type(exc).__name__) from exc
    if img.ndim != 2 or img.size == 0:
        raise IngestError(p, f"zero-dimension image {img.shape}")
    return img


def write_image(path, image) -> None:
    """Write ``image`` as PGM, or through Pillow for any other suffix."""
    p = Path(path)
    if p.suffix.lower() in PGM_SUFFIXES or not p.suffix:
        write_pgm(p, image)
    else:
        Image.fromarray(as_gray_image(image)).save(p)
