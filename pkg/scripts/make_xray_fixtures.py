"""Build the 8-bit X-ray fixtures in tests/data/xray from public DICOM samples.

Sources (all redistributed on package indexes):

  pydicom-data 1.0.0 (PyPI)  data_store/data/RG1_UNCR.dcm   chest CR
                             data_store/data/RG3_UNCR.dcm   tibia CR
  deid-data 0.0.20 (PyPI)    deid_data/data/animals/cat.dcm  chest DX (feline)
  daikon 1.2.46 (npm)        tests/data/jpeg_baseline_8bit.dcm  coronary XA cine;
                             two well-separated frames are used

Each image gets its stored VOI window (if any), MONOCHROME1 inversion, a
linear map to 0..255 and an integer block-mean downsample so the longest side
is at most --max-side pixels. Needs pydicom (and Pillow for the JPEG frames);
neither is a runtime dependency of the package.

    python scripts/make_xray_fixtures.py --pydicom-data DIR --deid-data DIR \
        --daikon DIR [--max-side 1024]
"""

import argparse
import math
from pathlib import Path

import numpy as np
import pydicom

from xrenhance.bench.io import write_pgm

XA_FRAMES = (12, 60)


def _window(ds, arr):
    arr = arr.astype(np.float64)
    slope = float(getattr(ds, "RescaleSlope", 1) or 1)
    intercept = float(getattr(ds, "RescaleIntercept", 0) or 0)
    arr = arr * slope + intercept
    center = getattr(ds, "WindowCenter", None)
    width = getattr(ds, "WindowWidth", None)
    if center is not None and width is not None:
        center = float(center[0] if isinstance(center, pydicom.multival.MultiValue) else center)
        width = float(width[0] if isinstance(width, pydicom.multival.MultiValue) else width)
        lo, hi = center - width / 2.0, center + width / 2.0
    else:
        lo, hi = float(arr.min()), float(arr.max())
    out = np.clip((arr - lo) / max(hi - lo, 1e-9), 0.0, 1.0)
    if ds.PhotometricInterpretation == "MONOCHROME1":
        out = 1.0 - out
    return np.floor(out * 255.0 + 0.5).astype(np.uint8)


def _downsample(img, max_side):
    factor = max(1, math.ceil(max(img.shape) / max_side))
    if factor == 1:
        return img
    h = img.shape[0] // factor * factor
    w = img.shape[1] // factor * factor
    blocks = img[:h, :w].reshape(h // factor, factor, w // factor, factor).astype(np.float64)
    return np.floor(blocks.mean(axis=(1, 3)) + 0.5).astype(np.uint8)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--pydicom-data", required=True, help="extracted pydicom-data wheel root")
    ap.add_argument("--deid-data", required=True, help="extracted deid-data sdist root")
    ap.add_argument("--daikon", required=True, help="extracted daikon npm package root")
    ap.add_argument("--max-side", type=int, default=1024)
    ap.add_argument("--dest", default=str(Path(__file__).resolve().parents[1] / "tests" / "data" / "xray"))
    args = ap.parse_args()

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    jobs = [
        ("chest_cr_rg1", Path(args.pydicom_data) / "data_store/data/RG1_UNCR.dcm", None),
        ("tibia_cr_rg3", Path(args.pydicom_data) / "data_store/data/RG3_UNCR.dcm", None),
        ("chest_dx_feline", Path(args.deid_data) / "deid_data/data/animals/cat.dcm", None),
    ]
    jobs += [
        (f"coronary_xa_f{f:02d}", Path(args.daikon) / "tests/data/jpeg_baseline_8bit.dcm", f) for f in XA_FRAMES
    ]
    for name, path, frame in jobs:
        ds = pydicom.dcmread(path)
        arr = ds.pixel_array
        if frame is not None:
            arr = arr[frame]
        img = _downsample(_window(ds, arr), args.max_side)
        write_pgm(dest / f"{name}.pgm", img)
        print(f"{name}: {img.shape[1]}x{img.shape[0]} mean={img.mean():.2f}")


if __name__ == "__main__":
    main()
