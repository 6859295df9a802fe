"""Histogram-equalization enhancement for grayscale X-ray images.

Global HE, CLAHE and G-CLAHE (CLAHE with an automatic clip-factor search
steered by similarity to the globally equalized image), plus the similarity
and quality measures used to evaluate them.
"""

from .clahe import ClaheParams, ParameterError, clahe
from .gclahe import GclaheParams, IterationTrace, explain_trace, run_gclahe
from .ghe import apply_lut, build_equalization_lut, ghe
from .imagecore import ImageError, compute_cdf, compute_histogram, normalize_cdf
from .quality import QualityReport, canny, quality_report
from .simmetrics import SimilarityScorer, score

__version__ = "0.1.0"

__all__ = [
    "ClaheParams",
    "GclaheParams",
    "ImageError",
    "IterationTrace",
    "ParameterError",
    "QualityReport",
    "SimilarityScorer",
    "apply_lut",
    "build_equalization_lut",
    "canny",
    "clahe",
    "compute_cdf",
    "compute_histogram",
    "explain_trace",
    "ghe",
    "normalize_cdf",
    "quality_report",
    "run_gclahe",
    "score",
]
