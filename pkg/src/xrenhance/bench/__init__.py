"""Batch harness, file I/O and command line interface."""

from .harness import (
    BenchRow,
    RunConfig,
    SuiteResult,
    collect_images,
    run_suite,
    sweep_metric,
    sweep_tile_size,
)
from .io import IngestError, ingest, read_pgm, write_image, write_pgm

__all__ = [
    "BenchRow",
    "IngestError",
    "RunConfig",
    "SuiteResult",
    "collect_images",
    "ingest",
    "read_pgm",
    "run_suite",
    "sweep_metric",
    "sweep_tile_size",
    "write_image",
    "write_pgm",
]
