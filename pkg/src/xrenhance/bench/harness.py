"""Batch evaluation: enhance a sample of images, score them, write CSV.

Rows are ordered by the (sorted) sampled input list, never by completion
order, and every float is written with ``repr`` so a rerun with the same seed
and inputs produces a byte-identical file.
"""

import csv
import io
import logging
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..clahe import ClaheParams, ParameterError, clahe
from ..gclahe import GclaheParams, run_gclahe
from ..ghe import ghe
from ..quality import CANNY_HIGH, CANNY_LOW, quality_report
from ..simmetrics import METRICS, MetricError, SimilarityScorer
from .io import IMAGE_SUFFIXES, IngestError, ingest, write_pgm

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "image",
    "algorithm",
    "ts",
    "clip_factor",
    "metric",
    "score",
    "edge_count",
    "edge_density",
    "mean_value",
    "entropy",
    "avg_gradient",
)
MEAN_ID = "mean"
ALGORITHMS = ("ghe", "clahe", "gclahe")
SELECTABLE = ALGORITHMS + ("original", "all")


class BenchError(Exception):
    """Configuration problems that stop a run before any image is processed."""


@dataclass(frozen=True)
class RunConfig:
    inputs: Tuple[str, ...]
    out_dir: Optional[str] = None
    algorithm: str = "all"
    clahe: ClaheParams = ClaheParams(grid=8, clip_factor=2.0)
    gclahe: GclaheParams = field(default_factory=GclaheParams)
    canny_low: float = CANNY_LOW
    canny_high: float = CANNY_HIGH
    sample: Optional[int] = None
    seed: int = 0
    report: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if isinstance(self.inputs, (str, os.PathLike)):
            object.__setattr__(self, "inputs", (str(self.inputs),))
        else:
            object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        if self.algorithm not in SELECTABLE:
            raise BenchError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(SELECTABLE)}")
        if self.sample is not None and self.sample < 1:
            raise BenchError(f"sample size must be >= 1, got {self.sample}")
        if self.jobs < 1:
            raise BenchError(f"jobs must be >= 1, got {self.jobs}")
        if self.canny_low > self.canny_high:
            raise BenchError(f"canny low {self.canny_low} exceeds canny high {self.canny_high}")

    @property
    def algorithms(self) -> Tuple[str, ...]:
        return ALGORITHMS if self.algorithm == "all" else (self.algorithm,)


@dataclass
class BenchRow:
    image: str
    algorithm: str
    ts: Optional[float] = None
    clip_factor: Optional[float] = None
    metric: Optional[str] = None
    score: Optional[float] = None
    edge_count: Optional[float] = None
    edge_density: Optional[float] = None
    mean_value: Optional[float] = None
    entropy: Optional[float] = None
    avg_gradient: Optional[float] = None


@dataclass(frozen=True)
class Failure:
    image: str
    stage: str
    reason: str


@dataclass
class SuiteResult:
    rows: List[BenchRow]
    mean_rows: List[BenchRow]
    failures: List[Failure]
    csv_text: str
    attempted: int = 0

    @property
    def all_rows(self) -> List[BenchRow]:
        return self.rows + self.mean_rows


# --- input discovery -------------------------------------------------------


def collect_images(inputs: Sequence[str]) -> List[Tuple[str, Path]]:
    """Expand files and directories into sorted ``(image_id, path)`` pairs.

    Directories are searched recursively for known image suffixes; the id is
    the path relative to the directory. Explicit files use their file name.
    """
    found = {}
    for entry in inputs:
        p = Path(entry)
        if p.is_dir():
            for f in sorted(p.rglob("*")):
                if f.is_file() and f.suffix.lower() in IMAGE_SUFFIXES:
                    found.setdefault(f.relative_to(p).as_posix(), f)
        else:
            found.setdefault(p.name, p)
    return sorted(found.items())


def sample_images(items: List[Tuple[str, Path]], sample: Optional[int], seed: int):
    """Seeded shuffle of the sorted list, truncated, then re-sorted."""
    items = sorted(items)
    if sample is None or sample >= len(items):
        return items
    shuffled = list(items)
    random.Random(seed).shuffle(shuffled)
    return sorted(shuffled[:sample])


# --- enhancement and scoring -------------------------------------------------


def enhance(image, algorithm: str, config: RunConfig):
    """Run one algorithm; returns the output image and the parameter fields of its row."""
    if algorithm == "original":
        return image, {}
    if algorithm == "ghe":
        return ghe(image), {}
    if algorithm == "clahe":
        return clahe(image, config.clahe), {"ts": config.clahe.grid, "clip_factor": config.clahe.clip_factor}
    if algorithm == "gclahe":
        out, chosen, trace = run_gclahe(image, config.gclahe)
        return out, {
            "ts": config.gclahe.grid,
            "clip_factor": chosen,
            "metric": trace.metric,
            "score": trace.final_score,
        }
    raise BenchError(f"unknown algorithm {algorithm!r}")


def _row(image_id, algorithm, params, report) -> BenchRow:
    return BenchRow(
        image=image_id,
        algorithm=algorithm,
        edge_count=report.edge_count,
        edge_density=report.edge_density,
        mean_value=report.mean_value,
        entropy=report.entropy,
        avg_gradient=report.average_gradient,
        **params,
    )


def _output_path(out_dir, label, image_id) -> Path:
    target = Path(out_dir) / label / Path(image_id).with_suffix(".pgm")
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def _process(image_id, path, tasks, config: RunConfig):
    """Work for one input image: ``tasks`` is a list of (label, algorithm, config)."""
    rows, failures = [], []
    try:
        image = ingest(path)
    except IngestError as exc:
        return rows, [Failure(image_id, "ingest", exc.reason)]
    for label, algorithm, cfg in tasks:
        try:
            out, params = enhance(image, algorithm, cfg)
            report = quality_report(out, cfg.canny_low, cfg.canny_high)
        except (ParameterError, MetricError, ValueError) as exc:
            failures.append(Failure(image_id, label, str(exc)))
            continue
        rows.append(_row(image_id, algorithm, params, report))
        if cfg.out_dir is not None:
            write_pgm(_output_path(cfg.out_dir, label, image_id), out)
    return rows, failures


def _run(config: RunConfig, tasks):
    items = sample_images(collect_images(config.inputs), config.sample, config.seed)
    if not items:
        raise BenchError("no input images found")
    jobs = min(config.jobs, len(items))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda it: _process(it[0], it[1], tasks, config), items))
    else:
        results = [_process(image_id, path, tasks, config) for image_id, path in items]
    rows, failures = [], []
    for r, f in results:
        rows.extend(r)
        failures.extend(f)
    for f in failures:
        log.warning("skipped %s (%s): %s", f.image, f.stage, f.reason)
    return rows, failures, len(items)


# --- aggregation and CSV -----------------------------------------------------

_NUMERIC = ("ts", "clip_factor", "score", "edge_count", "edge_density", "mean_value", "entropy", "avg_gradient")


def mean_rows(rows: List[BenchRow], keys: Sequence[str]) -> List[BenchRow]:
    """One row per distinct value of ``keys`` holding column means.

    A numeric column is averaged only when every row in the group has it;
    otherwise it is left empty. Groups appear in first-seen order.
    """
    groups: Dict[tuple, List[BenchRow]] = {}
    for row in rows:
        groups.setdefault(tuple(getattr(row, k) for k in keys), []).append(row)
    out = []
    for key, members in groups.items():
        agg = BenchRow(image=MEAN_ID, algorithm=members[0].algorithm)
        for k, v in zip(keys, key):
            setattr(agg, k, v)
        metrics = {r.metric for r in members}
        if "metric" not in keys and len(metrics) == 1:
            agg.metric = metrics.pop()
        for name in _NUMERIC:
            if name in keys:
                continue
            values = [getattr(r, name) for r in members]
            if all(v is not None for v in values):
                setattr(agg, name, sum(float(v) for v in values) / len(values))
        out.append(agg)
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() and abs(value) < 2**53 else repr(value)
    return str(value)


def to_csv(rows: Sequence[BenchRow], seed: int, sample: Optional[int]) -> str:
    buf = io.StringIO()
    buf.write(f"# xrenhance-bench schema={SCHEMA_VERSION} seed={seed} sample={'all' if sample is None else sample}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(path_or_text) -> List[Dict[str, str]]:
    """Parse a report written by :func:`to_csv` into dicts (comment line skipped)."""
    text = path_or_text
    if not isinstance(text, str) or "\n" not in text:
        text = Path(path_or_text).read_text()
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _finish(config: RunConfig, rows, failures, attempted, keys) -> SuiteResult:
    means = mean_rows(rows, keys)
    text = to_csv(rows + means, config.seed, config.sample)
    if config.report is not None:
        Path(config.report).parent.mkdir(parents=True, exist_ok=True)
        Path(config.report).write_text(text)
    return SuiteResult(rows, means, failures, text, attempted)


def run_suite(config: RunConfig) -> SuiteResult:
    """Enhance and score every sampled image with each selected algorithm."""
    tasks = [(alg, alg, config) for alg in config.algorithms]
    rows, failures, attempted = _run(config, tasks)
    return _finish(config, rows, failures, attempted, ("algorithm",))


def sweep_tile_size(config: RunConfig, sizes: Sequence[int]) -> SuiteResult:
    """G-CLAHE at each grid size; one aggregate row per size."""
    if not sizes:
        raise BenchError("no tile sizes given")
    tasks = []
    for ts in sizes:
        cfg = replace(config, gclahe=replace(config.gclahe, grid=int(ts)))
        tasks.append((f"gclahe_ts{ts}", "gclahe", cfg))
    rows, failures, attempted = _run(config, tasks)
    return _finish(config, rows, failures, attempted, ("algorithm", "ts"))


def sweep_metric(config: RunConfig, metrics: Sequence[str]) -> SuiteResult:
    """G-CLAHE driven by each similarity metric; one aggregate row per metric."""
    unknown = [m for m in metrics if m not in METRICS]
    if unknown or not metrics:
        raise MetricError(f"unknown metric id(s) {unknown}; valid ids: {', '.join(METRICS)}")
    tasks = []
    for m in metrics:
        cfg = replace(config, gclahe=replace(config.gclahe, scorer=SimilarityScorer(m)))
        tasks.append((f"gclahe_{m}", "gclahe", cfg))
    rows, failures, attempted = _run(config, tasks)
    return _finish(config, rows, failures, attempted, ("algorithm", "metric"))


def metric_table(means: Sequence[BenchRow]) -> str:
    """Edge count / density per metric laid out with metrics as columns."""
    cols = [r.metric for r in means]
    lines = ["\t".join([""] + [c.upper() for c in cols])]
    lines.append("\t".join(["Edge Count"] + [f"{r.edge_count:.2f}" for r in means]))
    lines.append("\t".join(["Edge Density"] + [f"{r.edge_density:.4f}" for r in means]))
    return "\n".join(lines)
