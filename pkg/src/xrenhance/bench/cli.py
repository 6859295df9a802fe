"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 some images failed, 3 nothing could
be processed.
"""

import argparse
import logging
import math
import sys
from pathlib import Path

from ..clahe import ClaheParams, ParameterError
from ..gclahe import GclaheParams, explain_trace, run_gclahe
from ..quality import CANNY_HIGH, CANNY_LOW
from ..simmetrics import METRICS, MetricError, SimilarityScorer
from .harness import (
    BenchError,
    RunConfig,
    SuiteResult,
    enhance,
    metric_table,
    run_suite,
    sweep_metric,
    sweep_tile_size,
)
from .io import IngestError, ingest, write_image

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2
EXIT_FAILED = 3

log = logging.getLogger("xrenhance")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _clip(text: str):
    if text.lower() in ("unlimited", "none", "inf"):
        return None
    value = float(text)
    if math.isnan(value) or value < 1:
        raise argparse.ArgumentTypeError(f"clip factor must be >= 1 or 'unlimited', got {text}")
    return value


def _int_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _metric_list(text: str):
    ids = [t.strip().lower() for t in text.split(",") if t.strip()]
    bad = [m for m in ids if m not in METRICS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown metric(s) {', '.join(bad)}; valid ids: {', '.join(METRICS)}")
    return ids


def _common(p, clahe_clip=True):
    p.add_argument("--ts", type=int, default=8, help="tiles per axis (default 8)")
    if clahe_clip:
        p.add_argument("--clip", type=_clip, default=2.0, help="CLAHE clip factor or 'unlimited' (default 2)")
    p.add_argument("--init-clip", type=float, default=3.0, help="G-CLAHE starting clip factor (default 3)")
    p.add_argument("--metric", choices=METRICS, default="ssim", help="G-CLAHE similarity metric")


def _batch(p):
    p.add_argument("inputs", nargs="+", help="image files or directories")
    p.add_argument("--canny-low", type=float, default=CANNY_LOW)
    p.add_argument("--canny-high", type=float, default=CANNY_HIGH)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", type=int, default=None, help="number of images to draw (default: all)")
    p.add_argument("--out", default=None, help="directory for enhanced images and the report")
    p.add_argument("--report", default=None, help="CSV path (default: OUT/report.csv, or stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xrenhance", description="GHE / CLAHE / G-CLAHE enhancement and evaluation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enhance", help="enhance a single image")
    p.add_argument("input")
    p.add_argument("--algorithm", choices=("ghe", "clahe", "gclahe"), default="gclahe")
    p.add_argument("--out", required=True, help="output image path (.pgm or .png)")
    _common(p)

    p = sub.add_parser("bench", help="enhance and score a set of images")
    p.add_argument("--algorithm", choices=("ghe", "clahe", "gclahe", "original", "all"), default="all")
    _common(p)
    _batch(p)

    p = sub.add_parser("sweep-tiles", help="G-CLAHE over several tile grids")
    p.add_argument("--sizes", type=_int_list, default=[4, 8, 16, 32])
    _common(p, clahe_clip=False)
    _batch(p)

    p = sub.add_parser("sweep-metrics", help="G-CLAHE under each similarity metric")
    p.add_argument("--metrics", type=_metric_list, default=list(METRICS))
    _common(p, clahe_clip=False)
    _batch(p)

    p = sub.add_parser("trace", help="print the G-CLAHE iteration trace for one image")
    p.add_argument("input")
    _common(p, clahe_clip=False)
    return parser


def _config(args) -> RunConfig:
    report = args.report
    if report is None and args.out is not None:
        report = str(Path(args.out) / "report.csv")
    return RunConfig(
        inputs=tuple(args.inputs),
        out_dir=args.out,
        algorithm=getattr(args, "algorithm", "gclahe"),
        clahe=ClaheParams(args.ts, getattr(args, "clip", 2.0)),
        gclahe=GclaheParams(args.ts, args.init_clip, SimilarityScorer(args.metric)),
        canny_low=args.canny_low,
        canny_high=args.canny_high,
        sample=args.sample,
        seed=args.seed,
        report=report,
        jobs=args.jobs,
    )


def _suite_exit(result: SuiteResult, config: RunConfig) -> int:
    if config.report is None:
        sys.stdout.write(result.csv_text)
    if not result.rows:
        return EXIT_FAILED
    return EXIT_PARTIAL if result.failures else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "enhance":
            image = ingest(args.input)
            cfg = RunConfig(
                inputs=(args.input,),
                clahe=ClaheParams(args.ts, args.clip),
                gclahe=GclaheParams(args.ts, args.init_clip, SimilarityScorer(args.metric)),
            )
            out, params = enhance(image, args.algorithm, cfg)
            write_image(args.out, out)
            if params:
                print(" ".join(f"{k}={v}" for k, v in params.items()))
            return EXIT_OK
        if args.command == "trace":
            image = ingest(args.input)
            _, _, trace = run_gclahe(image, GclaheParams(args.ts, args.init_clip, SimilarityScorer(args.metric)))
            print(explain_trace(trace))
            return EXIT_OK

        config = _config(args)
        if args.command == "bench":
            result = run_suite(config)
        elif args.command == "sweep-tiles":
            result = sweep_tile_size(config, args.sizes)
        else:
            result = sweep_metric(config, args.metrics)
            if config.report is not None and result.mean_rows:
                print(metric_table(result.mean_rows))
        return _suite_exit(result, config)
    except (ParameterError, BenchError, MetricError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (IngestError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
