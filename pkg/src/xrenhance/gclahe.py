"""G-CLAHE: iterative clip-factor search guided by similarity to the GHE image.

Each iteration re-enhances the current locally enhanced image (LEI) with CLAHE
at the current clip factor and compares the candidate with the globally
equalized version of the current LEI (GEI). The candidate is accepted, and the
clip factor increased by one, only while the similarity strictly improves.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Tuple, Union

import numpy as np

from .clahe import ClaheParams, ParameterError, clahe, partition
from .ghe import ghe
from .imagecore import as_gray_image
from .simmetrics import MetricScore, SimilarityScorer

SCORE_DROP = "score-drop"
ITERATION_CAP = "iteration-cap"

Scorer = Union[SimilarityScorer, Callable[[np.ndarray, np.ndarray], object]]


@dataclass(frozen=True)
class GclaheParams:
    grid: int = 8
    clip_factor: float = 3
    scorer: Scorer = field(default_factory=SimilarityScorer)

    def __post_init__(self):
        if isinstance(self.grid, bool) or int(self.grid) != self.grid or self.grid < 1:
            raise ParameterError(f"grid must be an integer >= 1, got {self.grid!r}")
        if not self.clip_factor >= 1:
            raise ParameterError(f"initial clip_factor must be >= 1, got {self.clip_factor!r}")

    @property
    def metric(self) -> str:
        return getattr(self.scorer, "metric", getattr(self.scorer, "__name__", "custom"))


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    clip_factor: float
    score: float
    accepted: bool


@dataclass
class IterationTrace:
    """Per-iteration bookkeeping of one G-CLAHE run.

    ``initial_score`` is the similarity of the input to its own GHE, the
    baseline the first candidate must beat. ``last_iteration`` is the index
    of the final loop pass (``N - 1``), for callers that want an iteration
    count rather than a clip factor.
    """

    metric: str
    initial_score: float
    records: List[IterationRecord] = field(default_factory=list)
    chosen_clip_factor: float = 0.0
    final_score: float = 0.0
    reason: str = SCORE_DROP
    last_iteration: int = -1

    @property
    def accepted(self) -> List[IterationRecord]:
        return [r for r in self.records if r.accepted]


def _value(s) -> float:
    return float(s.value) if isinstance(s, MetricScore) else float(s)


def run_gclahe(image, params: GclaheParams = GclaheParams()) -> Tuple[np.ndarray, float, IterationTrace]:
    """Enhance ``image`` with G-CLAHE.

    Parameters
    ----------
    image : array_like
        8-bit grayscale input.
    params : GclaheParams
        Tile grid, starting clip factor and similarity scorer. The scorer
        is called as ``scorer(reference, candidate)`` and must return
        something comparable with ``>``; :class:`SimilarityScorer` does.

    Returns
    -------
    enhanced : np.ndarray
        The last accepted LEI (the input itself if nothing was accepted).
    clip_factor : float
        The clip factor that produced ``enhanced``; ``initial - 1`` when
        nothing was accepted.
    trace : IterationTrace
    """
    img = as_gray_image(image)
    partition(img, params.grid)  # fail fast on a grid that does not fit
    scorer = params.scorer
    max_iter = params.grid * params.grid - 1

    lei = img
    clip_factor = params.clip_factor
    gei = ghe(lei)
    prev = scorer(gei, lei)
    trace = IterationTrace(metric=params.metric, initial_score=_value(prev))

    n = 0
    while n < max_iter:
        gei = ghe(lei)
        candidate = clahe(lei, ClaheParams(params.grid, clip_factor))
        f = scorer(gei, candidate)
        if f > prev:
            trace.records.append(IterationRecord(n, clip_factor, _value(f), True))
            prev = f
            lei = candidate
            clip_factor += 1
        else:
            trace.records.append(IterationRecord(n, clip_factor, _value(f), False))
            trace.reason = SCORE_DROP
            break
        n += 1
    else:
        trace.reason = ITERATION_CAP

    trace.last_iteration = n - 1
    trace.chosen_clip_factor = clip_factor - 1
    trace.final_score = _value(prev)
    return lei, clip_factor - 1, trace


def explain_trace(trace: IterationTrace) -> str:
    """Render a trace as a fixed-width text table, one row per record."""
    lines = [
        f"metric: {trace.metric}   initial score: {trace.initial_score:.6f}",
        f"{'N':>4}  {'clip':>6}  {'metric':<6}  {'score':>14}  accepted",
    ]
    for r in trace.records:
        lines.append(
            f"{r.iteration:>4}  {r.clip_factor:>6g}  {trace.metric:<6}  {r.score:>14.6f}  {'yes' if r.accepted else 'no'}"
        )
    stop = trace.records[-1].iteration if trace.records else 0
    lines.append(
        f"stopped at iteration {stop} ({trace.reason}); "
        f"chosen clip factor {trace.chosen_clip_factor:g}, final score {trace.final_score:.6f}"
    )
    return "\n".join(lines)
