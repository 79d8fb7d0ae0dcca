"""Trend statistics and verdicts for variation-vs-resolution series."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .report import VariationSeries

logger = logging.getLogger(__name__)

DIVERGING = "diverging"
PLATEAUING = "plateauing"
INCONCLUSIVE = "inconclusive"
UNCLASSIFIED = "unclassified"

MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class Thresholds:
    """Verdict thresholds on a ratio of mean variations.

    ``span`` picks the ratio: "full" compares the finest resolution with the
    coarsest, "adjacent" compares the two finest.
    """
    diverging: float = 1.5
    plateauing: float = 1.15
    span: str = "full"

    def __post_init__(self):
        if self.span not in ("full", "adjacent"):
            raise ValueError(f"span must be 'full' or 'adjacent', got {self.span!r}")
        if not self.plateauing < self.diverging:
            raise ValueError("plateauing threshold must be below the diverging threshold")

    def to_dict(self) -> dict:
        return {"diverging": self.diverging, "plateauing": self.plateauing, "span": self.span}


def ratio(num: float, den: float) -> float:
    if den > 0:
        return num / den
    return 1.0 if num == 0 else math.inf


def classify(series: VariationSeries, thresholds: Thresholds) -> str:
    value = series.span_ratio if thresholds.span == "full" else series.finest_ratio
    if value is None:
        return INCONCLUSIVE
    if value >= thresholds.diverging:
        return DIVERGING
    if value <= thresholds.plateauing:
        return PLATEAUING
    return INCONCLUSIVE


def summarize(label: str, parameter: float, resolutions: list[int], seeds: list[int],
              estimates: list[list[float]], thresholds: Thresholds,
              skipped: list[int] = None, classify_verdict: bool = True) -> VariationSeries:
    """Means, ratios, monotone fraction and verdict for one series.

    estimates[i][j] is the estimate at resolutions[i] for seeds[j].
    """
    series = VariationSeries(
        label=label,
        parameter=float(parameter),
        resolutions=list(resolutions),
        seeds=list(seeds),
        estimates=[[float(v) for v in row] for row in estimates],
        skipped_seeds=list(skipped or []),
    )
    if not seeds:
        series.verdict = INCONCLUSIVE if classify_verdict else UNCLASSIFIED
        series.notes.append("no seeds produced an estimate")
        return series

    table = np.array(series.estimates)
    series.means = [float(m) for m in table.mean(axis=1)]
    series.successive_ratios = [ratio(b, a) for a, b in zip(series.means, series.means[1:])]
    series.log2_ratios = [math.log2(r) if r > 0 else -math.inf for r in series.successive_ratios]
    if len(series.means) >= 2:
        series.finest_ratio = series.successive_ratios[-1]
        series.span_ratio = ratio(series.means[-1], series.means[0])
    steps = np.diff(table, axis=0)
    monotone = (steps >= -MONOTONE_SLACK).all(axis=0)
    series.monotone_fraction = float(monotone.mean())
    series.verdict = classify(series, thresholds) if classify_verdict else UNCLASSIFIED
    logger.info("%s: means %s -> %s", label, ["%.4g" % m for m in series.means], series.verdict)
    return series
