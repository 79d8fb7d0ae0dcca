"""Tests for trend statistics and verdicts."""

import math

import pytest

from skomap.trend import (
    DIVERGING,
    INCONCLUSIVE,
    PLATEAUING,
    UNCLASSIFIED,
    Thresholds,
    ratio,
    summarize,
)

RES = [1024, 4096, 16384]


def _series(means, thresholds=Thresholds(), **kwargs):
    """Two identical seeds per resolution."""
    return summarize("x", 1.0, RES[:len(means)], [0, 1], [[m, m] for m in means],
                     thresholds, **kwargs)


def test_doubling_series_diverges():
    s = _series([1.0, 2.0, 4.0])
    assert s.successive_ratios == [2.0, 2.0]
    assert s.log2_ratios == [1.0, 1.0]
    assert s.span_ratio == 4.0
    assert s.verdict == DIVERGING
    assert s.monotone_fraction == 1.0


def test_flat_series_plateaus():
    assert _series([1.0, 1.05, 1.1]).verdict == PLATEAUING


def test_middle_ground_is_inconclusive():
    assert _series([1.0, 1.1, 1.3]).verdict == INCONCLUSIVE


def test_adjacent_span_uses_finest_pair():
    adjacent = Thresholds(span="adjacent")
    s = _series([1.0, 1.9, 2.0], adjacent)
    assert s.finest_ratio == pytest.approx(2.0 / 1.9)
    assert s.verdict == PLATEAUING
    assert _series([1.0, 1.9, 2.0]).verdict == DIVERGING


def test_unclassified_keeps_statistics():
    s = _series([1.0, 2.0, 4.0], classify_verdict=False)
    assert s.verdict == UNCLASSIFIED
    assert s.span_ratio == 4.0


def test_no_seeds():
    s = summarize("x", 1.0, RES, [], [[], [], []], Thresholds(), skipped=[3, 4])
    assert s.verdict == INCONCLUSIVE
    assert s.skipped_seeds == [3, 4]
    assert s.notes


def test_monotone_fraction_counts_seeds():
    s = summarize("x", 1.0, RES, [0, 1], [[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]], Thresholds())
    assert s.monotone_fraction == 0.5


def test_ratio_edge_cases():
    assert ratio(0.0, 0.0) == 1.0
    assert ratio(1.0, 0.0) == math.inf
    assert ratio(3.0, 2.0) == 1.5


def test_threshold_validation():
    with pytest.raises(ValueError):
        Thresholds(span="diagonal")
    with pytest.raises(ValueError):
        Thresholds(diverging=1.1, plateauing=1.2)
