"""Tests for the thorn-domain process and its variation experiments."""

import numpy as np
import pytest

from skomap.brownian import THORN_X_STREAM, THORN_Y_STREAM, bridge_values
from skomap.cusp import BoundarySpec
from skomap.errors import PathDomainError
from skomap.esm import esm_solve
from skomap.pathkit import GridPath, TimeGrid, variation
from skomap.thorn import (
    ThornSpec,
    default_threshold,
    detect_excursions,
    excursion_variation_experiment,
    sample_from_paths,
    semimartingale_experiment,
    simulate_thorn,
    walls,
)
from skomap.trend import DIVERGING, PLATEAUING, UNCLASSIFIED


def test_width_profile():
    spec = ThornSpec(gamma=3.0, epsilon=1.0, slope_cap=1.0)
    assert float(spec.width(0.5)) == 0.125
    assert float(spec.width(2.0)) == 2.0
    assert float(spec.left(0.0)) == 0.0 == float(spec.right(0.0))
    assert float(ThornSpec(gamma=1.0, base_width=1.0).width(0.0)) == 1.0


def test_classifiable_profiles():
    assert ThornSpec(gamma=1.0).classifiable()
    assert ThornSpec(gamma=3.0).classifiable()
    assert not ThornSpec(gamma=2.0).classifiable()
    assert not ThornSpec(gamma=1.0, base_width=1.0).classifiable()
    assert not ThornSpec(gamma=0.5, lipschitz=False).classifiable()


def test_spec_validation():
    with pytest.raises(PathDomainError):
        ThornSpec(gamma=0.5)
    with pytest.raises(PathDomainError):
        ThornSpec(gamma=0.0, lipschitz=False)
    with pytest.raises(PathDomainError):
        ThornSpec(gamma=1.0, epsilon=-1.0)


def test_simulated_path_stays_in_thorn():
    spec = ThornSpec(gamma=3.0)
    sample = simulate_thorn(spec, seed=2, resolution=512)
    assert (sample.z2.values >= 0).all()
    assert walls(spec, sample.z2).contains(sample.z1)
    assert np.allclose(sample.y.values, sample.z1.values - sample.b1.values)
    assert sample.z1.values[0] == 0.0


def test_drivers_are_uncorrelated():
    ends = np.array([[bridge_values(s, 1.0, 0, THORN_X_STREAM)[-1][-1],
                      bridge_values(s, 1.0, 0, THORN_Y_STREAM)[-1][-1]] for s in range(10000)])
    assert abs(np.corrcoef(ends.T)[0, 1]) < 0.05


def test_flat_thorn_matches_constant_gap():
    """Above epsilon with no slope the walls are a constant gap of epsilon**gamma."""
    grid = TimeGrid.dyadic(1.0, 8)
    rng = np.random.default_rng(0)
    b1 = GridPath(grid, np.concatenate(([0.0], np.cumsum(rng.normal(scale=0.06, size=256)))))
    b2 = GridPath(grid, np.concatenate(([0.0], np.cumsum(rng.normal(scale=0.06, size=256)))))
    spec = ThornSpec(gamma=1.0, epsilon=1.0, slope_cap=0.0)
    sample = sample_from_paths(spec, b1, b2, y0=10.0)
    assert (sample.z2.values >= 1.0).all()
    flat = esm_solve(b1, BoundarySpec("constant_gap", gap=1.0).bounds(grid))
    assert np.array_equal(sample.z1.values, flat.phi.values)
    assert variation(sample.y, 0.0, 1.0) == variation(flat.eta, 0.0, 1.0)


def _bump_path():
    grid = TimeGrid.uniform(1.0, 10)
    return GridPath(grid, [0.0, 0.0, 0.5, 1.0, 0.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0])


def test_detect_planted_bumps():
    z2 = _bump_path()
    y = GridPath(z2.grid, np.arange(11, dtype=float))
    found = detect_excursions(z2, 0.25, y)
    assert len(found) == 2
    first, second = found
    assert (first.start_index, first.end_index) == (1, 5)
    assert first.start == pytest.approx(0.1)
    assert first.end == pytest.approx(0.5)
    assert first.max_height == 1.0
    assert first.variation == 4.0
    assert (second.start_index, second.end_index) == (6, 8)
    assert second.max_height == 2.0
    assert second.contains(0.7)
    assert not second.contains(0.9)


def test_no_excursions():
    grid = TimeGrid.uniform(1.0, 10)
    assert detect_excursions(GridPath.constant(grid, 0.0), 0.1) == []


def test_runs_touching_horizon_are_dropped():
    grid = TimeGrid.uniform(1.0, 6)
    z2 = GridPath(grid, [1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0])
    found = detect_excursions(z2, 0.5)
    assert [(e.start_index, e.end_index) for e in found] == [(2, 4)]


def test_threshold_must_be_positive():
    with pytest.raises(PathDomainError):
        detect_excursions(_bump_path(), 0.0)


def test_higher_threshold_nests_inside_lower():
    """Every excursion above a higher level lies inside one above a lower level."""
    z2 = _bump_path()
    low = detect_excursions(z2, 0.25)
    high = detect_excursions(z2, 0.75)
    assert len(high) == 2
    for e in high:
        assert any(f.start <= e.start and e.end <= f.end for f in low)


def test_excursions_are_subadditive():
    spec = ThornSpec(gamma=1.0)
    sample = simulate_thorn(spec, seed=5, resolution=1024)
    found = detect_excursions(sample.z2, default_threshold(sample.z2.grid), sample.y)
    total = variation(sample.y, 0.0, 1.0)
    assert sum(e.variation for e in found) <= total + 1e-12
    for e in found:
        assert e.variation == pytest.approx(variation(sample.y, e.start, e.end))


def test_default_threshold_scales_with_step():
    assert default_threshold(TimeGrid.dyadic(1.0, 10)) == pytest.approx(2.0 / 32)
    assert default_threshold(TimeGrid.dyadic(1.0, 12)) == pytest.approx(2.0 / 64)


def test_excursion_experiment_report():
    specs = [ThornSpec(gamma=1.0), ThornSpec(gamma=2.0)]
    report = excursion_variation_experiment(specs, [64, 256], list(range(6)))
    assert report.experiment == "thorn-excursion"
    assert [s.label for s in report.series] == ["gamma=1", "gamma=2"]
    assert report.series[1].verdict == UNCLASSIFIED
    assert report.series[1].notes
    for s in report.series:
        assert len(s.seeds) + len(s.skipped_seeds) == 6
        for row in s.rows():
            assert row[5] is not None and row[5] < row[6]
    again = excursion_variation_experiment(specs, [64, 256], list(range(6)))
    assert report.to_csv() == again.to_csv()


def test_semimartingale_experiment_report():
    specs = [ThornSpec(gamma=1.0), ThornSpec(gamma=1.0, base_width=1.0)]
    report = semimartingale_experiment(specs, [64, 256], [0, 1, 2])
    assert report.experiment == "thorn-horizon"
    assert list(report.verdicts) == ["gamma=1", "gamma=1 base=1"]
    for s in report.series:
        assert len(s.means) == 2
        assert all(m >= 0 for m in s.means)


def test_excursion_window_is_fixed_across_resolutions():
    """The window comes from the coarsest level and is measured unchanged at finer ones."""
    resolutions = [64, 256, 1024]
    report = excursion_variation_experiment([ThornSpec(gamma=1.0)], resolutions, list(range(4)))
    series = report.series[0]
    assert series.seeds
    for j, seed in enumerate(series.seeds):
        windows = {(row[j][0], row[j][1]) for row in series.intervals}
        assert len(windows) == 1
        (t1, t2), = windows
        b1, b2 = (bridge_values(seed, 1.0, 6, stream)[6] for stream in (THORN_X_STREAM, THORN_Y_STREAM))
        grid = TimeGrid.dyadic(1.0, 6)
        coarse = sample_from_paths(ThornSpec(gamma=1.0), GridPath(grid, b1), GridPath(grid, b2))
        tallest = max(detect_excursions(coarse.z2, default_threshold(grid)),
                      key=lambda e: e.max_height)
        assert (tallest.start, tallest.end) == (t1, t2)


SWEEP = [1024, 4096, 16384, 65536]


def test_excursion_variation_dichotomy():
    """Finite per-excursion variation for a Lipschitz thorn, divergence for gamma > 2."""
    specs = [ThornSpec(gamma=1.0), ThornSpec(gamma=3.0)]
    report = excursion_variation_experiment(specs, SWEEP, list(range(10)))
    assert report.verdicts == {"gamma=1": PLATEAUING, "gamma=3": DIVERGING}


def test_widened_thorn_horizon_variation_settles():
    report = semimartingale_experiment([ThornSpec(gamma=1.0, base_width=1.0)], SWEEP, list(range(10)))
    assert report.series[0].verdict == PLATEAUING
