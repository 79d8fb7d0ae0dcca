"""Tests for time grids, grid paths and boundary pairs."""

import math

import numpy as np
import pytest

from skomap.errors import BoundaryOrderError, GridMismatchError, PathDomainError
from skomap.pathkit import (
    BoundaryPair,
    GridPath,
    TimeGrid,
    align,
    evaluate,
    merge_grids,
    refine,
    resample,
    restrict,
    sup_distance,
    variation,
)


def test_grid_rejects_bad_points():
    """Grids must start at 0 and strictly increase."""
    with pytest.raises(PathDomainError):
        TimeGrid(np.array([0.5, 1.0]))
    with pytest.raises(PathDomainError):
        TimeGrid(np.array([0.0, 1.0, 1.0]))
    with pytest.raises(PathDomainError):
        TimeGrid(np.array([0.0]))


def test_dyadic_grids_nest():
    """Level k points are the even points of level k+1."""
    coarse = TimeGrid.dyadic(2.0, 3)
    fine = TimeGrid.dyadic(2.0, 4)
    assert len(coarse) == 9
    assert np.array_equal(fine.points[0::2], coarse.points)
    assert fine.horizon == 2.0


def test_evaluate_cadlag():
    """A step path holds its value until the next grid point."""
    grid = TimeGrid(np.array([0.0, 1.0, 2.0]))
    path = GridPath(grid, [0.0, 1.0, 2.0])
    assert evaluate(path, 0.0) == 0.0
    assert evaluate(path, 0.5) == 0.0
    assert evaluate(path, 1.5) == 1.0
    assert evaluate(path, 2.0) == 2.0


def test_evaluate_outside_horizon():
    grid = TimeGrid(np.array([0.0, 1.0, 2.0]))
    path = GridPath(grid, [0.0, 1.0, 2.0])
    with pytest.raises(PathDomainError):
        evaluate(path, 2.5)
    with pytest.raises(PathDomainError):
        evaluate(path, -0.1)


def test_nan_rejected():
    grid = TimeGrid.uniform(1.0, 2)
    with pytest.raises(PathDomainError):
        GridPath(grid, [0.0, math.nan, 1.0])


def test_variation_examples():
    """Variation sums absolute increments over the window."""
    grid = TimeGrid(np.array([0.0, 1.0, 2.0]))
    assert variation(GridPath(grid, [0.0, 1.0, 0.0]), 0.0, 2.0) == 2.0
    assert variation(GridPath.constant(grid, 3.0), 0.0, 2.0) == 0.0
    assert variation(GridPath(grid, [0.0, 1.0, 0.0]), 0.0, 1.0) == 1.0


def test_variation_errors():
    grid = TimeGrid(np.array([0.0, 1.0, 2.0]))
    with pytest.raises(PathDomainError):
        variation(GridPath(grid, [0.0, 1.0, 0.0]), 1.5, 1.0)
    with pytest.raises(PathDomainError):
        variation(GridPath(grid, [0.0, math.inf, 0.0]), 0.0, 2.0)


def test_variation_is_additive():
    """V(0, u) + V(u, T) = V(0, T) at grid points u."""
    rng = np.random.default_rng(4)
    grid = TimeGrid.uniform(1.0, 64)
    path = GridPath(grid, np.cumsum(rng.normal(size=65)))
    u = float(grid.points[20])
    whole = variation(path, 0.0, 1.0)
    assert variation(path, 0.0, u) + variation(path, u, 1.0) == pytest.approx(whole, rel=1e-12)


def test_arithmetic_requires_shared_grid():
    a = GridPath.constant(TimeGrid.uniform(1.0, 4), 1.0)
    b = GridPath.constant(TimeGrid.uniform(1.0, 8), 1.0)
    with pytest.raises(GridMismatchError):
        a + b
    assert np.array_equal((a + 2.0).values, np.full(5, 3.0))
    assert np.array_equal((2.0 - a).values, np.full(5, 1.0))
    assert np.array_equal((-a).values, np.full(5, -1.0))


def test_refine_preserves_evaluation():
    """The refined path agrees with the original at every time."""
    grid = TimeGrid(np.array([0.0, 0.25, 1.0]))
    path = GridPath(grid, [1.0, -2.0, 3.0])
    fine = refine(path, 4)
    assert len(fine) == 9
    for t in np.linspace(0.0, 1.0, 41):
        assert evaluate(fine, t) == evaluate(path, t)
    assert np.array_equal(restrict(fine, grid).values, path.values)


def test_restrict_needs_contained_grid():
    path = GridPath.constant(TimeGrid.uniform(1.0, 4), 0.0)
    with pytest.raises(GridMismatchError):
        restrict(path, TimeGrid.uniform(1.0, 3))


def test_resample_and_align():
    """align puts every path on the union grid with cadlag reads."""
    a = GridPath(TimeGrid(np.array([0.0, 0.5, 1.0])), [0.0, 1.0, 2.0])
    b = GridPath(TimeGrid(np.array([0.0, 0.25, 1.0])), [5.0, 6.0, 7.0])
    a2, b2 = align(a, b)
    assert np.array_equal(a2.points, [0.0, 0.25, 0.5, 1.0])
    assert np.array_equal(a2.values, [0.0, 0.0, 1.0, 2.0])
    assert np.array_equal(b2.values, [5.0, 6.0, 6.0, 7.0])
    assert resample(a, b.grid).values.tolist() == [0.0, 0.0, 2.0]


def test_merge_grids_needs_one_horizon():
    with pytest.raises(GridMismatchError):
        merge_grids(TimeGrid.uniform(1.0, 2), TimeGrid.uniform(2.0, 2))


def test_sup_distance():
    grid = TimeGrid.uniform(1.0, 4)
    a = GridPath(grid, [0.0, 1.0, 2.0, 3.0, 4.0])
    b = GridPath(grid, [0.0, 1.0, 2.5, 3.0, 1.0])
    assert sup_distance(a, b) == 3.0
    assert sup_distance(a, b, 0.5) == 0.5


def test_boundary_order_error_names_time():
    """The first offending time is reported."""
    grid = TimeGrid.uniform(1.0, 4)
    lower = GridPath(grid, [0.0, 0.0, 2.0, 0.0, 3.0])
    upper = GridPath.constant(grid, 1.0)
    with pytest.raises(BoundaryOrderError) as exc:
        BoundaryPair(lower, upper)
    assert exc.value.time == 0.5
    assert "t=0.5" in str(exc.value)


def test_boundary_pair_infinities():
    """-inf lower and +inf upper are allowed; the reverse is not."""
    grid = TimeGrid.uniform(1.0, 2)
    BoundaryPair.constant(grid, -math.inf, math.inf)
    with pytest.raises(BoundaryOrderError):
        BoundaryPair(GridPath.constant(grid, math.inf), GridPath.constant(grid, math.inf))
    pair = BoundaryPair.one_sided(GridPath.constant(grid, 0.0))
    assert pair.min_gap() == math.inf


def test_boundary_pair_negation_and_shift():
    grid = TimeGrid.uniform(1.0, 2)
    pair = BoundaryPair(GridPath(grid, [0.0, -1.0, 0.0]), GridPath(grid, [1.0, 1.0, 2.0]))
    neg = -pair
    assert np.array_equal(neg.lower.values, [-1.0, -1.0, -2.0])
    assert np.array_equal(neg.upper.values, [0.0, 1.0, 0.0])
    assert pair.min_gap() == 1.0
    shifted = pair.shift(0.5)
    assert np.array_equal(shifted.lower.values, [0.5, -0.5, 0.5])
    assert pair.contains(GridPath(grid, [0.5, 0.0, 1.0]))
    assert not pair.contains(GridPath(grid, [0.5, 1.5, 1.0]))
