"""Tests for bridge-refined Brownian paths."""

import numpy as np
import pytest

from skomap.brownian import (
    CUSP_STREAM,
    THORN_X_STREAM,
    bridge_values,
    brownian_at,
    brownian_path,
    level_of,
)
from skomap.errors import PathDomainError


def test_paths_nest_across_levels():
    """Coarse levels are restrictions of finer ones."""
    paths = brownian_path(3, 1.0, 6)
    assert len(paths) == 7
    for coarse, fine in zip(paths, paths[1:]):
        assert len(fine) == 2 * len(coarse) - 1
        assert np.array_equal(fine.values[0::2], coarse.values)
        assert fine.values[0] == 0.0


def test_same_seed_same_path():
    a = bridge_values(9, 2.0, 5)
    b = bridge_values(9, 2.0, 5)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_streams_are_independent():
    a = bridge_values(9, 1.0, 4, CUSP_STREAM)[-1]
    b = bridge_values(9, 1.0, 4, THORN_X_STREAM)[-1]
    assert not np.array_equal(a, b)


def test_deeper_request_keeps_coarse_levels():
    """Asking for more levels does not change the ones already drawn."""
    shallow = brownian_at(4, 1.0, [3, 5])
    deep = brownian_at(4, 1.0, [3, 5, 8])
    assert np.array_equal(shallow[5].values, deep[5].values)
    assert np.array_equal(shallow[3].values, deep[3].values)


def test_increment_variance():
    """Increments at level k have variance T / 2**k."""
    values = np.concatenate([np.diff(bridge_values(s, 2.0, 10)[-1]) for s in range(20)])
    assert values.var() == pytest.approx(2.0 / 1024, rel=0.05)
    assert abs(values.mean()) < 0.01


def test_level_of():
    assert level_of(1024) == 10
    assert level_of(2) == 1
    for bad in (0, 1, 3, 1000):
        with pytest.raises(PathDomainError):
            level_of(bad)


def test_bad_arguments():
    with pytest.raises(PathDomainError):
        bridge_values(0, 0.0, 3)
    with pytest.raises(PathDomainError):
        bridge_values(0, 1.0, -1)
    with pytest.raises(PathDomainError):
        brownian_path(0, 1.0, 0)
