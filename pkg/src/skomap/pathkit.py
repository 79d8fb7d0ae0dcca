"""Time grids and piecewise-constant cadlag paths.

A ``GridPath`` holds one value per grid point and is read with cadlag step
semantics: f(t) = values[k] for the largest k with points[k] <= t. Paths on
[0, infinity) are truncated to [0, horizon]; every statement about a path
is a statement about that window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryOrderError, GridMismatchError, PathDomainError


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing time points starting at 0."""
    points: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 1 or pts.size < 2:
            raise PathDomainError("a time grid needs at least 2 points")
        if np.isnan(pts).any() or not np.isfinite(pts).all():
            raise PathDomainError("grid points must be finite")
        if pts[0] != 0.0:
            raise PathDomainError(f"grid must start at 0, got {pts[0]!r}")
        if not (np.diff(pts) > 0).all():
            raise PathDomainError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, horizon: float, n_intervals: int) -> TimeGrid:
        """Equally spaced grid on [0, horizon] with n_intervals steps."""
        if n_intervals < 1:
            raise PathDomainError("n_intervals must be >= 1")
        pts = np.linspace(0.0, horizon, n_intervals + 1)
        pts[-1] = horizon
        return cls(pts)

    @classmethod
    def dyadic(cls, horizon: float, level: int) -> TimeGrid:
        """Grid with 2**level intervals; level k+1 contains level k."""
        n = 1 << level
        return cls(horizon * (np.arange(n + 1, dtype=np.float64) / n))

    @property
    def horizon(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return self.points.size

    def same_as(self, other: TimeGrid) -> bool:
        return self is other or (
            self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
        )

    def index_at(self, t: float) -> int:
        """Largest k with points[k] <= t."""
        if not 0.0 <= t <= self.horizon:
            raise PathDomainError(f"t={t!r} outside [0, {self.horizon!r}]")
        return int(np.searchsorted(self.points, t, side="right")) - 1

    def index_of(self, t: float) -> int:
        """Index of grid point t; t must be a grid point."""
        k = self.index_at(t)
        if self.points[k] != t:
            raise PathDomainError(f"t={t!r} is not a grid point")
        return k


@dataclass(frozen=True, eq=False)
class GridPath:
    """Piecewise-constant cadlag path sampled on a TimeGrid.

    Values may be +/-inf (boundary paths); NaN is always rejected.
    """
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (len(self.grid),):
            raise PathDomainError(
                f"expected {len(self.grid)} values, got shape {vals.shape}"
            )
        if np.isnan(vals).any():
            k = int(np.flatnonzero(np.isnan(vals))[0])
            raise PathDomainError(f"NaN value at t={self.grid.points[k]!r}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, grid: TimeGrid, value: float) -> GridPath:
        return cls(grid, np.full(len(grid), value, dtype=np.float64))

    @classmethod
    def from_function(cls, grid: TimeGrid, fn) -> GridPath:
        """Sample a vectorized function at the grid points."""
        return cls(grid, np.asarray(fn(grid.points), dtype=np.float64))

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    @property
    def horizon(self) -> float:
        return self.grid.horizon

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def require_finite(self, what: str = "path") -> None:
        if not self.is_finite:
            k = int(np.flatnonzero(~np.isfinite(self.values))[0])
            raise PathDomainError(f"{what} is infinite at t={self.points[k]!r}")

    def eval(self, t: float) -> float:
        """Value at time t under cadlag step semantics."""
        return float(self.values[self.grid.index_at(t)])

    def __len__(self) -> int:
        return self.values.size

    def _other_values(self, other) -> np.ndarray | float:
        if isinstance(other, GridPath):
            if not self.grid.same_as(other.grid):
                raise GridMismatchError("paths live on different grids")
            return other.values
        return float(other)

    def __add__(self, other) -> GridPath:
        return GridPath(self.grid, self.values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other) -> GridPath:
        return GridPath(self.grid, self.values - self._other_values(other))

    def __rsub__(self, other) -> GridPath:
        return GridPath(self.grid, self._other_values(other) - self.values)

    def __neg__(self) -> GridPath:
        return GridPath(self.grid, -self.values)

    def __repr__(self) -> str:
        return f"GridPath(n={len(self)}, horizon={self.horizon!r})"


def evaluate(path: GridPath, t: float) -> float:
    """Value of ``path`` at time t (cadlag step semantics)."""
    return path.eval(t)


def variation(path: GridPath, t1: float, t2: float) -> float:
    """Total variation of the step path on [t1, t2].

    Exact for the piecewise-constant path; a lower bound for any continuous
    path it was sampled from. Only jumps inside (t1, t2] count, so for eta
    on [0, T] the initial projection jump from eta(0-) = 0 to eta(0) is left
    out; EsmSolution.total_push includes it.
    """
    if t1 > t2:
        raise PathDomainError(f"t1={t1!r} > t2={t2!r}")
    i0 = path.grid.index_at(t1)
    i1 = path.grid.index_at(t2)
    seg = path.values[i0:i1 + 1]
    if not np.isfinite(seg).all():
        raise PathDomainError("variation of a path with infinite values")
    return float(np.abs(np.diff(seg)).sum())


def refine(path: GridPath, factor: int) -> GridPath:
    """Insert factor-1 equally spaced points in every interval.

    The refined path evaluates identically to the original at every time.
    """
    if factor < 1:
        raise PathDomainError(f"refinement factor must be >= 1, got {factor}")
    if factor == 1:
        return path
    pts = path.points
    frac = np.arange(factor, dtype=np.float64) / factor
    inner = (pts[:-1, None] + np.diff(pts)[:, None] * frac).ravel()
    new_pts = np.append(inner, pts[-1])
    new_vals = np.append(np.repeat(path.values[:-1], factor), path.values[-1])
    return GridPath(TimeGrid(new_pts), new_vals)


def resample(path: GridPath, grid: TimeGrid) -> GridPath:
    """Read ``path`` at the points of another grid (cadlag semantics)."""
    if grid.horizon > path.horizon:
        raise GridMismatchError(
            f"target horizon {grid.horizon!r} exceeds path horizon {path.horizon!r}"
        )
    idx = np.searchsorted(path.points, grid.points, side="right") - 1
    return GridPath(grid, path.values[idx])


def restrict(path: GridPath, grid: TimeGrid) -> GridPath:
    """Restrict a path to a coarser grid whose points it already contains."""
    idx = np.searchsorted(path.points, grid.points)
    idx = np.minimum(idx, len(path) - 1)
    if not np.array_equal(path.points[idx], grid.points):
        raise GridMismatchError("target grid is not contained in the path grid")
    return GridPath(grid, path.values[idx])


def merge_grids(*grids: TimeGrid) -> TimeGrid:
    """Union of the points of several grids sharing one horizon."""
    horizons = {g.horizon for g in grids}
    if len(horizons) != 1:
        raise GridMismatchError(f"grids have different horizons: {sorted(horizons)}")
    pts = grids[0].points
    for g in grids[1:]:
        pts = np.union1d(pts, g.points)
    return grids[0] if pts.size == len(grids[0]) else TimeGrid(pts)


def align(*paths: GridPath) -> tuple[GridPath, ...]:
    """Put several paths on their merged grid."""
    grid = merge_grids(*(p.grid for p in paths))
    return tuple(p if p.grid.same_as(grid) else resample(p, grid) for p in paths)


def sup_distance(a: GridPath, b: GridPath, T: float = None) -> float:
    """max |a - b| over grid points <= T."""
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("sup_distance needs a shared grid; refine or align first")
    if T is None:
        T = a.horizon
    k = a.grid.index_at(T)
    da, db = a.values[:k + 1], b.values[:k + 1]
    if not (np.isfinite(da).all() and np.isfinite(db).all()):
        raise PathDomainError("sup_distance of paths with infinite values")
    return float(np.abs(da - db).max())


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """A validated time-dependent interval [lower(t), upper(t)].

    lower may be -inf and upper may be +inf (one-sided problems).
    """
    lower: GridPath
    upper: GridPath

    def __post_init__(self):
        if not self.lower.grid.same_as(self.upper.grid):
            raise GridMismatchError("lower and upper boundaries live on different grids")
        lo, hi, pts = self.lower.values, self.upper.values, self.grid.points
        bad = np.flatnonzero((lo > hi) | (lo == np.inf) | (hi == -np.inf))
        if bad.size:
            k = int(bad[0])
            raise BoundaryOrderError(float(pts[k]), float(lo[k]), float(hi[k]))

    @classmethod
    def constant(cls, grid: TimeGrid, lower: float, upper: float) -> BoundaryPair:
        return cls(GridPath.constant(grid, lower), GridPath.constant(grid, upper))

    @classmethod
    def one_sided(cls, lower: GridPath) -> BoundaryPair:
        """[lower(t), +inf)."""
        return cls(lower, GridPath.constant(lower.grid, np.inf))

    @property
    def grid(self) -> TimeGrid:
        return self.lower.grid

    @property
    def width(self) -> np.ndarray:
        return self.upper.values - self.lower.values

    def min_gap(self) -> float:
        """inf over grid points of upper - lower."""
        return float(self.width.min())

    def contains(self, path: GridPath, tol: float = 0.0) -> bool:
        return bool(
            (path.values >= self.lower.values - tol).all()
            and (path.values <= self.upper.values + tol).all()
        )

    def __neg__(self) -> BoundaryPair:
        return BoundaryPair(-self.upper, -self.lower)

    def shift(self, c: float) -> BoundaryPair:
        return BoundaryPair(self.lower + c, self.upper + c)

    def resampled(self, grid: TimeGrid) -> BoundaryPair:
        return BoundaryPair(resample(self.lower, grid), resample(self.upper, grid))
