"""Two-dimensional reflected Brownian motion in a thorn domain.

The domain is {(x, y): y >= 0, L(y) <= x <= R(y)} with R - L = y**gamma
near the tip. The vertical coordinate Z2 is Brownian motion reflected at 0;
the horizontal coordinate Z1 is the extended Skorokhod map of an
independent Brownian motion between the moving walls L(Z2(t)) and
R(Z2(t)). Y = Z1 - x0 - B1 is the horizontal local time.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .brownian import THORN_X_STREAM, THORN_Y_STREAM, bridge_values, level_of
from .errors import PathDomainError
from .esm import EsmSolution, esm_solve, gamma_zero
from .pathkit import BoundaryPair, GridPath, TimeGrid, variation
from .report import VariationReport
from .runner import run_tasks
from .trend import Thresholds, summarize

logger = logging.getLogger(__name__)

THRESHOLD_FACTOR = 2.0


@dataclass(frozen=True)
class ThornSpec:
    """Width profile R(y) - L(y) of a symmetric thorn.

    width(y) = base_width + y**gamma for y <= epsilon, continued linearly
    beyond epsilon with slope min(gamma * epsilon**(gamma - 1), slope_cap).
    ``lipschitz`` asserts L and R are Lipschitz, which y**gamma only is for
    gamma >= 1.
    """
    gamma: float
    epsilon: float = 1.0
    base_width: float = 0.0
    slope_cap: float = 1.0
    lipschitz: bool = True

    def __post_init__(self):
        if not self.gamma > 0:
            raise PathDomainError(f"gamma must be positive, got {self.gamma!r}")
        if not self.epsilon > 0:
            raise PathDomainError(f"epsilon must be positive, got {self.epsilon!r}")
        if self.base_width < 0 or self.slope_cap < 0:
            raise PathDomainError("base_width and slope_cap must be non-negative")
        if self.lipschitz and self.gamma < 1:
            raise PathDomainError(f"y**{self.gamma} is not Lipschitz at 0; set lipschitz=False")

    @property
    def slope(self) -> float:
        return min(self.gamma * self.epsilon ** (self.gamma - 1.0), self.slope_cap)

    @property
    def label(self) -> str:
        return f"gamma={self.gamma:g}" + (f" base={self.base_width:g}" if self.base_width else "")

    def width(self, y) -> np.ndarray:
        y = np.maximum(np.asarray(y, dtype=np.float64), 0.0)
        near = self.base_width + np.minimum(y, self.epsilon) ** self.gamma
        return near + self.slope * np.maximum(y - self.epsilon, 0.0)

    def left(self, y) -> np.ndarray:
        return -0.5 * self.width(y)

    def right(self, y) -> np.ndarray:
        return 0.5 * self.width(y)

    def classifiable(self) -> bool:
        """Whether a per-excursion verdict is meaningful for this profile."""
        if self.base_width > 0 or self.gamma == 2:
            return False
        return self.gamma > 2 or self.lipschitz

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "epsilon": self.epsilon, "base_width": self.base_width,
                "slope_cap": self.slope_cap, "lipschitz": self.lipschitz}


@dataclass(frozen=True, eq=False)
class ThornSample:
    b1: GridPath
    b2: GridPath
    z1: GridPath
    z2: GridPath
    y: GridPath
    solution: EsmSolution


@dataclass(frozen=True)
class ExcursionRecord:
    """An excursion of Z2 above the detection threshold."""
    start: float
    end: float
    start_index: int
    end_index: int
    max_height: float
    variation: float | None = None

    def contains(self, t: float) -> bool:
        return self.start <= t <= self.end


def walls(spec: ThornSpec, z2: GridPath) -> BoundaryPair:
    """Time-dependent interval [L(Z2(t)), R(Z2(t))]."""
    return BoundaryPair(GridPath(z2.grid, spec.left(z2.values)),
                        GridPath(z2.grid, spec.right(z2.values)))


def solve_horizontal(spec: ThornSpec, z2: GridPath, b1: GridPath, x0: float = 0.0) -> EsmSolution:
    return esm_solve(b1 + x0, walls(spec, z2))


def sample_from_paths(spec: ThornSpec, b1: GridPath, b2: GridPath,
                      x0: float = 0.0, y0: float = 0.0) -> ThornSample:
    z2 = gamma_zero(b2 + y0)
    sol = solve_horizontal(spec, z2, b1, x0)
    return ThornSample(b1, b2, sol.phi, z2, sol.eta, sol)


def _pair(seed: int, T: float, levels: list[int]) -> dict[int, tuple[GridPath, GridPath]]:
    top = max(levels)
    x = bridge_values(seed, T, top, THORN_X_STREAM)
    y = bridge_values(seed, T, top, THORN_Y_STREAM)
    out = {}
    for k in levels:
        grid = TimeGrid.dyadic(T, k)
        out[k] = (GridPath(grid, x[k]), GridPath(grid, y[k]))
    return out


def simulate_thorn(spec: ThornSpec, seed: int, T: float = 1.0,
                   resolution: int = 1024) -> ThornSample:
    """Z = (Z1, Z2) started at the tip, on ``resolution`` dyadic intervals of [0, T]."""
    level = level_of(resolution)
    b1, b2 = _pair(seed, T, [level])[level]
    return sample_from_paths(spec, b1, b2)


def default_threshold(grid: TimeGrid, factor: float = THRESHOLD_FACTOR) -> float:
    """factor * sqrt(mean grid step)."""
    return factor * math.sqrt(grid.horizon / (len(grid) - 1))


def detect_excursions(z2: GridPath, eps_threshold: float | None = None,
                      y: GridPath | None = None) -> list[ExcursionRecord]:
    """Completed excursions of Z2 above eps_threshold.

    Each maximal run of grid points with Z2 > eps is widened to the
    neighbouring points where Z2 <= eps. Runs touching either end of the
    horizon are not complete and are dropped. With ``y`` given, each
    record carries variation(y) over its interval.
    """
    if eps_threshold is None:
        eps_threshold = default_threshold(z2.grid)
    if not eps_threshold > 0:
        raise PathDomainError(f"threshold must be positive, got {eps_threshold!r}")
    vals = z2.values
    above = np.concatenate(([False], vals > eps_threshold, [False]))
    edges = np.flatnonzero(np.diff(above.astype(np.int8)))
    starts, stops = edges[0::2], edges[1::2] - 1
    records = []
    n = vals.size
    pts = z2.points
    for first, last in zip(starts.tolist(), stops.tolist()):
        if first == 0 or last == n - 1:
            continue
        i0, i1 = first - 1, last + 1
        v = None
        if y is not None:
            v = float(np.abs(np.diff(y.values[i0:i1 + 1])).sum())
        records.append(ExcursionRecord(
            start=float(pts[i0]), end=float(pts[i1]), start_index=i0, end_index=i1,
            max_height=float(vals[first:last + 1].max()), variation=v,
        ))
    return records


def _excursion_seed(task) -> tuple[list[float], list[tuple[float, float, float]]] | None:
    spec, seed, T, levels, factor = task
    paths = _pair(seed, T, levels)
    samples = [sample_from_paths(spec, *paths[k]) for k in levels]
    coarse = samples[0]
    found = detect_excursions(coarse.z2, default_threshold(coarse.z2.grid, factor))
    if not found:
        return None
    tallest = max(found, key=lambda e: e.max_height)
    t1, t2 = tallest.start, tallest.end

    estimates, intervals = [], []
    for s in samples:
        i0, i1 = s.z2.grid.index_at(t1), s.z2.grid.index_at(t2)
        estimates.append(variation(s.y, t1, t2))
        intervals.append((t1, t2, float(s.z2.values[i0:i1 + 1].max())))
    return estimates, intervals


def excursion_variation_experiment(specs: list[ThornSpec], resolutions: list[int],
                                   seeds: list[int], T: float = 1.0,
                                   thresholds: Thresholds = Thresholds(),
                                   threshold_factor: float = THRESHOLD_FACTOR,
                                   threads: int = 1) -> VariationReport:
    """Variation of Y over one fixed excursion window, tracked across resolutions.

    The window [t1, t2] is the tallest completed excursion of Z2 at the
    coarsest resolution, detected with that level's threshold. Dyadic grids
    are nested, so t1 and t2 are grid points at every finer level and the
    same window is measured throughout. Seeds with no completed excursion
    at the coarsest level are skipped and counted.
    """
    levels = [level_of(r) for r in resolutions]
    if levels != sorted(set(levels)):
        raise PathDomainError("resolutions must be strictly increasing")
    report = VariationReport(
        experiment="thorn-excursion",
        thresholds=thresholds.to_dict(),
        settings={"T": T, "resolutions": list(resolutions), "seeds": len(seeds),
                  "threshold_factor": threshold_factor, "specs": [s.to_dict() for s in specs]},
    )
    for spec in specs:
        logger.info("thorn excursions %s: %d seeds", spec.label, len(seeds))
        results = run_tasks(_excursion_seed, [(spec, s, T, levels, threshold_factor) for s in seeds],
                            threads)
        used, skipped, columns, spans = [], [], [], []
        for seed, res in zip(seeds, results):
            if res is None:
                skipped.append(seed)
                continue
            used.append(seed)
            columns.append(res[0])
            spans.append(res[1])
        if skipped:
            logger.warning("%s: skipped %d seeds without a completed excursion", spec.label, len(skipped))
        series = summarize(spec.label, spec.gamma, resolutions, used,
                           [list(r) for r in zip(*columns)] if columns else [[] for _ in levels],
                           thresholds, skipped, classify_verdict=spec.classifiable())
        series.intervals = [list(r) for r in zip(*spans)] if spans else None
        if not spec.classifiable():
            series.notes.append("profile outside both finite and infinite variation regimes")
        report.series.append(series)
    return report


def _horizon_seed(task) -> list[float]:
    spec, seed, T, levels = task
    paths = _pair(seed, T, levels)
    return [variation(sample_from_paths(spec, *paths[k]).y, 0.0, T) for k in levels]


def semimartingale_experiment(specs: list[ThornSpec], resolutions: list[int], seeds: list[int],
                              T: float = 1.0, thresholds: Thresholds = Thresholds(),
                              threads: int = 1) -> VariationReport:
    """variation(Y, 0, T) over the whole horizon, every excursion included."""
    levels = [level_of(r) for r in resolutions]
    report = VariationReport(
        experiment="thorn-horizon",
        thresholds=thresholds.to_dict(),
        settings={"T": T, "resolutions": list(resolutions), "seeds": len(seeds),
                  "specs": [s.to_dict() for s in specs]},
    )
    for spec in specs:
        logger.info("thorn horizon %s: %d seeds", spec.label, len(seeds))
        per_seed = run_tasks(_horizon_seed, [(spec, s, T, levels) for s in seeds], threads)
        estimates = [list(col) for col in zip(*per_seed)]
        report.series.append(summarize(spec.label, spec.gamma, resolutions, seeds,
                                       estimates, thresholds))
    return report
