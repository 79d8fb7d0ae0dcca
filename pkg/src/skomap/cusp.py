"""Reflected Brownian motion between boundaries that pinch together.

Boundary families are power-law cusps at a pinch time tau. The module builds
the comb and box sequences used to bound the local time from below and
above, checks their hypotheses, and runs variation-vs-resolution
experiments on bridge-refined Brownian paths.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from .brownian import CUSP_STREAM, brownian_at, level_of
from .errors import HypothesisError, PathDomainError
from .esm import EsmSolution, esm_solve
from .pathkit import BoundaryPair, GridPath, TimeGrid, variation
from .report import ConditionReport, VariationReport
from .runner import run_tasks
from .trend import Thresholds, summarize

logger = logging.getLogger(__name__)

KINDS = ("closing_cusp", "opening_cusp", "symmetric_cusp", "constant_gap", "custom")

MAX_POINTS = 10**6
MIN_STEP = 2.0**-40
CAUCHY_TOL = 1e-6
BOX_SAMPLES = 5


@dataclass(frozen=True)
class BoundarySpec:
    """A boundary family on [0, tau].

    closing_cusp:   width (tau - t)**alpha, pinched at tau
    opening_cusp:   width t**alpha, pinched at 0
    symmetric_cusp: -lower = upper = min(t, tau - t)**alpha, pinched at both ends
    constant_gap:   width ``gap``
    custom:         ``lower_fn`` / ``upper_fn`` (vectorized callables)

    Widths are multiplied by ``scale`` (except constant_gap) and centered
    on ``center``.
    """
    kind: str
    alpha: float = 1.0
    tau: float = 1.0
    scale: float = 1.0
    gap: float = 1.0
    center: float = 0.0
    lower_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    upper_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PathDomainError(f"unknown boundary kind {self.kind!r}")
        if not self.alpha > 0:
            raise PathDomainError(f"alpha must be positive, got {self.alpha!r}")
        if not self.tau > 0:
            raise PathDomainError(f"tau must be positive, got {self.tau!r}")
        if self.kind == "constant_gap" and not self.gap > 0:
            raise PathDomainError(f"gap must be positive, got {self.gap!r}")
        if self.kind == "custom" and (self.lower_fn is None or self.upper_fn is None):
            raise PathDomainError("custom boundaries need lower_fn and upper_fn")

    def _half_width(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "symmetric_cusp":
            return self.scale * np.maximum(np.minimum(t, self.tau - t), 0.0) ** self.alpha
        if self.kind == "closing_cusp":
            return 0.5 * self.scale * np.maximum(self.tau - t, 0.0) ** self.alpha
        if self.kind == "opening_cusp":
            return 0.5 * self.scale * np.maximum(t, 0.0) ** self.alpha
        return np.full_like(t, 0.5 * self.gap)

    def lower(self, t) -> np.ndarray:
        if self.kind == "custom":
            return np.asarray(self.lower_fn(np.asarray(t, dtype=np.float64)), dtype=np.float64)
        return self.center - self._half_width(t)

    def upper(self, t) -> np.ndarray:
        if self.kind == "custom":
            return np.asarray(self.upper_fn(np.asarray(t, dtype=np.float64)), dtype=np.float64)
        return self.center + self._half_width(t)

    def width(self, t) -> np.ndarray:
        """r(t) - l(t)."""
        return self.upper(t) - self.lower(t)

    def pinched_at_start(self) -> bool:
        return float(self.width(0.0)) == 0.0

    def pinched_at_end(self) -> bool:
        return float(self.width(self.tau)) == 0.0

    def pinches(self) -> list[float]:
        out = []
        if self.pinched_at_start():
            out.append(0.0)
        if self.pinched_at_end():
            out.append(self.tau)
        return out

    def bounds(self, grid: TimeGrid) -> BoundaryPair:
        return BoundaryPair(
            GridPath(grid, self.lower(grid.points)),
            GridPath(grid, self.upper(grid.points)),
        )

    def with_alpha(self, alpha: float) -> "BoundarySpec":
        return replace(self, alpha=float(alpha))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "alpha": self.alpha, "tau": self.tau,
                "scale": self.scale, "gap": self.gap, "center": self.center}


@dataclass(frozen=True, eq=False)
class CombSequence:
    """Strictly increasing times in [0, tau] plus how they were built."""
    s: np.ndarray
    construction: str
    truncated: bool = False
    reason: str | None = None

    def __post_init__(self):
        s = np.array(self.s, dtype=np.float64)
        if s.ndim != 1 or s.size < 2:
            raise PathDomainError("a sequence needs at least 2 points")
        if not (np.diff(s) > 0).all():
            raise PathDomainError("sequence must be strictly increasing")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    def __len__(self) -> int:
        return self.s.size

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.s)

    def levels(self, pinches: list[float]) -> np.ndarray:
        """Dyadic level of each interval.

        A point at distance d from the nearest pinch has level j when
        2**-j <= d < 2**-(j-1); an interval takes the deeper level of its
        two endpoints. Without pinches every interval is level 0.
        """
        if not pinches:
            return np.zeros(self.s.size - 1, dtype=np.int64)
        dist = np.min(np.abs(self.s[:, None] - np.asarray(pinches)[None, :]), axis=1)
        with np.errstate(divide="ignore"):
            point_level = np.ceil(-np.log2(np.where(dist > 0, dist, np.finfo(float).tiny)))
        point_level = np.maximum(point_level, 0).astype(np.int64)
        return np.maximum(point_level[:-1], point_level[1:])


def _first_level(tau: float) -> int:
    """Smallest j with 2**-j < tau / 4."""
    j = max(0, math.floor(math.log2(4.0 / tau)))
    while 2.0**-j >= tau / 4.0:
        j += 1
    while j > 0 and 2.0 ** -(j - 1) < tau / 4.0:
        j -= 1
    return j


def _dyadic_family(width_at: Callable[[float], float], tau: float, max_points: int,
                   min_step: float) -> tuple[np.ndarray, bool, str | None]:
    """Distances d = 2**-j + m * f(2**-j)**2 from a pinch, m = 0..floor(2**-j / f**2), j > j1.

    A level's last point is dropped when it lands within half a step of
    2**-(j-1). Returns (distances, truncated, reason).
    """
    j = _first_level(tau) + 1
    chunks: list[np.ndarray] = []
    total = 0
    truncated, reason = False, None
    while True:
        base = 2.0**-j
        step = float(width_at(base)) ** 2
        if step < min_step or base < min_step:
            truncated, reason = True, ("zero step" if step == 0 else "step floor")
            break
        count = int(math.floor(base / step)) + 1
        if total + count > max_points:
            count = max_points - total
            truncated, reason = True, "point cap"
        pts = base + step * np.arange(count, dtype=np.float64)
        if count > 1 and 2.0 * base - pts[-1] < 0.5 * step:
            pts = pts[:-1]
        pts = pts[pts < 2.0 * base]
        chunks.append(pts)
        total += pts.size
        if truncated:
            break
        j += 1
        if j > 1000:
            truncated, reason = True, "step floor"
            break
    return np.unique(np.concatenate(chunks)) if chunks else np.empty(0), truncated, reason


def _recursion(spec: BoundarySpec, start: float, max_points: int,
               min_step: float) -> tuple[np.ndarray, bool, str | None]:
    """s_{k+1} = s_k + f(s_k)**2, halving the distance to tau at most when tau is a pinch."""
    tau = spec.tau
    guard = spec.pinched_at_end()
    s = [float(start)]
    while len(s) < max_points:
        cur = s[-1]
        step = float(spec.width(cur)) ** 2
        if guard:
            step = min(step, 0.5 * (tau - cur))
        if step <= 0:
            return np.array(s), True, "zero step"
        if step < min_step:
            return np.array(s), True, "step floor"
        nxt = cur + step
        if nxt > tau:
            return np.array(s), False, None
        s.append(nxt)
    return np.array(s), True, "point cap"


def comb_sequence(spec: BoundarySpec, max_points: int = MAX_POINTS,
                  min_step: float = MIN_STEP) -> CombSequence:
    """Lower-bound sequence for the given family.

    closing_cusp and constant_gap: s_0 = 0, s_{k+1} = s_k + f(s_k)**2.
    symmetric_cusp: the same recursion started at the peak tau/2.
    opening_cusp: the dyadic family 2**-j + m f(2**-j)**2 near 0.
    custom: dyadic family if pinched at 0, recursion from 0 otherwise.
    """
    if spec.kind == "opening_cusp" or (spec.kind == "custom" and spec.pinched_at_start()):
        s, truncated, reason = _dyadic_family(spec.width, spec.tau, max_points, min_step)
        construction = "dyadic"
    else:
        start = spec.tau / 2 if spec.kind == "symmetric_cusp" else 0.0
        s, truncated, reason = _recursion(spec, start, max_points, min_step)
        construction = "recursion"
    if truncated:
        logger.warning("comb sequence for %s truncated after %d points (%s)",
                       spec.kind, s.size, reason)
    return CombSequence(s, construction, truncated, reason)


def box_sequence(spec: BoundarySpec, max_points: int = MAX_POINTS,
                 min_step: float = MIN_STEP) -> CombSequence:
    """Upper-bound sequence: a dyadic family at each pinch and one middle interval.

    Near a pinch at 0 the points are 2**-j + m f(2**-j)**2; near a pinch at
    tau they are mirrored, tau - 2**-j - m f(tau - 2**-j)**2. Unpinched ends
    contribute the endpoint itself.
    """
    tau = spec.tau
    pinches = spec.pinches()
    budget = max_points // max(1, len(pinches))
    parts, truncated, reasons = [], False, []
    if spec.pinched_at_start():
        d, cut, why = _dyadic_family(spec.width, tau, budget, min_step)
        parts.append(d)
        truncated |= cut
        reasons.append(why)
    else:
        parts.append(np.array([0.0]))
    if spec.pinched_at_end():
        d, cut, why = _dyadic_family(lambda x: spec.width(tau - x), tau, budget, min_step)
        parts.append(tau - d)
        truncated |= cut
        reasons.append(why)
    else:
        parts.append(np.array([tau]))
    reason = ", ".join(r for r in reasons if r) or None
    if truncated:
        logger.warning("box sequence for %s truncated (%s)", spec.kind, reason)
    return CombSequence(np.unique(np.concatenate(parts)), "boxes", truncated, reason)


def maximal_boxes(spec: BoundarySpec, seq: CombSequence,
                  samples: int = BOX_SAMPLES) -> tuple[np.ndarray, np.ndarray]:
    """(a_k, b_k): the tallest box inside the domain over each [s_k, s_{k+1}].

    a_k is the largest lower boundary value and b_k the smallest upper
    boundary value over ``samples`` equally spaced times in the interval.
    """
    s = seq.s
    frac = np.linspace(0.0, 1.0, samples)
    a = np.empty(s.size - 1)
    b = np.empty(s.size - 1)
    chunk = 1 << 16
    for lo in range(0, s.size - 1, chunk):
        hi = min(lo + chunk, s.size - 1)
        t = s[lo:hi, None] + (s[lo + 1:hi + 1] - s[lo:hi])[:, None] * frac[None, :]
        a[lo:hi] = spec.lower(t).max(axis=1)
        b[lo:hi] = spec.upper(t).min(axis=1)
    return a, b


def series_evidence(terms: np.ndarray, levels: np.ndarray, truncated: bool,
                    cauchy_tol: float = CAUCHY_TOL) -> dict[str, Any]:
    """Convergence verdict for a finite piece of a series.

    An untruncated sequence is a finite sum. Otherwise only complete levels
    are used: a deepest level still carrying at least half of the largest
    level contribution signals divergence; end terms at the deepest level
    below ``cauchy_tol`` (relative to max(1, partial sum)) signal
    convergence.
    """
    total = float(terms.sum())
    out: dict[str, Any] = {"partial_sum": total, "terms": int(terms.size)}
    if not truncated:
        out.update(verdict="converging", cauchy_gap=0.0)
        return out
    per_level = np.bincount(levels, weights=terms)
    present = np.flatnonzero(np.bincount(levels))
    complete = present[:-1]
    out["level_sums"] = {int(j): float(per_level[j]) for j in complete}
    deepest = levels.max()
    ends = [i for i in (0, terms.size - 1) if levels[i] == deepest]
    if ends:
        end = max(float(terms[i]) for i in ends)
    else:
        end = float(terms[levels == deepest].max())
    gap = end / max(1.0, total)
    out["cauchy_gap"] = gap
    if complete.size < 3:
        out["verdict"] = "inconclusive"
        return out
    contributions = per_level[complete]
    if contributions[-1] >= 0.5 * contributions.max():
        out["verdict"] = "diverging"
    elif gap <= cauchy_tol:
        out["verdict"] = "converging"
    else:
        out["verdict"] = "inconclusive"
    return out


def check_comb_conditions(spec: BoundarySpec, seq: CombSequence, c1: float = 1.0,
                          tol: float = 1e-9) -> ConditionReport:
    """Comb hypotheses: the min-gap ratio stays <= c1 and sum sqrt(steps) diverges.

    The report gives the smallest c1 for which the ratio bound holds and
    the partial sum with its per-level growth.
    """
    s = seq.s
    if s[0] < 0 or s[-1] > spec.tau:
        raise HypothesisError(f"sequence leaves [0, {spec.tau!r}]")
    lo, hi = spec.lower(s), spec.upper(s)
    root = np.sqrt(seq.steps)
    ratio = np.minimum(hi[1:] - lo[:-1], -lo[1:] + hi[:-1]) / root
    k = int(np.argmax(ratio))
    c1_needed = float(ratio[k])
    evidence = series_evidence(root, seq.levels(spec.pinches()), seq.truncated)
    violations = {
        "min_ratio": (max(0.0, c1_needed - c1), float(s[k])),
        "roots_diverge": (0.0 if evidence["verdict"] == "diverging" else 1.0, None),
    }
    report = ConditionReport.from_violations(
        violations, tol,
        detail={"c1": c1, "c1_needed": c1_needed, "roots": evidence,
                "points": int(s.size), "truncated": seq.truncated,
                "truncation_reason": seq.reason},
    )
    logger.info("comb %s: c1_needed=%.4g, partial sum %.4g (%s)", spec.kind,
                c1_needed, evidence["partial_sum"], evidence["verdict"])
    return report


def check_box_conditions(spec: BoundarySpec, seq: CombSequence,
                         boxes: tuple[np.ndarray, np.ndarray] | None = None,
                         c1: float = 4.0, tol: float = 1e-9) -> ConditionReport:
    """Box hypotheses: box heights comparable to sqrt(steps), and the sums of
    sqrt(steps), d_k and d'_k all converge."""
    s = seq.s
    a, b = boxes if boxes is not None else maximal_boxes(spec, seq)
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != (s.size - 1,) or b.shape != (s.size - 1,):
        raise HypothesisError("need one box per interval")
    fit_a, fit_b = maximal_boxes(spec, seq)
    outside = (b <= a) | (a < fit_a - 1e-12) | (b > fit_b + 1e-12)
    if outside.any():
        k = int(np.flatnonzero(outside)[0])
        raise HypothesisError(f"box over [{s[k]!r}, {s[k + 1]!r}] is not inside the domain")

    root = np.sqrt(seq.steps)
    height = b - a
    q = height / root
    excess = np.maximum(np.maximum(q - c1, 1.0 / c1 - q), 0.0)
    k = int(np.argmax(excess))
    c1_needed = float(max(q.max(), (1.0 / q).max()))

    mid = 0.5 * (a + b)
    lo, hi = spec.lower(s), spec.upper(s)
    d = np.abs(hi[:-1] - mid) + np.abs(lo[:-1] - mid)
    d_next = np.abs(hi[1:] - mid) + np.abs(lo[1:] - mid)
    levels = seq.levels(spec.pinches())
    sums = {
        "roots": series_evidence(root, levels, seq.truncated),
        "d": series_evidence(d, levels, seq.truncated),
        "d_prime": series_evidence(d_next, levels, seq.truncated),
    }
    violations = {"box_ratio": (float(excess[k]), float(s[k]) if excess[k] > 0 else None)}
    for name, ev in sums.items():
        violations[f"{name}_converge"] = (0.0 if ev["verdict"] == "converging" else 1.0, None)
    report = ConditionReport.from_violations(
        violations, tol,
        detail={"c1": c1, "c1_needed": c1_needed, "sums": sums, "points": int(s.size),
                "truncated": seq.truncated, "truncation_reason": seq.reason},
    )
    logger.info("boxes %s: c1_needed=%.4g, verdicts %s", spec.kind, c1_needed,
                {n: ev["verdict"] for n, ev in sums.items()})
    return report


@dataclass(frozen=True, eq=False)
class RbmSample:
    """One reflected Brownian path: W = phi, Y = W - x0 - B."""
    brownian: GridPath
    bounds: BoundaryPair
    solution: EsmSolution

    @property
    def w(self) -> GridPath:
        return self.solution.phi

    @property
    def y(self) -> GridPath:
        """Y = eta. Reported variations start at eta(0), not at eta(0-) = 0."""
        return self.solution.eta


def start_point(spec: BoundarySpec, x0: float | None) -> float:
    """x0, or the midpoint of [l(0), r(0)] when not given; outside points are projected."""
    lo, hi = float(spec.lower(0.0)), float(spec.upper(0.0))
    if x0 is None:
        return 0.5 * (lo + hi)
    if not lo <= x0 <= hi:
        logger.warning("x0=%r outside [%r, %r]; projecting", x0, lo, hi)
    return float(x0)


def rbm_from_path(x0: float, spec: BoundarySpec, brownian: GridPath) -> RbmSample:
    bounds = spec.bounds(brownian.grid)
    return RbmSample(brownian, bounds, esm_solve(brownian + x0, bounds))


def rbm(x0: float | None, spec: BoundarySpec, seed: int, T: float | None = None,
        resolution: int = 1024) -> RbmSample:
    """RBM on [l, r] from x0 + B, with B at ``resolution`` dyadic intervals of [0, T]."""
    level = level_of(resolution)
    horizon = spec.tau if T is None else T
    path = brownian_at(seed, horizon, [level], CUSP_STREAM)[level]
    return rbm_from_path(start_point(spec, x0), spec, path)


def _cusp_seed(task: tuple[BoundarySpec, float | None, int, list[int]]) -> list[float]:
    spec, x0, seed, levels = task
    paths = brownian_at(seed, spec.tau, levels, CUSP_STREAM)
    x = start_point(spec, x0)
    out = []
    for level in levels:
        sample = rbm_from_path(x, spec, paths[level])
        out.append(variation(sample.y, 0.0, spec.tau))
    logger.debug("seed %d: %s", seed, out)
    return out


def variation_experiment(spec: BoundarySpec, alphas: list[float], resolutions: list[int],
                         seeds: list[int], thresholds: Thresholds = Thresholds(),
                         x0: float | None = None, threads: int = 1) -> VariationReport:
    """variation(Y, 0, tau) per (alpha, resolution, seed) on nested paths, plus verdicts."""
    levels = [level_of(r) for r in resolutions]
    if levels != sorted(set(levels)):
        raise PathDomainError("resolutions must be strictly increasing")
    if len(seeds) < 10:
        logger.warning("only %d seeds; trend verdicts will be noisy", len(seeds))
    report = VariationReport(
        experiment="cusp",
        thresholds=thresholds.to_dict(),
        settings={"spec": spec.to_dict(), "alphas": list(alphas),
                  "resolutions": list(resolutions), "seeds": len(seeds)},
    )
    for alpha in alphas:
        spec_a = spec.with_alpha(alpha)
        logger.info("cusp %s alpha=%g: %d seeds", spec.kind, alpha, len(seeds))
        per_seed = run_tasks(_cusp_seed, [(spec_a, x0, s, levels) for s in seeds], threads)
        estimates = [list(col) for col in zip(*per_seed)]
        series = summarize(f"alpha={alpha:g}", alpha, resolutions, seeds, estimates, thresholds)
        report.series.append(series)
    return report
