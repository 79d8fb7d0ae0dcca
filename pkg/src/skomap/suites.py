"""Randomized verification suites.

Each suite maps a seed to one random instance and checks it, returning a
ConditionReport; ``run_suite`` aggregates a seed range into a SuiteResult.

Instances are piecewise-constant paths on uniform grids of 16 to 256 points
with N(0, 1) increments and boundary gaps drawn from [0.1, 2]. All values
are rounded to multiples of 2**-8 so that shifts and sums of them are exact
in floating point.
"""

import logging
from functools import partial

import numpy as np

from . import esm
from .comparison import (
    ComparisonInstance,
    check_constraining_monotonicity,
    check_domain_monotonicity,
    check_input_monotonicity,
)
from .errors import SkomapError
from .pathkit import BoundaryPair, GridPath, TimeGrid, refine, restrict
from .report import ConditionReport, SuiteResult
from .runner import run_tasks

logger = logging.getLogger(__name__)

LATTICE = 256.0


def quantize(x) -> np.ndarray:
    """Round to the nearest multiple of 2**-8."""
    return np.round(np.asarray(x, dtype=np.float64) * LATTICE) / LATTICE


def random_grid(rng: np.random.Generator) -> TimeGrid:
    n = int(rng.integers(16, 257))
    return TimeGrid.uniform(1.0, n - 1)


def random_path(rng: np.random.Generator, grid: TimeGrid, scale: float = 1.0) -> GridPath:
    return GridPath(grid, quantize(np.cumsum(rng.normal(scale=scale, size=len(grid)))))


def random_bounds(rng: np.random.Generator, grid: TimeGrid, pinch: float = 0.0) -> BoundaryPair:
    """Boundaries around a slow random center with gaps in [0.1, 2].

    With ``pinch`` > 0 that fraction of grid points gets a zero gap.
    """
    n = len(grid)
    center = np.cumsum(rng.normal(scale=0.5, size=n))
    gap = quantize(rng.uniform(0.1, 2.0, size=n))
    if pinch > 0:
        gap[rng.random(n) < pinch] = 0.0
    lower = quantize(center - gap / 2)
    return BoundaryPair(GridPath(grid, lower), GridPath(grid, lower + gap))


def random_instance(seed: int, pinch: float = 0.0) -> tuple[GridPath, BoundaryPair]:
    rng = np.random.default_rng(seed)
    grid = random_grid(rng)
    psi = random_path(rng, grid)
    return psi, random_bounds(rng, grid, pinch)


def domain_instance(seed: int) -> ComparisonInstance:
    """A domain pair [l~, r~] containing [l, r]; the nesting pattern cycles with the seed."""
    psi, bounds = random_instance(seed)
    rng = np.random.default_rng([seed, 1])
    n = len(psi)
    lower, upper = bounds.lower.values, bounds.upper.values
    variant = seed % 4
    if variant == 0:
        tilde = bounds
    elif variant == 1:
        tilde = BoundaryPair(bounds.lower, bounds.upper + 1.0)
    elif variant == 2:
        tilde = BoundaryPair(bounds.lower - 1.0, bounds.upper + 1.0)
    else:
        wide_upper = upper + quantize(rng.uniform(0.0, 1.0, size=n))
        wide_upper[rng.random(n) < 0.1] = np.inf
        tilde = BoundaryPair(
            GridPath(psi.grid, lower - quantize(rng.uniform(0.0, 1.0, size=n))),
            GridPath(psi.grid, wide_upper),
        )
    return ComparisonInstance(psi=psi, bounds=bounds, bounds_tilde=tilde)


def input_instance(seed: int) -> ComparisonInstance:
    """psi = psi' + nu with nu non-decreasing from 0, plus offsets c0, c0'."""
    psi_prime, bounds = random_instance(seed)
    rng = np.random.default_rng([seed, 2])
    grid = psi_prime.grid
    n = len(grid)
    variant = seed % 4
    if variant == 0:
        steps = quantize(np.abs(rng.normal(size=n)) * (rng.random(n) < 0.3))
        steps[0] = 0.0
        nu = np.cumsum(steps)
        c0, c0_prime = quantize(rng.uniform(-1.0, 1.0, size=2)).tolist()
    elif variant == 1:
        nu, c0, c0_prime = np.zeros(n), 1.0, 0.0
    elif variant == 2:
        nu = quantize(grid.points)
        c0 = c0_prime = float(quantize(rng.uniform(-1.0, 1.0)))
    else:
        nu, c0 = np.zeros(n), float(quantize(rng.uniform(-1.0, 1.0)))
        c0_prime = c0 + 0.5
    nu_path = GridPath(grid, nu)
    return ComparisonInstance(
        psi=psi_prime + nu_path,
        psi_prime=psi_prime,
        c0=c0,
        c0_prime=c0_prime,
        nu=nu_path,
        bounds=bounds,
    )


def _deviation(a: np.ndarray, b: np.ndarray, points: np.ndarray) -> tuple[float, float | None]:
    diff = np.abs(a - b)
    k = int(np.argmax(diff))
    return float(diff[k]), (float(points[k]) if diff[k] > 0 else None)


def check_esp(seed: int, tol: float) -> ConditionReport:
    psi, bounds = random_instance(seed, pinch=0.1 if seed % 4 == 0 else 0.0)
    return esm.verify_esp(esm.esm_solve(psi, bounds), psi, bounds, tol)


def check_sp(seed: int, tol: float) -> ConditionReport:
    psi, bounds = random_instance(seed)
    return esm.verify_sp_complementarity(esm.esm_solve(psi, bounds), bounds, tol)


def check_oracle(seed: int, tol: float) -> ConditionReport:
    psi, bounds = random_instance(seed, pinch=0.1 if seed % 4 == 0 else 0.0)
    if seed % 5 == 1:
        bounds = BoundaryPair.one_sided(bounds.lower)
    fast = esm.xi_recursive(psi, bounds)
    slow = esm.xi_direct_path(psi, bounds)
    return ConditionReport.from_violations(
        {"xi_deviation": _deviation(fast.values, slow.values, psi.points)}, tol
    )


def check_one_sided(seed: int, tol: float) -> ConditionReport:
    psi, bounds = random_instance(seed)
    sol = esm.esm_solve(psi, BoundaryPair.one_sided(bounds.lower))
    ref = esm.gamma_lower(psi, bounds.lower)
    return ConditionReport.from_violations(
        {"gamma_lower_deviation": _deviation(sol.phi.values, ref.values, psi.points)}, tol
    )


def check_symmetry(seed: int, tol: float) -> ConditionReport:
    psi, bounds = random_instance(seed)
    shift = float(quantize(np.random.default_rng([seed, 3]).uniform(-4.0, 4.0)))
    pts = psi.points
    sol = esm.esm_solve(psi, bounds)
    shifted = esm.esm_solve(psi + shift, bounds.shift(shift))
    mirrored = esm.esm_solve(-psi, -bounds)
    return ConditionReport.from_violations(
        {
            "shift": _deviation(shifted.phi.values, sol.phi.values + shift, pts),
            "negation": _deviation(mirrored.phi.values, -sol.phi.values, pts),
            "negation_swaps_eta": _deviation(mirrored.eta_l.values, sol.eta_r.values, pts),
        },
        tol,
        detail={"shift_constant": shift},
    )


def check_refinement(seed: int, tol: float) -> ConditionReport:
    psi, bounds = random_instance(seed)
    factor = 2 + seed % 3
    fine_bounds = BoundaryPair(refine(bounds.lower, factor), refine(bounds.upper, factor))
    fine = esm.esm_solve(refine(psi, factor), fine_bounds)
    coarse = esm.esm_solve(psi, bounds)
    return ConditionReport.from_violations(
        {
            "phi": _deviation(restrict(fine.phi, psi.grid).values, coarse.phi.values, psi.points),
            "eta": _deviation(restrict(fine.eta, psi.grid).values, coarse.eta.values, psi.points),
        },
        tol,
        detail={"factor": factor},
    )


def check_mono_domain(seed: int, tol: float) -> ConditionReport:
    return check_domain_monotonicity(domain_instance(seed), tol)


def check_mono_input(seed: int, tol: float) -> ConditionReport:
    return check_input_monotonicity(input_instance(seed), tol)


def check_mono_constraint(seed: int, tol: float) -> ConditionReport:
    return check_constraining_monotonicity(input_instance(seed), tol)


# name -> (check, default tolerance)
SUITES = {
    "esp": (check_esp, 1e-9),
    "sp": (check_sp, 1e-9),
    "oracle": (check_oracle, 1e-12),
    "mono-domain": (check_mono_domain, 1e-9),
    "mono-input": (check_mono_input, 1e-9),
    "mono-constraint": (check_mono_constraint, 1e-9),
    "one-sided": (check_one_sided, 0.0),
    "symmetry": (check_symmetry, 0.0),
    "refinement": (check_refinement, 0.0),
}


def check_seed(suite: str, tol: float, seed: int) -> ConditionReport:
    """Run one suite instance; errors become a failed report."""
    check, _ = SUITES[suite]
    try:
        return check(seed, tol)
    except SkomapError as e:
        logger.warning("%s seed %d raised %s: %s", suite, seed, type(e).__name__, e)
        return ConditionReport(passed=False, worst_violation=float("inf"), tol=tol,
                               notes=[f"{type(e).__name__}: {e}"])


def run_suite(suite: str, seeds: list[int], tol: float | None = None,
              threads: int = 1) -> SuiteResult:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if tol is None:
        tol = SUITES[suite][1]
    reports = run_tasks(partial(check_seed, suite, tol), seeds, threads)
    result = SuiteResult(suite=suite, seeds=list(seeds), tol=tol)
    for seed, report in zip(seeds, reports):
        logger.debug("%s seed %d: worst %.3g", suite, seed, report.worst_violation)
        result.add(seed, report)
    logger.info("%s: %d/%d passed, worst %.3g (seed %s)", suite,
                len(seeds) - len(result.failures), len(seeds),
                result.worst_violation, result.worst_seed)
    return result
