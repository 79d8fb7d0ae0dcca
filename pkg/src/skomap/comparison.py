"""Comparison checks for constraining processes.

Three families of inequalities between two solves:

- domain monotonicity: a larger interval never needs more pushing;
- input monotonicity: perturbing the input by a non-decreasing nu and the
  starting offset moves phi and eta by bounded amounts;
- constraining monotonicity: the same bounds for eta_l and eta_r separately,
  valid when the boundaries stay apart.

Hypotheses are validated first and raise HypothesisError, so a check never
passes vacuously.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisError
from .esm import EsmSolution, esm_solve
from .pathkit import BoundaryPair, GridPath
from .report import ConditionReport

logger = logging.getLogger(__name__)


def _pos(x: float) -> float:
    return max(x, 0.0)


@dataclass(frozen=True, eq=False)
class ComparisonInstance:
    """Inputs for one comparison.

    psi = psi_prime + nu when nu is given; bounds_tilde is the second domain
    for domain comparisons.
    """
    psi: GridPath
    bounds: BoundaryPair
    psi_prime: GridPath | None = None
    c0: float = 0.0
    c0_prime: float = 0.0
    nu: GridPath | None = None
    bounds_tilde: BoundaryPair | None = None

    def negated(self) -> "ComparisonInstance":
        """Mirror image under x -> -x (for the domain comparison)."""
        return ComparisonInstance(
            psi=-self.psi,
            bounds=-self.bounds,
            bounds_tilde=-self.bounds_tilde if self.bounds_tilde is not None else None,
        )


def _violation(excess: np.ndarray, points: np.ndarray) -> tuple[float, float | None]:
    excess = np.maximum(excess, 0.0)
    k = int(np.argmax(excess))
    v = float(excess[k])
    return (v, float(points[k])) if v > 0 else (0.0, None)


def _require_separated(bounds: BoundaryPair, what: str = "bounds") -> None:
    gap = bounds.min_gap()
    if not gap > 0:
        raise HypothesisError(f"{what} must stay separated: inf(upper - lower) = {gap!r}")


def _require_nu(inst: ComparisonInstance, tol: float) -> GridPath:
    if inst.psi_prime is None or inst.nu is None:
        raise HypothesisError("input comparisons need psi_prime and nu")
    nu = inst.nu.values
    if nu[0] != 0.0:
        raise HypothesisError(f"nu(0) must be 0, got {nu[0]!r}")
    steps = np.diff(nu)
    if (steps < 0).any():
        k = int(np.flatnonzero(steps < 0)[0]) + 1
        raise HypothesisError(f"nu decreases at t={inst.nu.points[k]!r}")
    gap = np.abs(inst.psi.values - inst.psi_prime.values - nu)
    if gap.max() > tol:
        k = int(np.argmax(gap))
        raise HypothesisError(f"psi != psi_prime + nu at t={inst.psi.points[k]!r}")
    return inst.nu


def _solve_pair(inst: ComparisonInstance) -> tuple[EsmSolution, EsmSolution]:
    sol = esm_solve(inst.psi + inst.c0, inst.bounds)
    sol_prime = esm_solve(inst.psi_prime + inst.c0_prime, inst.bounds)
    return sol, sol_prime


def check_domain_monotonicity(inst: ComparisonInstance, tol: float = 1e-9) -> ConditionReport:
    """eta_l >= eta_l~ and eta_r >= eta_r~ for the nested domain [l~, r~]."""
    tilde = inst.bounds_tilde
    if tilde is None:
        raise HypothesisError("domain comparison needs bounds_tilde")
    if not tilde.grid.same_as(inst.bounds.grid):
        raise HypothesisError("bounds and bounds_tilde must share a grid")
    lo, hi = inst.bounds.lower.values, inst.bounds.upper.values
    if (tilde.lower.values > lo).any():
        raise HypothesisError("lower~ must lie below lower")
    if (tilde.upper.values < hi).any():
        raise HypothesisError("upper~ must lie above upper")
    _require_separated(inst.bounds)

    pts = inst.bounds.grid.points
    sol = esm_solve(inst.psi, inst.bounds)
    wide = esm_solve(inst.psi, tilde)
    return ConditionReport.from_violations(
        {
            "eta_l": _violation(wide.eta_l.values - sol.eta_l.values, pts),
            "eta_r": _violation(wide.eta_r.values - sol.eta_r.values, pts),
        },
        tol,
    )


def check_input_monotonicity(inst: ComparisonInstance, tol: float = 1e-9) -> ConditionReport:
    """Bounds on phi' - phi and eta' - eta for psi = psi' + nu with offsets c0, c0'."""
    nu = _require_nu(inst, tol).values
    sol, sol_prime = _solve_pair(inst)
    pts = inst.bounds.grid.points
    width = inst.bounds.width
    up = _pos(inst.c0_prime - inst.c0)
    down = _pos(inst.c0 - inst.c0_prime)

    d_phi = sol_prime.phi.values - sol.phi.values
    eta, eta_p = sol.eta.values, sol_prime.eta.values
    floor = np.maximum(-down - nu, -width)
    ceiling = np.minimum(up, width)
    return ConditionReport.from_violations(
        {
            "phi_lower": _violation(floor - d_phi, pts),
            "phi_upper": _violation(d_phi - ceiling, pts),
            "eta_lower": _violation((eta - up) - eta_p, pts),
            "eta_upper": _violation(eta_p - (eta + nu + down), pts),
        },
        tol,
    )


def check_constraining_monotonicity(inst: ComparisonInstance, tol: float = 1e-9) -> ConditionReport:
    """Bounds on eta_l', eta_r against eta_l, eta_r' (separated boundaries)."""
    nu = _require_nu(inst, tol).values
    _require_separated(inst.bounds)
    if inst.psi.values[0] != inst.psi_prime.values[0]:
        raise HypothesisError("psi(0) must equal psi_prime(0)")
    sol, sol_prime = _solve_pair(inst)
    pts = inst.bounds.grid.points
    up = _pos(inst.c0_prime - inst.c0)
    down = _pos(inst.c0 - inst.c0_prime)

    el, el_p = sol.eta_l.values, sol_prime.eta_l.values
    er, er_p = sol.eta_r.values, sol_prime.eta_r.values
    return ConditionReport.from_violations(
        {
            "eta_l_lower": _violation((el - up) - el_p, pts),
            "eta_l_upper": _violation(el_p - (el + nu + down), pts),
            "eta_r_lower": _violation((er_p - up) - er, pts),
            "eta_r_upper": _violation(er - (er_p + nu + down), pts),
        },
        tol,
    )
