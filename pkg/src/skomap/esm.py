"""The extended Skorokhod map on a time-dependent interval [lower, upper].

For an input path psi and boundaries (l, r) the map returns the constrained
path phi = psi - Xi, where

    Xi(t) = max( (psi(0) - r(0))^+ ^ inf_{u<=t} (psi(u) - l(u)),
                 sup_{s<=t} [ (psi(s) - r(s)) ^ inf_{s<=u<=t} (psi(u) - l(u)) ] )

(``^`` is min). On piecewise-constant grid paths Xi obeys the one-step
recursion Xi_k = min(max(Xi_{k-1}, psi_k - r_k), psi_k - l_k) with the
convention Xi_{-1} = 0, which gives an O(n) solver. ``xi_direct`` evaluates
the formula literally and serves as the O(n^2) oracle.

Both evaluations only take minima and maxima of the same floating point
numbers, so they agree bit for bit.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, PathDomainError, SolverConsistencyError
from .pathkit import BoundaryPair, GridPath
from .report import ConditionReport

logger = logging.getLogger(__name__)

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EsmSolution:
    """Output of one solve, all on the input grid.

    phi = psi + eta, eta = eta_l - eta_r, eta_l and eta_r non-decreasing.
    eta_l(0) and eta_r(0) carry the initial jump (eta(0-) is taken as 0).
    """
    phi: GridPath
    eta: GridPath
    eta_l: GridPath
    eta_r: GridPath

    @property
    def grid(self):
        return self.phi.grid

    @property
    def projected_at_zero(self) -> bool:
        return bool(self.eta.values[0] != 0.0)

    def total_push(self) -> float:
        """eta_l(T) + eta_r(T): the variation of eta including the jump at 0."""
        return float(self.eta_l.values[-1] + self.eta_r.values[-1])


def project(x: float, l: float, r: float) -> float:
    """(x ^ r) v l, the nearest point of [l, r] to x."""
    if l > r:
        raise PathDomainError(f"empty interval: l={l!r} > r={r!r}")
    return max(min(x, r), l)


def _operands(psi: GridPath, bounds: BoundaryPair) -> tuple[np.ndarray, np.ndarray]:
    """(psi - l, psi - r) on the shared grid."""
    if not psi.grid.same_as(bounds.grid):
        raise GridMismatchError("psi and the boundaries must share a grid; use pathkit.align")
    psi.require_finite("psi")
    return psi.values - bounds.lower.values, psi.values - bounds.upper.values


def _xi_at(a: np.ndarray, b: np.ndarray, k: int) -> float:
    suffix_min = np.minimum.accumulate(a[k::-1])[::-1]
    start = min(max(float(b[0]), 0.0), float(suffix_min[0]))
    body = float(np.max(np.minimum(b[:k + 1], suffix_min)))
    return max(start, body)


def xi_direct(psi: GridPath, bounds: BoundaryPair, t: float) -> float:
    """Xi(t) from the explicit formula by a direct scan over s <= t.

    t must be a grid point. O(k) per call, O(n^2) for a whole path.
    """
    a, b = _operands(psi, bounds)
    return _xi_at(a, b, psi.grid.index_of(t))


def xi_direct_path(psi: GridPath, bounds: BoundaryPair) -> GridPath:
    """The explicit formula evaluated at every grid point."""
    a, b = _operands(psi, bounds)
    return GridPath(psi.grid, np.array([_xi_at(a, b, k) for k in range(len(a))]))


def xi_recursive(psi: GridPath, bounds: BoundaryPair) -> GridPath:
    """Xi by the one-step projection recursion, single forward pass."""
    a, b = _operands(psi, bounds)
    out = []
    xi = 0.0
    for ak, bk in zip(a.tolist(), b.tolist()):
        xi = min(max(xi, bk), ak)
        out.append(xi)
    return GridPath(psi.grid, np.array(out))


def split_increments(eta: GridPath) -> tuple[GridPath, GridPath]:
    """Split eta into (eta_l, eta_r), the running sums of its up and down moves.

    The first increment is eta(0) - 0.
    """
    d = np.diff(eta.values, prepend=0.0)
    eta_l = np.cumsum(np.where(d > 0, d, 0.0))
    eta_r = np.cumsum(np.where(d < 0, -d, 0.0))
    return GridPath(eta.grid, eta_l), GridPath(eta.grid, eta_r)


def _clip_checked(raw: np.ndarray, bounds: BoundaryPair) -> np.ndarray:
    lo, hi = bounds.lower.values, bounds.upper.values
    excess = np.maximum(lo - raw, raw - hi)
    k = int(np.argmax(excess))
    if excess[k] > CONSISTENCY_TOL:
        raise SolverConsistencyError(float(bounds.grid.points[k]), float(excess[k]))
    return np.minimum(np.maximum(raw, lo), hi)


def esm_solve(psi: GridPath, bounds: BoundaryPair) -> EsmSolution:
    """Solve the ESP for psi on [lower, upper]."""
    xi = xi_recursive(psi, bounds)
    phi = _clip_checked(psi.values - xi.values, bounds)
    eta = GridPath(psi.grid, -xi.values)
    if eta.values[0] != 0.0:
        logger.debug("psi(0)=%r projected onto [%r, %r]",
                     float(psi.values[0]), float(bounds.lower.values[0]),
                     float(bounds.upper.values[0]))
    eta_l, eta_r = split_increments(eta)
    return EsmSolution(GridPath(psi.grid, phi), eta, eta_l, eta_r)


def gamma_lower(psi: GridPath, lower: GridPath) -> GridPath:
    """One-sided map psi(t) + sup_{s<=t} [l(s) - psi(s)]^+."""
    if not psi.grid.same_as(lower.grid):
        raise GridMismatchError("psi and lower must share a grid")
    psi.require_finite("psi")
    push = np.maximum(np.maximum.accumulate(lower.values - psi.values), 0.0)
    return GridPath(psi.grid, np.maximum(psi.values + push, lower.values))


def gamma_zero(psi: GridPath) -> GridPath:
    """The classical reflection at 0 on [0, infinity)."""
    return gamma_lower(psi, GridPath.constant(psi.grid, 0.0))


def _worst(values: np.ndarray, points: np.ndarray) -> tuple[float, float | None]:
    if values.size == 0:
        return 0.0, None
    k = int(np.argmax(values))
    v = float(values[k])
    return (v, float(points[k])) if v > 0 else (0.0, None)


def verify_esp(sol: EsmSolution, psi: GridPath, bounds: BoundaryPair,
               tol: float = 1e-9) -> ConditionReport:
    """Check the ESP conditions at grid resolution.

    Per grid step k (with eta(0-) = 0): phi = psi + eta; l <= phi <= r;
    eta may not decrease on a step ending strictly below r; eta may not
    increase on a step ending strictly above l. Steps that move eta while
    phi sits within tol of the boundary are counted as touching, not failed.
    """
    for p in (sol.phi, sol.eta, psi):
        if not p.grid.same_as(bounds.grid):
            raise GridMismatchError("solution, psi and bounds must share a grid")
    pts = bounds.grid.points
    phi, eta = sol.phi.values, sol.eta.values
    lo, hi = bounds.lower.values, bounds.upper.values
    d_eta = np.diff(eta, prepend=0.0)

    identity = np.abs(phi - psi.values - eta)
    in_range = np.maximum(np.maximum(lo - phi, phi - hi), 0.0)
    below_upper = phi < hi - tol
    above_lower = phi > lo + tol
    down_moves = np.where(below_upper, np.maximum(-d_eta, 0.0), 0.0)
    up_moves = np.where(above_lower, np.maximum(d_eta, 0.0), 0.0)

    near = (~below_upper & (phi != hi)) | (~above_lower & (phi != lo))
    touching = int(np.count_nonzero(near & (d_eta != 0)))

    return ConditionReport.from_violations(
        {
            "identity": _worst(identity, pts),
            "range": _worst(in_range, pts),
            "decrease_below_upper": _worst(down_moves, pts),
            "increase_above_lower": _worst(up_moves, pts),
        },
        tol,
        detail={"touching_steps": touching},
    )


def verify_sp_complementarity(sol: EsmSolution, bounds: BoundaryPair,
                              tol: float = 1e-9) -> ConditionReport:
    """eta_l may only grow where phi = l, eta_r only where phi = r (within tol)."""
    pts = bounds.grid.points
    phi = sol.phi.values
    d_l = np.diff(sol.eta_l.values, prepend=0.0)
    d_r = np.diff(sol.eta_r.values, prepend=0.0)
    off_lower = phi > bounds.lower.values + tol
    off_upper = phi < bounds.upper.values - tol
    stray_l = np.where(off_lower, np.abs(d_l), 0.0)
    stray_r = np.where(off_upper, np.abs(d_r), 0.0)
    mass_l = float(stray_l.sum())
    mass_r = float(stray_r.sum())
    _, loc_l = _worst(stray_l, pts)
    _, loc_r = _worst(stray_r, pts)
    return ConditionReport.from_violations(
        {
            "lower_mass_off_boundary": (mass_l, loc_l),
            "upper_mass_off_boundary": (mass_r, loc_r),
            "lower_decreasing": _worst(np.maximum(-d_l, 0.0), pts),
            "upper_decreasing": _worst(np.maximum(-d_r, 0.0), pts),
        },
        tol,
    )
