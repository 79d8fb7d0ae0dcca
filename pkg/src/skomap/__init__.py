"""Extended Skorokhod map on a time-dependent interval, with comparison checks
and local-time variation experiments."""

__version__ = "0.1.0"

from .errors import (
    BoundaryOrderError,
    ConfigError,
    CsvFormatError,
    GridMismatchError,
    HypothesisError,
    PathDomainError,
    SkomapError,
    SolverConsistencyError,
)
from .esm import EsmSolution, esm_solve, gamma_lower, gamma_zero, verify_esp, verify_sp_complementarity
from .pathio import read_path, write_path
from .pathkit import BoundaryPair, GridPath, TimeGrid, evaluate, variation

__all__ = [
    "BoundaryOrderError",
    "BoundaryPair",
    "ConfigError",
    "CsvFormatError",
    "EsmSolution",
    "GridMismatchError",
    "GridPath",
    "HypothesisError",
    "PathDomainError",
    "SkomapError",
    "SolverConsistencyError",
    "TimeGrid",
    "esm_solve",
    "evaluate",
    "gamma_lower",
    "gamma_zero",
    "read_path",
    "variation",
    "verify_esp",
    "verify_sp_complementarity",
    "write_path",
]
