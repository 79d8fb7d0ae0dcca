"""Brownian paths built by midpoint (bridge) refinement.

Level k lives on the dyadic grid with 2**k intervals of [0, T]. Level k+1
keeps every level-k value and fills each midpoint with the bridge law

    B(mid) = (B(left) + B(right)) / 2 + sqrt(h / 4) * Z,    h = T / 2**k,

where the normals Z for a level are drawn from a generator keyed by
(seed, stream, level). The same seed therefore gives the same path at every
resolution, and coarse paths are restrictions of fine ones.
"""

import numpy as np

from .errors import PathDomainError
from .pathkit import GridPath, TimeGrid

CUSP_STREAM = 0
THORN_X_STREAM = 1
THORN_Y_STREAM = 2


def level_rng(seed: int, stream: int, level: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream), int(level)]))


def bridge_values(seed: int, horizon: float, level: int, stream: int = CUSP_STREAM) -> list[np.ndarray]:
    """Raw values for levels 0..level."""
    if level < 0:
        raise PathDomainError(f"level must be >= 0, got {level}")
    if not horizon > 0:
        raise PathDomainError(f"horizon must be positive, got {horizon!r}")
    end = np.sqrt(horizon) * level_rng(seed, stream, 0).standard_normal()
    levels = [np.array([0.0, end])]
    for k in range(level):
        coarse = levels[-1]
        h = horizon / (1 << k)
        z = level_rng(seed, stream, k + 1).standard_normal(coarse.size - 1)
        fine = np.empty(2 * coarse.size - 1)
        fine[0::2] = coarse
        fine[1::2] = 0.5 * (coarse[:-1] + coarse[1:]) + np.sqrt(h / 4.0) * z
        levels.append(fine)
    return levels


def brownian_path(seed: int, horizon: float, n_levels: int,
                  stream: int = CUSP_STREAM) -> list[GridPath]:
    """Nested Brownian paths at levels 0..n_levels (index k has 2**k intervals)."""
    if n_levels < 1:
        raise PathDomainError(f"n_levels must be >= 1, got {n_levels}")
    return [GridPath(TimeGrid.dyadic(horizon, k), v)
            for k, v in enumerate(bridge_values(seed, horizon, n_levels, stream))]


def brownian_at(seed: int, horizon: float, levels: list[int],
                stream: int = CUSP_STREAM) -> dict[int, GridPath]:
    """Only the requested levels of one nested path."""
    raw = bridge_values(seed, horizon, max(levels), stream)
    return {k: GridPath(TimeGrid.dyadic(horizon, k), raw[k]) for k in levels}


def level_of(resolution: int) -> int:
    """log2 of a power-of-two resolution."""
    level = int(resolution).bit_length() - 1
    if resolution < 2 or (1 << level) != resolution:
        raise PathDomainError(f"resolution must be a power of two >= 2, got {resolution!r}")
    return level
