"""
Oxygen field solver

Fixed-count Jacobi relaxation of the steady diffusion-decay-uptake balance on
the voxel lattice:

    D * sum(neighbours) - (6 D + decay + uptake_i) * u_i + secretion_i = 0

with zero-flux lattice boundaries.
"""

import numpy as np


def relax(
    oxygen: np.ndarray,
    secretion: np.ndarray,
    uptake: np.ndarray,
    diffusion: float,
    decay: float,
    sweeps: int,
) -> np.ndarray:
    """Run ``sweeps`` Jacobi sweeps starting from ``oxygen`` and return the new field"""
    u = oxygen.astype(np.float64, copy=True)
    denominator = 6.0 * diffusion + decay + uptake
    for _ in range(sweeps):
        padded = np.pad(u, 1, mode="edge")
        neighbours = (
            padded[:-2, 1:-1, 1:-1]
            + padded[2:, 1:-1, 1:-1]
            + padded[1:-1, :-2, 1:-1]
            + padded[1:-1, 2:, 1:-1]
            + padded[1:-1, 1:-1, :-2]
            + padded[1:-1, 1:-1, 2:]
        )
        u = (diffusion * neighbours + secretion) / denominator
    np.maximum(u, 0.0, out=u)
    return u
