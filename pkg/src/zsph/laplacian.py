"""Hoppe-Yau Laplacian: forward application and fast stream-matrix solves.

The operator preserves matrix diagonals and acts tridiagonally within each,
so the inverse splits into independent banded solves per diagonal offset
(O(N^2) per application).  The m = 0 block is singular along the identity
direction; the solve pins the trace-free solution via a rank-one correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve, solve_banded

from . import _ladder
from .errors import ShapeError, ZeroMeanViolationError
from .quantization import Resolution, SpinGenerators


def apply_laplacian(w: np.ndarray, gen: SpinGenerators) -> np.ndarray:
    """Delta_N W = -sum_i [S_i, [S_i, W]]; supports stacked (..., N, N) input."""
    n = gen.n
    if w.shape[-2:] != (n, n):
        raise ShapeError(f"expected trailing shape {(n, n)}, got {w.shape}")
    return _ladder.apply_laplacian_dense(w, gen.z, gen.sp)


@dataclass
class LaplaceFactorization:
    """Per-diagonal factorized tridiagonal systems for one resolution.

    Immutable after construction; safe to share read-only across trajectories.
    """

    resolution: Resolution
    generators: SpinGenerators
    banded: dict[int, np.ndarray]  # offset |m| >= 1 -> (3, N-m) solve_banded form
    lu0: tuple  # LU of the trace-pinned m = 0 block

    @property
    def n(self) -> int:
        return self.resolution.n


def build_factorization(resolution: Resolution, gen: SpinGenerators) -> LaplaceFactorization:
    n = resolution.n
    banded: dict[int, np.ndarray] = {}
    lu0 = None
    for m in range(n):
        d, e = _ladder.laplacian_tridiagonal_block(n, m, gen.z, gen.sp)
        if m == 0:
            block = np.diag(d)
            block += np.diag(e, 1) + np.diag(e, -1)
            v = np.ones(n) / np.sqrt(n)  # kernel: the identity direction (l = 0)
            lu0 = lu_factor((block + np.outer(v, v)).astype(complex))
        else:
            ab = np.zeros((3, n - m), dtype=complex)
            ab[0, 1:] = e
            ab[1] = d
            ab[2, :-1] = e
            banded[m] = ab
    return LaplaceFactorization(
        resolution=resolution, generators=gen, banded=banded, lu0=lu0
    )


def solve_stream(w: np.ndarray, fact: LaplaceFactorization) -> np.ndarray:
    """Unique traceless P with Delta_N P = W, for traceless W."""
    n = fact.n
    if w.shape != (n, n):
        raise ShapeError(f"expected {(n, n)} matrix, got {w.shape}")
    norm = np.linalg.norm(w)
    if abs(np.trace(w)) > 1e-10 * max(norm, 1e-300):
        raise ZeroMeanViolationError("stream solve requires a traceless vorticity")

    p = np.zeros_like(w, dtype=complex)
    idx = np.arange(n)
    p[idx, idx] = lu_solve(fact.lu0, np.diagonal(w).copy())
    for m in range(1, n):
        q = np.arange(n - m)
        ab = fact.banded[m]
        p[q, q + m] = solve_banded((1, 1), ab, np.diagonal(w, offset=m).copy())
        p[q + m, q] = solve_banded((1, 1), ab, np.diagonal(w, offset=-m).copy())
    return p
