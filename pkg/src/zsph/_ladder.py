"""Low-level su(2) ladder arithmetic on matrix diagonals.

Every quantized harmonic T_lm lives on a single matrix diagonal (offset m),
so the heavy lifting throughout the package happens on 1-D diagonal vectors
instead of dense N x N matrices.  A diagonal vector ``t`` at offset ``m``
maps to matrix entries (q + max(-m, 0), q + max(m, 0)) for q = 0..N-|m|-1.
"""

from __future__ import annotations

import numpy as np

from .errors import InternalConsistencyError


def sz_diagonal(n: int) -> np.ndarray:
    """Diagonal of Sz for the spin-(n-1)/2 irrep, descending: s, s-1, ..., -s."""
    s = (n - 1) / 2.0
    return s - np.arange(n)


def ladder_superdiagonal(n: int) -> np.ndarray:
    """Superdiagonal of S+ (entries (i, i+1)), length n-1."""
    s = (n - 1) / 2.0
    m = sz_diagonal(n)[1:]
    return np.sqrt(s * (s + 1) - m * (m + 1))


def diag_to_dense(t: np.ndarray, m: int, n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=complex)
    q = np.arange(n - abs(m))
    out[q + max(-m, 0), q + max(m, 0)] = t
    return out


def dense_to_diag(mat: np.ndarray, m: int) -> np.ndarray:
    return np.diagonal(mat, offset=m).copy()


def lower_diag(t: np.ndarray, m: int, n: int, sp: np.ndarray) -> np.ndarray:
    """Apply ad_{S-} = [S-, .] to a diagonal at offset m; result sits at m-1."""
    if m >= 1:
        out = np.zeros(n - m + 1, dtype=t.dtype)
        out[1:] += sp[: n - m] * t
        out[: n - m] -= sp[m - 1 : m - 1 + (n - m)] * t
    else:
        am = -m
        nn = n - am - 1
        out = sp[am : am + nn] * t[:nn] - sp[:nn] * t[1 : nn + 1]
    return out


def highest_weight_diag(l: int, n: int, sp: np.ndarray) -> np.ndarray:
    """Unit-norm diagonal of (S+)^l (offset +l), computed in log space.

    Entry q is prod_{k=q}^{q+l-1} sp[k]; the log-sum form avoids the overflow
    the raw product hits for large N and l.
    """
    if l == 0:
        return np.ones(n) / np.sqrt(n)
    logs = np.cumsum(np.concatenate(([0.0], np.log(sp))))
    v = logs[l:] - logs[:-l]
    v = np.exp(v - v.max())
    return v / np.linalg.norm(v)


def apply_laplacian_dense(w: np.ndarray, z: np.ndarray, sp: np.ndarray) -> np.ndarray:
    """Hoppe-Yau Laplacian -sum_i [S_i, [S_i, W]] via O(N^2) diagonal shifts.

    Accepts a single matrix or a stacked batch (..., N, N).
    """
    d2 = (z[:, None] - z[None, :]) ** 2

    def ad_plus(a):
        r = np.zeros_like(a)
        r[..., :-1, :] += sp[:, None] * a[..., 1:, :]
        r[..., :, 1:] -= a[..., :, :-1] * sp[None, :]
        return r

    def ad_minus(a):
        r = np.zeros_like(a)
        r[..., 1:, :] += sp[:, None] * a[..., :-1, :]
        r[..., :, :-1] -= a[..., :, 1:] * sp[None, :]
        return r

    return -(d2 * w + 0.5 * (ad_plus(ad_minus(w)) + ad_minus(ad_plus(w))))


def laplacian_tridiagonal_block(
    n: int, m: int, z: np.ndarray, sp: np.ndarray, band_tol: float = 1e-13
) -> tuple[np.ndarray, np.ndarray]:
    """Restriction of the Laplacian to the offset-m diagonal subspace.

    Assembled numerically by applying the dense operator to every canonical
    single-entry matrix on that diagonal.  Returns the (main, upper) diagonals
    of the real symmetric tridiagonal block; anything outside the band or off
    the source diagonal beyond ``band_tol`` (relative) is treated as a broken
    generator construction.
    """
    nn = n - abs(m)
    basis = np.zeros((nn, n, n), dtype=float)
    q = np.arange(nn)
    basis[q, q + max(-m, 0), q + max(m, 0)] = 1.0
    image = apply_laplacian_dense(basis, z, sp)
    block = image[:, q + max(-m, 0), q + max(m, 0)].T  # column k = Delta e_k
    scale = max(np.abs(block).max(), 1.0)

    stray = image.copy()
    stray[:, q + max(-m, 0), q + max(m, 0)] = 0.0
    if np.abs(stray).max() > band_tol * scale:
        raise InternalConsistencyError(
            f"Laplacian does not preserve diagonal offset {m} at N={n}"
        )
    off_band = np.abs(block - np.tril(np.triu(block, -1), 1)).max()
    if off_band > band_tol * scale:
        raise InternalConsistencyError(
            f"Laplacian restriction to offset {m} is not tridiagonal at N={n}"
        )
    if np.abs(block - block.T).max() > 1e-10 * scale:
        raise InternalConsistencyError(
            f"Laplacian restriction to offset {m} is not symmetric at N={n}"
        )
    d = np.diag(block).copy()
    e = np.diag(block, 1).copy() if nn > 1 else np.zeros(0)
    return d, e
