"""Quantized spherical-harmonic basis T_lm and coefficient <-> matrix maps.

The basis elements are eigen-matrices of the Hoppe-Yau Laplacian with
eigenvalue -l(l+1), orthonormal under Tr(A^H B), and satisfy the conjugation
symmetry T_lm^H = (-1)^m T_{l,-m}.  Each element is supported on a single
matrix diagonal (offset m) and is stored as that diagonal vector; dense
matrices are materialized on demand.

Construction runs per diagonal offset: the tridiagonal restriction of the
Laplacian is diagonalized (numerically exact orthonormality), and the sign of
each eigenvector is locked to the su(2) lowering recurrence
[S-, T_lm] = sqrt((l+m)(l-m+1)) T_{l,m-1} applied to the already-built
neighbor at offset m+1.  Running the bare recurrence across a whole row is
numerically unstable for N >~ 32; using it only as a one-step sign reference
keeps the recurrence semantics without the error accumulation.  The
highest-weight element T_ll is proportional to (S+)^l with sign (-1)^l
(Condon-Shortley), which makes T_10 the positively-normalized Sz.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _ladder
from .errors import (
    CorruptCacheError,
    InvalidResolutionError,
    ResolutionMismatchError,
    ShapeError,
    TruncationOverflowError,
    ZeroMeanViolationError,
)

CACHE_MAGIC = b"ZSPH"
CACHE_VERSION = 1
PHASE_CONVENTION_CS = 1  # Condon-Shortley highest-weight sign (-1)^l


@dataclass(frozen=True)
class Resolution:
    """Matrix size N of the truncation; hbar = 2/sqrt(N^2-1)."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidResolutionError(f"resolution requires N >= 2, got {self.n}")

    @property
    def hbar(self) -> float:
        return 2.0 / np.sqrt(self.n**2 - 1.0)


@dataclass(frozen=True)
class SpinGenerators:
    """Spin-s irrep generators, s = (N-1)/2, with [Sx, Sy] = i Sz cyclic."""

    n: int
    z: np.ndarray  # diagonal of Sz, descending s..-s
    sp: np.ndarray  # superdiagonal of S+

    @property
    def sz(self) -> np.ndarray:
        return np.diag(self.z).astype(complex)

    @property
    def s_plus(self) -> np.ndarray:
        return np.diag(self.sp, 1).astype(complex)

    @property
    def s_minus(self) -> np.ndarray:
        return np.diag(self.sp, -1).astype(complex)

    @property
    def sx(self) -> np.ndarray:
        return (self.s_plus + self.s_minus) / 2.0

    @property
    def sy(self) -> np.ndarray:
        return (self.s_plus - self.s_minus) / 2j


def build_spin_generators(n: int) -> SpinGenerators:
    if n < 2:
        raise InvalidResolutionError(f"spin generators require N >= 2, got {n}")
    return SpinGenerators(
        n=n, z=_ladder.sz_diagonal(n), sp=_ladder.ladder_superdiagonal(n)
    )


@dataclass(frozen=True)
class BasisElement:
    """One quantized harmonic T_lm, stored as its offset-m diagonal."""

    l: int
    m: int
    n: int
    diag: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return _ladder.diag_to_dense(self.diag, self.m, self.n)


@dataclass
class HarmonicCoefficients:
    """Coefficients omega_lm, l = 0..L, m = -l..l, flat in (l, m) lex order."""

    l_max: int
    values: np.ndarray

    @classmethod
    def zeros(cls, l_max: int) -> "HarmonicCoefficients":
        return cls(l_max, np.zeros((l_max + 1) ** 2, dtype=complex))

    def _idx(self, l: int, m: int) -> int:
        if not (0 <= l <= self.l_max and -l <= m <= l):
            raise IndexError(f"(l, m) = ({l}, {m}) outside degree range 0..{self.l_max}")
        return l * l + l + m

    def get(self, l: int, m: int) -> complex:
        return self.values[self._idx(l, m)]

    def set(self, l: int, m: int, value: complex) -> None:
        self.values[self._idx(l, m)] = value

    def is_real_field(self, tol: float = 1e-12) -> bool:
        """coefficient(l,-m) == (-1)^m conj(coefficient(l,m)) for all modes."""
        for l in range(self.l_max + 1):
            for m in range(l + 1):
                lhs = self.get(l, -m)
                rhs = (-1) ** m * np.conj(self.get(l, m))
                if abs(lhs - rhs) > tol * max(1.0, abs(rhs)):
                    return False
        return True

    def copy(self) -> "HarmonicCoefficients":
        return HarmonicCoefficients(self.l_max, self.values.copy())


@dataclass
class BasisCache:
    """All T_lm for one resolution, grouped by diagonal offset.

    ``diagonals[m]`` stacks the diagonal vectors of T_lm for l = |m|..N-1
    (rows in ascending l); a completed cache is immutable by convention and
    safe to share read-only.
    """

    resolution: Resolution
    generators: SpinGenerators
    diagonals: dict[int, np.ndarray]
    phase_convention: int = PHASE_CONVENTION_CS
    _dense: dict[tuple[int, int], np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.resolution.n

    def element(self, l: int, m: int) -> BasisElement:
        n = self.n
        if not (0 <= l < n and -l <= m <= l):
            raise IndexError(f"(l, m) = ({l}, {m}) outside basis range for N={n}")
        return BasisElement(l=l, m=m, n=n, diag=self.diagonals[m][l - abs(m)])

    def matrix(self, l: int, m: int) -> np.ndarray:
        key = (l, m)
        if key not in self._dense:
            self._dense[key] = self.element(l, m).matrix
        return self._dense[key]

    def iter_lm(self):
        for l in range(self.n):
            for m in range(-l, l + 1):
                yield l, m

    @property
    def element_count(self) -> int:
        return self.n**2


def build_basis(resolution: Resolution) -> BasisCache:
    n = resolution.n
    gen = build_spin_generators(n)
    z, sp = gen.z, gen.sp
    diagonals: dict[int, np.ndarray] = {}

    for m in range(n - 1, -1, -1):
        d, e = _ladder.laplacian_tridiagonal_block(n, m, z, sp)
        if len(d) == 1:
            eigvals, vecs = np.array([d[0]]), np.eye(1)
        else:
            eigvals, vecs = eigh_tridiagonal(d, e)
        order = np.argsort(-eigvals)  # eigenvalue -l(l+1): l ascending from m
        vecs = vecs[:, order]

        rows = np.empty((n - m, n - m), dtype=float)
        for i, l in enumerate(range(m, n)):
            v = vecs[:, i]
            if l == m:
                # (S+)^l has positive entries; Condon-Shortley sign (-1)^l
                if np.sign(v.sum()) != (-1.0) ** l:
                    v = -v
            else:
                ref = _ladder.lower_diag(diagonals[m + 1][l - m - 1], m + 1, n, sp)
                if np.dot(v, ref.real) < 0:
                    v = -v
            rows[i] = v
        diagonals[m] = rows.astype(complex)
        if m > 0:
            # conjugation symmetry T_lm^H = (-1)^m T_{l,-m}; rows are real
            diagonals[-m] = ((-1.0) ** m) * rows.astype(complex)

    return BasisCache(resolution=resolution, generators=gen, diagonals=diagonals)


def _check_square(w: np.ndarray, n: int) -> None:
    if w.shape != (n, n):
        raise ShapeError(f"expected {(n, n)} matrix, got {w.shape}")


def project(coeffs: HarmonicCoefficients, cache: BasisCache) -> np.ndarray:
    """W = sum_lm omega_lm (i T_lm); skew-Hermitian for real-field coefficients."""
    n = cache.n
    if coeffs.l_max > n - 1:
        raise TruncationOverflowError(
            f"coefficient degree {coeffs.l_max} exceeds N-1 = {n - 1}"
        )
    c00 = coeffs.get(0, 0)
    if abs(c00) > 1e-12 * max(1.0, np.linalg.norm(coeffs.values)):
        raise ZeroMeanViolationError("mean (l=0) coefficient must vanish")

    w = np.zeros((n, n), dtype=complex)
    for m in range(-coeffs.l_max, coeffs.l_max + 1):
        ls = np.arange(abs(m), coeffs.l_max + 1)
        cvec = coeffs.values[ls * ls + ls + m]
        if not np.any(cvec):
            continue
        diag = 1j * (cvec @ cache.diagonals[m][: len(ls)])
        q = np.arange(n - abs(m))
        w[q + max(-m, 0), q + max(m, 0)] += diag
    return w


def extract(w: np.ndarray, cache: BasisCache, l_max: int | None = None) -> HarmonicCoefficients:
    """omega_lm = Tr((i T_lm)^H W); exact inverse of project."""
    n = cache.n
    _check_square(w, n)
    l_max = n - 1 if l_max is None else l_max
    coeffs = HarmonicCoefficients.zeros(l_max)
    for m in range(-l_max, l_max + 1):
        wdiag = np.diagonal(w, offset=m)
        ls = np.arange(abs(m), l_max + 1)
        vals = -1j * (np.conj(cache.diagonals[m][: len(ls)]) @ wdiag)
        coeffs.values[ls * ls + ls + m] = vals
    return coeffs


def save_cache(cache: BasisCache, path) -> None:
    """Little-endian binary: ZSPH, u32 version, u32 N, u32 phase tag, dense T_lm."""
    n = cache.n
    with open(path, "wb") as f:
        f.write(CACHE_MAGIC)
        f.write(struct.pack("<III", CACHE_VERSION, n, cache.phase_convention))
        for l, m in cache.iter_lm():
            cache.element(l, m).matrix.astype("<c16").tofile(f)


def load_cache(path, expected_n: int | None = None) -> BasisCache:
    with open(path, "rb") as f:
        header = f.read(16)
        if len(header) < 16 or header[:4] != CACHE_MAGIC:
            raise CorruptCacheError(f"{path}: bad magic or truncated header")
        version, n, phase = struct.unpack("<III", header[4:])
        if version != CACHE_VERSION:
            raise CorruptCacheError(f"{path}: unsupported cache version {version}")
        if expected_n is not None and n != expected_n:
            raise ResolutionMismatchError(
                f"{path}: cache holds N={n}, requested N={expected_n}"
            )
        resolution = Resolution(n)
        diagonals: dict[int, np.ndarray] = {
            m: np.zeros((n - abs(m), n - abs(m)), dtype=complex)
            for m in range(-(n - 1), n)
        }
        count = n * n
        raw = np.fromfile(f, dtype="<c16", count=count * n * n)
        if raw.size != count * n * n:
            raise CorruptCacheError(f"{path}: truncated cache payload")
        mats = raw.reshape(count, n, n)
        k = 0
        for l in range(n):
            for m in range(-l, l + 1):
                diagonals[m][l - abs(m)] = np.diagonal(mats[k], offset=m)
                k += 1
    return BasisCache(
        resolution=resolution,
        generators=build_spin_generators(n),
        diagonals=diagonals,
        phase_convention=phase,
    )
