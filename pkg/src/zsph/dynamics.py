"""Right-hand-side operators: transport bracket, viscosity, noise scalings, NIDE.

The noise basis is the real (tesseral) recombination of the quantized
harmonics: for each degree l the 2l+1 generators are skew-Hermitian, unit
Frobenius norm, and mutually orthogonal, so a draw of independent real
amplitudes yields a skew-Hermitian perturbation and the induced dissipative
operator is the per-mode sum of nested brackets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TruncationOverflowError
from .laplacian import LaplaceFactorization, apply_laplacian, solve_stream
from .quantization import BasisCache, SpinGenerators


@dataclass(frozen=True)
class NoiseScaling:
    """Coefficient family alpha_lm = sqrt(2 nu_salt) c_lm / ||c||, c_lm = (l+1)^-a.

    alpha depends on l only; ``alpha_l[i]`` is the value for degree i+1.
    """

    a: float
    m_max: int
    nu_salt: float
    alpha_l: np.ndarray
    c_norm: float

    @property
    def mode_count(self) -> int:
        return self.m_max * (self.m_max + 2)  # sum of 2l+1, l = 1..M

    def alpha_modes(self) -> np.ndarray:
        """alpha per (l, m) mode, l ascending, m = -l..l within each degree."""
        return np.repeat(self.alpha_l, 2 * np.arange(1, self.m_max + 1) + 1)


def build_noise_scaling(
    a: float, m_max: int, nu_salt: float, n: int | None = None
) -> NoiseScaling:
    if a <= 0 or nu_salt <= 0 or m_max < 1:
        raise ValueError("noise scaling requires a > 0, nu_salt > 0, M >= 1")
    if n is not None and m_max >= n:
        raise TruncationOverflowError(f"M={m_max} exceeds resolution limit N-1={n - 1}")
    ls = np.arange(1, m_max + 1)
    c_l = 1.0 / (ls + 1.0) ** a
    c_norm = float(np.sqrt(((2 * ls + 1) * c_l**2).sum()))
    alpha_l = np.sqrt(2.0 * nu_salt) * c_l / c_norm
    return NoiseScaling(a=a, m_max=m_max, nu_salt=nu_salt, alpha_l=alpha_l, c_norm=c_norm)


@dataclass(frozen=True)
class NideSpec:
    """Dissipative-operator choice: power-law noise family, AVM, or custom pairs."""

    mode: str  # "power_law" | "avm" | "custom"
    scaling: NoiseScaling | None = None
    pairs: tuple = ()  # custom: ((matrix, coefficient), ...)

    @classmethod
    def power_law(cls, scaling: NoiseScaling) -> "NideSpec":
        return cls(mode="power_law", scaling=scaling)

    @classmethod
    def avm(cls) -> "NideSpec":
        return cls(mode="avm")

    @classmethod
    def custom(cls, pairs) -> "NideSpec":
        return cls(mode="custom", pairs=tuple(pairs))


@dataclass
class NoiseGenerators:
    """Stacked skew-Hermitian noise matrices for degrees 1..M.

    Mode order is (l, m) with l ascending and m = -l..l: m < 0 maps to the
    sine combination (T_lm - T_lm^H)/sqrt2, m = 0 to i T_l0, m > 0 to the
    cosine combination i(T_lm + T_lm^H)/sqrt2.
    """

    m_max: int
    matrices: np.ndarray  # (K, N, N) complex
    degrees: np.ndarray  # (K,) degree l per mode


def build_noise_generators(cache: BasisCache, m_max: int) -> NoiseGenerators:
    n = cache.n
    if m_max >= n:
        raise TruncationOverflowError(f"M={m_max} exceeds resolution limit N-1={n - 1}")
    mats = []
    degrees = []
    for l in range(1, m_max + 1):
        for m in range(-l, l + 1):
            if m == 0:
                mats.append(1j * cache.matrix(l, 0))
            else:
                t = cache.matrix(l, abs(m))
                th = t.conj().T
                if m > 0:
                    mats.append(1j * (t + th) / np.sqrt(2.0))
                else:
                    mats.append((t - th) / np.sqrt(2.0))
            degrees.append(l)
    return NoiseGenerators(
        m_max=m_max, matrices=np.array(mats), degrees=np.array(degrees)
    )


def hamiltonian_rhs(w: np.ndarray, fact: LaplaceFactorization) -> np.ndarray:
    """-(1/hbar)[P, W] with Delta_N P = W."""
    p = solve_stream(w, fact)
    return -(p @ w - w @ p) / fact.resolution.hbar


def viscous_rhs(w: np.ndarray, nu: float, gen: SpinGenerators) -> np.ndarray:
    """nu * Delta_N W."""
    if nu < 0:
        raise ValueError("viscosity must be nonnegative")
    if nu == 0:
        return np.zeros_like(w)
    return nu * apply_laplacian(w, gen)


@dataclass
class NideOperator:
    """Evaluator for the noise-induced dissipative drift (1/2hbar^2) sum-of-brackets.

    Built once per run; ``__call__`` is a pure function of W.
    """

    spec: NideSpec
    hbar: float
    matrices: np.ndarray | None = None  # power_law / custom stacks
    weights: np.ndarray | None = None  # squared coefficients per stacked matrix
    fact: LaplaceFactorization | None = None  # avm only
    avm_scale: float = 2.0  # psi_1 = sqrt(2) psi

    def __call__(self, w: np.ndarray) -> np.ndarray:
        pref = 1.0 / (2.0 * self.hbar**2)
        if self.spec.mode == "avm":
            p = solve_stream(w, self.fact)
            c = p @ w - w @ p
            return pref * self.avm_scale * (p @ c - c @ p)
        if self.matrices is None or len(self.matrices) == 0:
            return np.zeros_like(w)
        t = self.matrices
        c = t @ w - w @ t
        d = t @ c - c @ t
        return pref * np.einsum("k,kij->ij", self.weights, d)


def build_nide_operator(
    spec: NideSpec,
    cache: BasisCache,
    fact: LaplaceFactorization | None = None,
    gens: NoiseGenerators | None = None,
) -> NideOperator:
    hbar = cache.resolution.hbar
    if spec.mode == "power_law":
        scaling = spec.scaling
        if gens is None or gens.m_max < scaling.m_max:
            gens = build_noise_generators(cache, scaling.m_max)
        k = scaling.m_max * (scaling.m_max + 2)
        weights = scaling.alpha_l[gens.degrees[:k] - 1] ** 2
        return NideOperator(
            spec=spec, hbar=hbar, matrices=gens.matrices[:k], weights=weights
        )
    if spec.mode == "avm":
        if fact is None:
            raise ValueError("AVM dissipation needs a Laplacian factorization")
        return NideOperator(spec=spec, hbar=hbar, fact=fact)
    if spec.mode == "custom":
        if not spec.pairs:
            return NideOperator(
                spec=spec,
                hbar=hbar,
                matrices=np.zeros((0, cache.n, cache.n), dtype=complex),
                weights=np.zeros(0),
            )
        mats = np.array([m for m, _ in spec.pairs])
        weights = np.array([float(c) ** 2 for _, c in spec.pairs])
        if mats.shape[-1] != cache.n:
            raise TruncationOverflowError("custom pair dimensions do not match N")
        return NideOperator(spec=spec, hbar=hbar, matrices=mats, weights=weights)
    raise ValueError(f"unknown NIDE mode {spec.mode!r}")


def apply_nide(
    w: np.ndarray,
    spec: NideSpec,
    cache: BasisCache,
    fact: LaplaceFactorization | None = None,
) -> np.ndarray:
    """One-shot NIDE evaluation; prefer ``build_nide_operator`` inside loops."""
    return build_nide_operator(spec, cache, fact=fact)(w)
