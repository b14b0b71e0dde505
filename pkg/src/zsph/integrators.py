"""Time stepping: stochastic isospectral midpoint plus dissipative splitting.

The Lie-Poisson part advances by a similarity transform built from the
midpoint stream matrix (and, for the stochastic variant, a per-step frozen
noise matrix), so the spectrum and every Casimir are preserved to solver
tolerance.  Viscous and NIDE terms are composed around it with Strang
splitting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .dynamics import (
    NideOperator,
    NideSpec,
    NoiseGenerators,
    NoiseScaling,
    build_nide_operator,
    build_noise_generators,
)
from .errors import InvalidStepError, StepFailureError
from .laplacian import LaplaceFactorization, solve_stream
from .quantization import BasisCache, extract, project


@dataclass(frozen=True)
class FixedPointSettings:
    tolerance: float = 1e-13
    max_iterations: int = 100

    def __post_init__(self):
        if self.tolerance <= 0 or self.max_iterations < 1:
            raise ValueError("invalid fixed-point settings")


@dataclass(frozen=True)
class NoiseDraw:
    """Truncated-normal amplitudes, one per noise mode (l asc, m = -l..l)."""

    zetas: np.ndarray
    bound: float


@dataclass(frozen=True)
class ModelSpec:
    """Which dynamics to advance and with what step size.

    variant: euler | navier_stokes | nide | stochastic.
    ``disable_bracket`` switches off the transport step (test hook).
    ``nide_substeps`` splits each dissipative half step into that many
    explicit 4-stage updates; None picks a count from a spectral-radius
    estimate at stepper construction.
    """

    variant: str
    h: float
    nu: float = 0.0
    nide: NideSpec | None = None
    scaling: NoiseScaling | None = None
    disable_bracket: bool = False
    nide_substeps: int | None = None

    def __post_init__(self):
        if self.variant not in ("euler", "navier_stokes", "nide", "stochastic"):
            raise ValueError(f"unknown model variant {self.variant!r}")
        if self.h <= 0:
            raise ValueError("step size must be positive")
        if self.variant == "navier_stokes" and self.nu < 0:
            raise ValueError("navier_stokes requires nu >= 0")
        if self.variant == "nide" and self.nide is None:
            raise ValueError("nide variant requires a NideSpec")
        if self.variant == "stochastic" and self.scaling is None:
            raise ValueError("stochastic variant requires a NoiseScaling")


def truncation_bound(h: float, truncation_l: int = 2) -> float:
    if not 0 < h < 1:
        raise InvalidStepError(f"stochastic step size must lie in (0, 1), got {h}")
    return float(np.sqrt(2.0 * truncation_l * np.abs(np.log(h))))


def sample_noise_draw(
    h: float,
    scaling: NoiseScaling,
    rng: np.random.Generator,
    truncation_l: int = 2,
) -> NoiseDraw:
    """Independent standard normals clipped to [-A, A], A = sqrt(2 l |log h|)."""
    bound = truncation_bound(h, truncation_l)
    xi = rng.standard_normal(scaling.mode_count)
    return NoiseDraw(zetas=np.clip(xi, -bound, bound), bound=bound)


class Stepper:
    """Per-model time stepper over a shared basis cache and factorization."""

    def __init__(
        self,
        model: ModelSpec,
        cache: BasisCache,
        fact: LaplaceFactorization,
        settings: FixedPointSettings = FixedPointSettings(),
        gens: NoiseGenerators | None = None,
    ):
        self.model = model
        self.cache = cache
        self.fact = fact
        self.settings = settings
        self.hbar = cache.resolution.hbar
        self.gens = gens
        self.nide_op: NideOperator | None = None
        self._alpha_modes = None
        self._nide_substeps = None
        self._eigenvalues = -np.arange(cache.n) * (np.arange(cache.n) + 1.0)

        if model.variant == "stochastic":
            if self.gens is None or self.gens.m_max < model.scaling.m_max:
                self.gens = build_noise_generators(cache, model.scaling.m_max)
            self._alpha_modes = model.scaling.alpha_modes()
        elif model.variant == "nide":
            self.nide_op = build_nide_operator(
                model.nide, cache, fact=fact, gens=self.gens
            )

    # -- noise ---------------------------------------------------------------

    def noise_matrix(self, draw: NoiseDraw) -> np.ndarray:
        """sqrt(h)/hbar-scaled skew-Hermitian noise increment for one step."""
        k = self.model.scaling.mode_count
        amp = self._alpha_modes * draw.zetas
        mat = np.einsum("k,kij->ij", amp, self.gens.matrices[:k])
        return -(np.sqrt(self.model.h) / self.hbar) * mat

    # -- isospectral transport step ------------------------------------------

    def isospectral_midpoint_step(
        self, w: np.ndarray, draw: NoiseDraw | None = None
    ) -> np.ndarray:
        if self.model.disable_bracket:
            return w
        stochastic = self.model.variant == "stochastic"
        if stochastic != (draw is not None):
            raise ValueError("a noise draw is required iff the model is stochastic")

        h, hbar = self.model.h, self.hbar
        noise = self.noise_matrix(draw) if stochastic else 0.0
        wt = w
        norm = np.linalg.norm(w)
        eye = np.eye(len(w))
        residual = np.inf
        for _ in range(self.settings.max_iterations):
            # The iterate A^-1 W B^-1 carries an O(h^2) trace component with
            # no stream function; only its traceless part drives the flow.
            wt0 = wt - np.trace(wt) / len(wt) * eye
            p_tilde = -(h / hbar) * solve_stream(wt0, self.fact) + noise
            a = eye - p_tilde / 2.0
            b = eye + p_tilde / 2.0
            try:
                lu_a = lu_factor(a)
                lu_b = lu_factor(b.conj().T)
            except Exception as exc:  # singular I +- P/2
                raise StepFailureError(f"singular midpoint system: {exc}") from exc
            wt_new = lu_solve(lu_a, lu_solve(lu_b, w.conj().T).conj().T)
            residual = np.linalg.norm(wt_new - wt) / max(norm, 1e-300)
            wt = wt_new
            if residual < self.settings.tolerance:
                break
        else:
            raise StepFailureError(
                f"midpoint fixed point did not converge (residual {residual:.3e})",
                residual=residual,
            )
        return b @ wt @ a

    # -- dissipative flows ----------------------------------------------------

    def _diffusion_update(self, w: np.ndarray, h_sub: float) -> np.ndarray:
        """Exact integrating factor exp(-nu l(l+1) h) in coefficient space."""
        coeffs = extract(w, self.cache)
        ls = np.repeat(np.arange(self.cache.n), 2 * np.arange(self.cache.n) + 1)
        coeffs.values *= np.exp(self.model.nu * self._eigenvalues[ls] * h_sub)
        return project(coeffs, self.cache)

    def _nide_stage_count(self, w: np.ndarray, h_sub: float) -> int:
        if self.model.nide_substeps is not None:
            return self.model.nide_substeps
        if self._nide_substeps is None:
            lam = _spectral_radius_estimate(self.nide_op, w)
            # explicit 4-stage real-axis stability limit ~2.78; keep margin
            self._nide_substeps = max(1, int(np.ceil(h_sub * lam / 1.5)))
        return self._nide_substeps

    def dissipative_substep(self, w: np.ndarray, h_sub: float) -> np.ndarray:
        if h_sub == 0:
            return w
        if self.model.variant == "navier_stokes":
            return self._diffusion_update(w, h_sub)
        if self.model.variant == "nide":
            stages = self._nide_stage_count(w, h_sub)
            dt = h_sub / stages
            for _ in range(stages):
                w = _rk4(self.nide_op, w, dt)
                w = (w - w.conj().T) / 2.0
            return w
        raise ValueError("dissipative substep applies to navier_stokes/nide only")

    # -- composition -----------------------------------------------------------

    def composite_step(self, w: np.ndarray, draw: NoiseDraw | None = None) -> np.ndarray:
        h = self.model.h
        if self.model.variant in ("euler", "stochastic"):
            return self.isospectral_midpoint_step(w, draw)
        w = self.dissipative_substep(w, h / 2.0)
        w = self.isospectral_midpoint_step(w)
        return self.dissipative_substep(w, h / 2.0)


def _rk4(f, w, dt):
    k1 = f(w)
    k2 = f(w + dt / 2.0 * k1)
    k3 = f(w + dt / 2.0 * k2)
    k4 = f(w + dt * k3)
    return w + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _spectral_radius_estimate(op, w, iters: int = 12, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(w.shape) + 1j * rng.standard_normal(w.shape)
    v = (v - v.conj().T) / 2.0
    v -= np.trace(v) / len(v) * np.eye(len(v))
    lam = 1.0
    for _ in range(iters):
        v = op(v)
        lam = np.linalg.norm(v)
        if lam == 0:
            return 0.0
        v /= lam
    return lam
