"""Conserved and dissipated quantities, rate predictions, scaling norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import NideOperator
from .laplacian import LaplaceFactorization, solve_stream


@dataclass
class DiagnosticsSample:
    t: float
    energy: float
    enstrophy: float
    casimirs: tuple  # Tr(W^k), k = 2..K (imag part for odd k)
    spectrum_drift: float


def energy(w: np.ndarray, fact: LaplaceFactorization) -> float:
    """Quadratic form (1/2) sum |omega_lm|^2 / (l(l+1)), evaluated as -Tr(P^H W)/2.

    Reported positive to match the continuum energy; the Hamiltonian trace
    form H = -Tr(PW)/2 differs only by the inner-product convention.
    """
    p = solve_stream(w, fact)
    return float(-0.5 * np.trace(p.conj().T @ w).real)


def enstrophy(w: np.ndarray) -> float:
    """||W||_F^2 = sum |omega_lm|^2 (positive convention for Tr(WW))."""
    return float(np.linalg.norm(w) ** 2)


def casimirs(w: np.ndarray, kmax: int = 4) -> list[float]:
    """Tr(W^k) for k = 2..kmax; odd powers report the imaginary part."""
    if kmax < 2:
        raise ValueError("kmax must be at least 2")
    out = []
    pw = w @ w
    for k in range(2, kmax + 1):
        tr = np.trace(pw)
        out.append(float(tr.real if k % 2 == 0 else tr.imag))
        if k < kmax:
            pw = pw @ w
    return out


def spectrum(w: np.ndarray) -> np.ndarray:
    """Imaginary parts of the eigenvalues, sorted ascending."""
    return np.sort(np.linalg.eigvalsh(w / 1j))


def spectrum_drift(w: np.ndarray, reference: np.ndarray) -> float:
    """Max deviation of the sorted spectrum, relative to the initial radius."""
    radius = np.abs(reference).max()
    if radius == 0:
        return float(np.abs(spectrum(w)).max())
    return float(np.abs(spectrum(w) - reference).max() / radius)


def nide_rates(
    w: np.ndarray, nide_op: NideOperator, fact: LaplaceFactorization
) -> tuple[float, float]:
    """Instantaneous (dE/dt, dS/dt) along the pure dissipation flow dW/dt = Lambda W."""
    lw = nide_op(w)
    p = solve_stream(w, fact)
    ds_dt = float(2.0 * np.trace(w.conj().T @ lw).real)
    de_dt = float(-np.trace(p.conj().T @ lw).real)
    return de_dt, ds_dt


@dataclass(frozen=True)
class ScalingNorms:
    c_l2: float
    alpha_inf: float
    regime: str  # "vanishing" (a <= 1) or "non_vanishing" (a > 1)


def scaling_norms(a: float, m_max: int, nu_salt: float) -> ScalingNorms:
    """l2 norm of {c_lm} and the sup-norm sqrt(2 nu_salt)/||c|| of the alphas."""
    ls = np.arange(1, m_max + 1)
    c_l2 = float(np.sqrt(((2 * ls + 1) / (ls + 1.0) ** (2 * a)).sum()))
    alpha_inf = float(np.sqrt(2.0 * nu_salt) / c_l2)
    return ScalingNorms(
        c_l2=c_l2,
        alpha_inf=alpha_inf,
        regime="vanishing" if a <= 1 else "non_vanishing",
    )


def sample_diagnostics(
    t: float,
    w: np.ndarray,
    fact: LaplaceFactorization,
    reference_spectrum: np.ndarray,
    kmax: int = 4,
) -> DiagnosticsSample:
    return DiagnosticsSample(
        t=t,
        energy=energy(w, fact),
        enstrophy=enstrophy(w),
        casimirs=tuple(casimirs(w, kmax)),
        spectrum_drift=spectrum_drift(w, reference_spectrum),
    )
