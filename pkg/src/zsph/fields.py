"""Initial conditions and gridded synthesis of coefficient fields.

Spherical harmonics are fully normalized (integral of |Y_lm|^2 over the
sphere is 1) with the Condon-Shortley phase, matching the sign convention of
the quantized basis.  Synthesis is direct evaluation via the standard stable
degree recurrence for normalized associated Legendre functions.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptCacheError
from .quantization import HarmonicCoefficients

GRID_MAGIC = b"ZGRD"
GRID_VERSION = 1


@dataclass
class GridField:
    """Real scalar field on a uniform colatitude-longitude grid."""

    nlat: int
    nlon: int
    values: np.ndarray  # (nlat, nlon), latitude-major
    time: float = 0.0

    @property
    def colatitudes(self) -> np.ndarray:
        return np.pi * (np.arange(self.nlat) + 0.5) / self.nlat

    @property
    def longitudes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.nlon) / self.nlon


def random_initial_condition(seed: int, l_max: int = 10) -> HarmonicCoefficients:
    """Standard-normal coefficients for degrees 1..l_max, unit enstrophy.

    Real and imaginary parts are i.i.d. N(0,1) for m = 1..l, the m = 0
    coefficient is real, negative m follows the real-field symmetry, and the
    result is scaled so sum |omega_lm|^2 = 1.
    """
    if l_max < 1:
        raise ValueError("initial condition needs l_max >= 1")
    rng = np.random.default_rng(seed)
    coeffs = HarmonicCoefficients.zeros(l_max)
    for l in range(1, l_max + 1):
        for m in range(0, l + 1):
            re = rng.standard_normal()
            im = rng.standard_normal() if m > 0 else 0.0
            coeffs.set(l, m, re + 1j * im)
            if m > 0:
                coeffs.set(l, -m, (-1) ** m * np.conj(coeffs.get(l, m)))
    coeffs.values /= np.linalg.norm(coeffs.values)
    return coeffs


def legendre_normalized(l_max: int, x: np.ndarray) -> np.ndarray:
    """Normalized associated Legendre P-bar_lm(x) for l = 0..l_max, m = 0..l.

    Output shape (l_max+1, l_max+1, len(x)); entry [l, m] is P-bar_lm.
    Includes the Condon-Shortley factor (-1)^m.  Stable to l ~ 10^3.
    """
    x = np.asarray(x, dtype=float)
    sx = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    p = np.zeros((l_max + 1, l_max + 1) + x.shape)
    p[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, l_max + 1):
        p[m, m] = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx * p[m - 1, m - 1]
    for m in range(l_max):
        p[m + 1, m] = np.sqrt(2.0 * m + 3.0) * x * p[m, m]
    for m in range(l_max + 1):
        for l in range(m + 2, l_max + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            p[l, m] = a * (x * p[l - 1, m] - b * p[l - 2, m])
    return p


def synthesize_grid(
    coeffs: HarmonicCoefficients, nlat: int, nlon: int, time: float = 0.0
) -> GridField:
    """Evaluate omega(theta, phi) = sum omega_lm Y_lm on a uniform grid."""
    if nlat < 2 or nlon < 2:
        raise ValueError("grid dimensions must be at least 2x2")
    l_max = coeffs.l_max
    theta = np.pi * (np.arange(nlat) + 0.5) / nlat
    phi = 2.0 * np.pi * np.arange(nlon) / nlon
    p = legendre_normalized(l_max, np.cos(theta))  # (L+1, L+1, nlat)

    field = np.zeros((nlat, nlon), dtype=complex)
    for m in range(-l_max, l_max + 1):
        ls = np.arange(abs(m), l_max + 1)
        cvec = coeffs.values[ls * ls + ls + m]
        if not np.any(cvec):
            continue
        # Y_{l,-m} = (-1)^m conj(Y_lm) and P-bar is real
        sign = 1.0 if m >= 0 else (-1.0) ** m
        lat_profile = sign * np.tensordot(cvec, p[ls, abs(m)], axes=(0, 0))
        field += np.outer(lat_profile, np.exp(1j * m * phi))
    max_imag = np.abs(field.imag).max()
    scale = max(np.abs(field.real).max(), 1e-300)
    if max_imag > 1e-8 * scale:
        raise ValueError("synthesized field has a non-negligible imaginary part")
    return GridField(nlat=nlat, nlon=nlon, values=field.real.copy(), time=time)


def save_grid(field: GridField, path) -> None:
    """Little-endian binary: ZGRD, u32 version, u32 nlat, u32 nlon, f64 time, data."""
    with open(path, "wb") as f:
        f.write(GRID_MAGIC)
        f.write(struct.pack("<IIId", GRID_VERSION, field.nlat, field.nlon, field.time))
        field.values.astype("<f8").tofile(f)


def load_grid(path) -> GridField:
    with open(path, "rb") as f:
        header = f.read(24)
        if len(header) < 24 or header[:4] != GRID_MAGIC:
            raise CorruptCacheError(f"{path}: bad magic or truncated header")
        version, nlat, nlon, time = struct.unpack("<IIId", header[4:])
        if version != GRID_VERSION:
            raise CorruptCacheError(f"{path}: unsupported grid version {version}")
        data = np.fromfile(f, dtype="<f8", count=nlat * nlon)
        if data.size != nlat * nlon:
            raise CorruptCacheError(f"{path}: truncated grid payload")
    return GridField(nlat=nlat, nlon=nlon, values=data.reshape(nlat, nlon), time=time)
