"""Readers for the solver's CSV and binary grid output formats."""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TIMESERIES_COLUMNS = [
    "t",
    "energy",
    "enstrophy",
    "casimir2",
    "casimir3",
    "casimir4",
    "spectrum_drift",
]
SUMMARY_COLUMNS = [
    "t",
    "energy_mean",
    "energy_std",
    "enstrophy_mean",
    "enstrophy_std",
    "n_realizations",
]

GRID_MAGIC = b"ZGRD"


class InputError(Exception):
    """Raised when an input file does not match the expected schema."""


@dataclass
class Series:
    """One curve set: either a single trajectory or an ensemble summary."""

    label: str
    t: np.ndarray
    energy: np.ndarray
    enstrophy: np.ndarray
    energy_std: np.ndarray | None = None
    enstrophy_std: np.ndarray | None = None

    @property
    def is_summary(self) -> bool:
        return self.energy_std is not None


@dataclass
class Grid:
    nlat: int
    nlon: int
    values: np.ndarray
    time: float


def _read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        rows = [[float(x) for x in row] for row in reader if row]
    if header is None or not rows:
        raise InputError(f"{path}: empty CSV")
    return header, np.array(rows)


def read_series(path, label: str | None = None) -> Series:
    """Load a trajectory or summary CSV, detected by its header."""
    header, data = _read_csv(path)
    label = label or Path(path).stem
    if header == TIMESERIES_COLUMNS:
        return Series(
            label=label, t=data[:, 0], energy=data[:, 1], enstrophy=data[:, 2]
        )
    if header == SUMMARY_COLUMNS:
        return Series(
            label=label,
            t=data[:, 0],
            energy=data[:, 1],
            enstrophy=data[:, 3],
            energy_std=data[:, 2],
            enstrophy_std=data[:, 4],
        )
    expected = set(TIMESERIES_COLUMNS) | set(SUMMARY_COLUMNS)
    bad = [c for c in header if c not in expected] or header
    raise InputError(f"{path}: unrecognized columns {bad}")


def read_manifest(path) -> list[dict]:
    """Run manifest: label, model, a, m_max, summary (path relative to it)."""
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    required = {"label", "model", "a", "m_max", "summary"}
    if not rows or not required.issubset(rows[0].keys()):
        raise InputError(f"{path}: manifest needs columns {sorted(required)}")
    base = Path(path).parent
    for row in rows:
        row["a"] = float(row["a"])
        row["m_max"] = int(row["m_max"])
        row["summary"] = str(base / row["summary"])
    return rows


def read_grid(path) -> Grid:
    """ZGRD: magic, u32 version, u32 nlat, u32 nlon, f64 time, f64 values."""
    with open(path, "rb") as f:
        header = f.read(24)
        if len(header) < 24 or header[:4] != GRID_MAGIC:
            raise InputError(f"{path}: not a grid snapshot file")
        version, nlat, nlon, time = struct.unpack("<IIId", header[4:])
        if version != 1:
            raise InputError(f"{path}: unsupported grid version {version}")
        values = np.fromfile(f, dtype="<f8", count=nlat * nlon)
    if values.size != nlat * nlon:
        raise InputError(f"{path}: truncated grid payload")
    return Grid(nlat=nlat, nlon=nlon, values=values.reshape(nlat, nlon), time=time)
