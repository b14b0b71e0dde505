import csv
import struct

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

TIMESERIES_HEADER = [
    "t",
    "energy",
    "enstrophy",
    "casimir2",
    "casimir3",
    "casimir4",
    "spectrum_drift",
]
SUMMARY_HEADER = [
    "t",
    "energy_mean",
    "energy_std",
    "enstrophy_mean",
    "enstrophy_std",
    "n_realizations",
]


def write_timeseries(path, t, energy, enstrophy):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TIMESERIES_HEADER)
        for i in range(len(t)):
            writer.writerow([t[i], energy[i], enstrophy[i], -1.0, 0.0, 1.0, 0.0])


def write_summary(path, t, e_mean, e_std, s_mean, s_std, n=10):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SUMMARY_HEADER)
        for i in range(len(t)):
            writer.writerow([t[i], e_mean[i], e_std[i], s_mean[i], s_std[i], n])


def write_grid(path, values, time=0.0, version=1):
    nlat, nlon = values.shape
    with open(path, "wb") as f:
        f.write(b"ZGRD")
        f.write(struct.pack("<IIId", version, nlat, nlon, time))
        np.asarray(values, dtype="<f8").tofile(f)


@pytest.fixture
def sample_series(tmp_path):
    t = np.linspace(0.0, 1.0, 11)
    path = tmp_path / "series.csv"
    write_timeseries(path, t, 0.5 * np.exp(-t), np.ones_like(t))
    return path


@pytest.fixture
def sample_summary(tmp_path):
    t = np.linspace(0.0, 1.0, 11)
    path = tmp_path / "summary.csv"
    write_summary(
        path, t, 0.5 * np.exp(-t), 0.05 * np.ones_like(t), 1.0 - 0.3 * t,
        0.02 * np.ones_like(t),
    )
    return path
