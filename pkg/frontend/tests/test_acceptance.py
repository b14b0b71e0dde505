"""End-to-end figure pipeline over the solver CLI's output files."""

import shutil
import subprocess

import pytest

from zsph_plots import FigureSpec, read_grid, read_manifest, read_series
from zsph_plots.figures import render_snapshot, render_timeseries

from conftest import ACCEPTANCE_LINES


def record(num, ok, detail):
    ACCEPTANCE_LINES.append(
        f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    )
    assert ok, f"criterion {num}: {detail}"


needs_solver = pytest.mark.skipif(
    shutil.which("zsph") is None, reason="solver CLI not installed"
)


def run(cmd):
    result = subprocess.run(cmd, capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    return result


@needs_solver
def test_criterion_11_figure_pipeline(tmp_path):
    cache = tmp_path / "cache"
    out = tmp_path / "fig2"
    run(["zsph", "basis", "--n", "64", "--cache-dir", str(cache)])
    run(
        [
            "zsph", "ensemble", "--preset", "paper-fig2", "--n", "64",
            "--dt", "0.02", "--t-end", "0.1", "--realizations", "2",
            "--nu-salt", "0.5", "--cache-dir", str(cache), "--out", str(out),
        ]
    )
    rows = read_manifest(out / "manifest.csv")

    groups = {}
    for row in sorted(rows, key=lambda r: (r["a"], r["m_max"])):
        groups.setdefault(f"a = {row['a']:g}", []).append(
            read_series(row["summary"], f"M={row['m_max']}")
        )
    fig_path = tmp_path / "fig2.png"
    fig = render_timeseries(
        FigureSpec(groups=groups, out=str(fig_path), std_band=True)
    )
    panel_axes = [ax for ax in fig.axes if ax.get_subplotspec() is not None]
    layout_ok = len(groups) == 2 and len(panel_axes) == 4
    counts_ok = all(
        len(ax.lines) == len(rows) // len(groups) for ax in panel_axes
    )

    sim = tmp_path / "sim"
    run(
        [
            "zsph", "simulate", "--model", "euler", "--n", "64", "--dt", "0.02",
            "--t-end", "0.1", "--cache-dir", str(cache), "--out", str(sim),
            "--snapshots-every", "2",
        ]
    )
    snaps = sorted(sim.glob("snapshot_*.zgrd"))
    snap_path = tmp_path / "snapshots.png"
    snap_fig = render_snapshot([read_grid(p) for p in snaps], str(snap_path))
    row_ok = (
        len(snaps) >= 2
        and len([ax for ax in snap_fig.axes if ax.name == "hammer"]) == len(snaps)
        and snap_path.exists()
    )

    ok = layout_ok and counts_ok and fig_path.exists() and row_ok
    record(
        11,
        ok,
        f"2x2 time-series layout from {len(rows)}-run manifest: {layout_ok}, "
        f"curve counts match: {counts_ok}; snapshot row with {len(snaps)} "
        f"panels: {row_ok}",
    )
