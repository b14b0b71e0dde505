"""Time-series panels and global snapshot maps from solver output files."""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import Grid, InputError, Series


@dataclass
class FigureSpec:
    """Curves grouped into columns (one column per noise exponent a)."""

    groups: dict[str, list[Series]]
    out: str
    normalize: bool = False
    std_band: bool = False

    def __post_init__(self):
        if not self.groups or not any(self.groups.values()):
            raise InputError("figure needs at least one input series")
        for name, series in self.groups.items():
            labels = [s.label for s in series]
            if len(set(labels)) != len(labels):
                raise InputError(f"duplicate labels in column {name!r}: {labels}")


def _plot_curves(ax, series_list, quantity, normalize, std_band):
    for s in series_list:
        y = getattr(s, quantity)
        std = getattr(s, quantity + "_std") if s.is_summary else None
        scale = y[0] if normalize and y[0] != 0 else 1.0
        ax.plot(s.t, y / scale, label=s.label, linewidth=1.2)
        if std_band and std is not None:
            ax.fill_between(
                s.t, (y - std) / scale, (y + std) / scale, alpha=0.25
            )
    ax.set_xlabel("t")
    ax.legend(fontsize=7)


def render_timeseries(spec: FigureSpec):
    """Energy (top row) and enstrophy (bottom row), one column per group.

    Returns the matplotlib figure after writing it to ``spec.out``.
    """
    columns = list(spec.groups)
    ncol = len(columns)
    fig, axes = plt.subplots(
        2, ncol, figsize=(5.0 * ncol, 6.5), squeeze=False, sharex="col"
    )
    for j, name in enumerate(columns):
        series_list = spec.groups[name]
        _plot_curves(axes[0][j], series_list, "energy", spec.normalize, spec.std_band)
        _plot_curves(
            axes[1][j], series_list, "enstrophy", spec.normalize, spec.std_band
        )
        axes[0][j].set_title(name)
    suffix = " / initial value" if spec.normalize else ""
    axes[0][0].set_ylabel("energy" + suffix)
    axes[1][0].set_ylabel("enstrophy" + suffix)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    return fig


def render_snapshot(grids: list[Grid], out: str, titles: list[str] | None = None):
    """Row of equal-area global maps with a symmetric diverging color scale.

    Returns the matplotlib figure after writing it to ``out``.
    """
    if not grids:
        raise InputError("snapshot figure needs at least one grid")
    titles = titles or [f"t = {g.time:g}" for g in grids]
    n = len(grids)
    fig, axes = plt.subplots(
        1,
        n,
        figsize=(4.5 * n, 3.0),
        squeeze=False,
        subplot_kw={"projection": "hammer"},
    )
    vmax = max(np.abs(g.values).max() for g in grids) or 1.0
    for ax, grid, title in zip(axes[0], grids, titles):
        # colatitude (0, pi) -> latitude, longitude [0, 2pi) -> [-pi, pi)
        lat = np.pi / 2.0 - np.pi * (np.arange(grid.nlat) + 0.5) / grid.nlat
        lon = 2.0 * np.pi * np.arange(grid.nlon) / grid.nlon
        lon = np.where(lon >= np.pi, lon - 2.0 * np.pi, lon)
        order = np.argsort(lon)
        mesh = ax.pcolormesh(
            lon[order],
            lat,
            grid.values[:, order],
            cmap="RdBu_r",
            vmin=-vmax,
            vmax=vmax,
            shading="auto",
        )
        ax.set_title(title, fontsize=9)
        ax.grid(alpha=0.2)
        ax.tick_params(labelsize=5)
    fig.colorbar(mesh, ax=axes[0].tolist(), shrink=0.8)
    fig.savefig(out, dpi=150)
    return fig
