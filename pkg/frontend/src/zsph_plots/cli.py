"""Command-line figure rendering for solver output files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FigureSpec, render_snapshot, render_timeseries
from .io import InputError, read_grid, read_manifest, read_series


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zsph-plots", description="Render figures from solver output files"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    ts = sub.add_parser("timeseries", help="energy/enstrophy panels from CSVs")
    ts.add_argument("--inputs", nargs="+", required=True, help="series or summary CSVs")
    ts.add_argument("--labels", nargs="+", help="one label per input")
    ts.add_argument("--out", required=True, help="output image path")
    ts.add_argument("--normalize", action="store_true", help="divide by value at t=0")
    ts.add_argument("--std-band", action="store_true", help="shade +-1 std for summaries")

    fig2 = sub.add_parser("fig2", help="2x2 panels from an experiment manifest")
    fig2.add_argument("--inputs", required=True, help="manifest.csv path")
    fig2.add_argument("--out", required=True)
    fig2.add_argument("--normalize", action="store_true")
    fig2.add_argument("--std-band", action="store_true")

    snap = sub.add_parser("snapshot", help="global maps from grid files")
    snap.add_argument("--inputs", nargs="+", required=True, help="ZGRD files")
    snap.add_argument("--labels", nargs="+", help="one title per input")
    snap.add_argument("--out", required=True)
    return parser


def _labels_for(args, count: int) -> list[str] | None:
    if args.labels is None:
        return None
    if len(args.labels) != count:
        raise InputError(
            f"got {len(args.labels)} labels for {count} inputs"
        )
    return args.labels


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "timeseries":
            labels = _labels_for(args, len(args.inputs))
            series = [
                read_series(p, labels[i] if labels else None)
                for i, p in enumerate(args.inputs)
            ]
            spec = FigureSpec(
                groups={"": series},
                out=args.out,
                normalize=args.normalize,
                std_band=args.std_band,
            )
            render_timeseries(spec)
        elif args.subcommand == "fig2":
            rows = read_manifest(args.inputs)
            groups: dict[str, list] = {}
            for row in sorted(rows, key=lambda r: (r["a"], r["m_max"])):
                name = f"a = {row['a']:g}"
                groups.setdefault(name, []).append(
                    read_series(row["summary"], f"{row['model']} M={row['m_max']}")
                )
            spec = FigureSpec(
                groups=groups,
                out=args.out,
                normalize=args.normalize,
                std_band=args.std_band,
            )
            render_timeseries(spec)
        elif args.subcommand == "snapshot":
            labels = _labels_for(args, len(args.inputs))
            grids = [read_grid(p) for p in args.inputs]
            render_snapshot(grids, args.out, titles=labels)
        print(f"wrote {args.out}")
        return 0
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
