"""Figure rendering for the spherical-flow solver's output files."""

from .figures import FigureSpec, render_snapshot, render_timeseries
from .io import Grid, InputError, Series, read_grid, read_manifest, read_series

__version__ = "0.1.0"
