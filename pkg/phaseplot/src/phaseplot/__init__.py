"""Convergence-frequency heatmaps for tensor-completion sweeps."""

from .plot import GRID_COLUMNS, SCHEMA_COLUMNS, PlotSpec, frequency_table, panel_grids, read_sweep, render

__all__ = [
    "GRID_COLUMNS",
    "SCHEMA_COLUMNS",
    "PlotSpec",
    "frequency_table",
    "panel_grids",
    "read_sweep",
    "render",
]
