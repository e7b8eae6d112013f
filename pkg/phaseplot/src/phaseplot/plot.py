"""Convergence-frequency heatmaps from completion sweep CSVs.

Input is the sweep CSV schema

    d,N,M,r,l,omega,trial,seed,algorithm,converged,test_rel_err,iters,seconds

with ``#`` comment lines.  A plot places two of the grid columns on the x
and y axes, optionally facets on a third, and colors each cell by the
fraction of converged trials.  The reduction is the same as the sweep
summary tool's: group rows by cell, frequency = sum(converged) / count.
Any remaining grid column that still varies inside a cell makes the plot
ambiguous and is rejected rather than silently averaged over.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

SCHEMA_COLUMNS = ("d", "N", "M", "r", "l", "omega", "trial", "seed", "algorithm",
                  "converged", "test_rel_err", "iters", "seconds")
GRID_COLUMNS = ("d", "N", "M", "r", "l", "omega", "algorithm")


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: axes, optional facet, output path, color bounds."""

    csv: str
    x: str
    y: str
    facet: Optional[str] = None
    out: str = "phase.png"
    vmin: float = 0.0
    vmax: float = 1.0

    def __post_init__(self):
        used = [self.x, self.y] + ([self.facet] if self.facet else [])
        for col in used:
            if col not in GRID_COLUMNS:
                raise ValueError(f"column {col!r} is not a grid column; "
                                 f"expected one of {GRID_COLUMNS}")
        if len(set(used)) != len(used):
            raise ValueError(f"x, y and facet must be distinct, got {used}")
        if not 0.0 <= self.vmin < self.vmax <= 1.0:
            raise ValueError(f"color bounds must satisfy 0 <= vmin < vmax <= 1, "
                             f"got [{self.vmin}, {self.vmax}]")


def read_sweep(path) -> pd.DataFrame:
    """Load a sweep CSV, skipping comment lines and validating the schema."""
    try:
        df = pd.read_csv(path, comment="#")
    except pd.errors.EmptyDataError:
        raise ValueError(f"{path} is empty")
    missing = [c for c in SCHEMA_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"{path} is missing columns {missing}")
    if df.empty:
        raise ValueError(f"{path} has no data rows")
    return df


def frequency_table(df: pd.DataFrame, keys: list[str]) -> pd.DataFrame:
    """Convergence frequency per key group: sum(converged) / trial count."""
    grouped = df.groupby(keys, sort=True)["converged"]
    out = grouped.sum().astype(float) / grouped.count().astype(float)
    return out.reset_index(name="frequency")


def _check_unambiguous(df: pd.DataFrame, used: list[str]) -> None:
    rest = [c for c in GRID_COLUMNS if c not in used]
    cells = df.groupby(used, sort=False)
    for col in rest:
        if (cells[col].nunique() > 1).any():
            raise ValueError(
                f"column {col!r} varies within a plot cell; add it as a "
                f"facet or filter the CSV")


def panel_grids(spec: PlotSpec):
    """The plotted numbers: {facet value: (xs, ys, frequency grid)}.

    The grid has shape (len(ys), len(xs)); missing cells are NaN.
    """
    df = read_sweep(spec.csv)
    used = [spec.x, spec.y] + ([spec.facet] if spec.facet else [])
    _check_unambiguous(df, used)
    freq = frequency_table(df, used)

    facets = sorted(freq[spec.facet].unique()) if spec.facet else [None]
    panels = {}
    for value in facets:
        part = freq if value is None else freq[freq[spec.facet] == value]
        xs = sorted(part[spec.x].unique())
        ys = sorted(part[spec.y].unique())
        grid = np.full((len(ys), len(xs)), np.nan)
        for _, row in part.iterrows():
            grid[ys.index(row[spec.y]), xs.index(row[spec.x])] = row["frequency"]
        panels[value] = (xs, ys, grid)
    return panels


def render(spec: PlotSpec) -> Path:
    """Draw the heatmap(s) and write the image file."""
    panels = panel_grids(spec)
    n = len(panels)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n + 1.2, 4.0), squeeze=False)
    for ax, (value, (xs, ys, grid)) in zip(axes[0], panels.items()):
        im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis",
                       vmin=spec.vmin, vmax=spec.vmax)
        ax.set_xticks(range(len(xs)), [str(v) for v in xs])
        ax.set_yticks(range(len(ys)), [str(v) for v in ys])
        ax.set_xlabel(spec.x)
        ax.set_ylabel(spec.y)
        if value is not None:
            ax.set_title(f"{spec.facet} = {value}")
        for i in range(len(ys)):
            for j in range(len(xs)):
                if not np.isnan(grid[i, j]):
                    ax.text(j, i, f"{grid[i, j]:.2f}", ha="center", va="center",
                            color="white" if grid[i, j] < 0.6 else "black",
                            fontsize=8)
    fig.colorbar(im, ax=[a for a in axes[0]], label="converged frequency",
                 fraction=0.05)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
