"""Static SVG figures from result tables.

Figures are drawn with the object-oriented matplotlib API on the Agg
backend. The SVG id salt is fixed and the date stamp removed so identical
tables give byte-identical files; the table provenance is stored in the SVG
description metadata.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Union
import json
import logging

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

from src.errors import ArgumentError, AxisError
from src.plotting.tables import Table
from src.utils.files import atomic_write

logger = logging.getLogger(__name__)

PLOT_KINDS = ("line", "scatter", "heatmap")
SVG_SALT = "localcomplexity"


def _check_log(values: np.ndarray, axis: str):
    bad = np.flatnonzero(~(values > 0))
    if len(bad):
        raise AxisError(axis, int(bad[0]), float(values[bad[0]]))


def _numeric(table: Table, name: str) -> np.ndarray:
    try:
        return table.column(name).astype(float)
    except ValueError as exc:
        raise ArgumentError(f"column {name!r} is not numeric") from exc


def emit_svg(table: Table, plot_kind: str, path: Union[str, Path], x: str, y: str,
             color: Optional[str] = None, group: Optional[str] = None,
             log_x: bool = False, log_y: bool = False, title: str = "",
             cmap: str = "viridis") -> Dict[str, Any]:
    """Write ``table`` as a line plot, colour-mapped scatter or heatmap.

    line:    one curve per distinct ``group`` value (single curve without group)
    scatter: points coloured by column ``color``
    heatmap: cells at (x, y) coloured by column ``color``
    """
    if plot_kind not in PLOT_KINDS:
        raise ArgumentError(f"plot kind must be one of {PLOT_KINDS}, got {plot_kind!r}")
    if len(table) == 0:
        raise ArgumentError("cannot plot an empty table")
    xs, ys = _numeric(table, x), _numeric(table, y)
    if log_x:
        _check_log(xs, "x")
    if log_y and plot_kind != "heatmap":
        _check_log(ys, "y")

    fig = Figure(figsize=(6.0, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    info: Dict[str, Any] = {"kind": plot_kind, "n_points": len(table), "path": str(path)}

    if plot_kind == "line":
        groups = table.column(group) if group else np.zeros(len(table))
        for value in sorted(set(groups.tolist()), key=str):
            mask = groups == value
            order = np.argsort(xs[mask], kind="stable")
            ax.plot(xs[mask][order], ys[mask][order], marker="o",
                    label=f"{group}={value}" if group else None)
        if group:
            ax.legend(frameon=False)
    else:
        if color is None:
            raise ArgumentError(f"{plot_kind} plots need a colour column")
        cs = _numeric(table, color)
        vmin, vmax = float(cs.min()), float(cs.max())
        info["color_range"] = (vmin, vmax)
        if plot_kind == "scatter":
            artist = ax.scatter(xs, ys, c=cs, cmap=cmap, vmin=vmin, vmax=vmax, s=12)
        else:
            x_vals, y_vals = np.unique(xs), np.unique(ys)
            grid = np.full((len(y_vals), len(x_vals)), np.nan)
            grid[np.searchsorted(y_vals, ys), np.searchsorted(x_vals, xs)] = cs
            artist = ax.pcolormesh(x_vals, y_vals, grid, cmap=cmap, vmin=vmin, vmax=vmax,
                                   shading="nearest")
            if log_y:
                _check_log(y_vals, "y")
        fig.colorbar(artist, ax=ax, label=color)

    if log_x:
        ax.set_xscale("log")
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    if title:
        ax.set_title(title)
    fig.tight_layout()

    metadata = {"Date": None, "Description": json.dumps(table.provenance, sort_keys=True)}

    def writer(tmp: Path):
        with matplotlib.rc_context({"svg.hashsalt": SVG_SALT}):
            with open(tmp, "wb") as handle:
                fig.savefig(handle, format="svg", metadata=metadata)

    atomic_write(path, writer)
    logger.info("wrote %s plot %s", plot_kind, path)
    return info
