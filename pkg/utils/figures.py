"""
SVG figures
Minimal line, histogram and scatter plots rendered from the same DataFrames
the commands write as CSV. Output is byte-stable unless a timestamp is asked for.
"""

import io
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Union

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from utils.errors import FigureError  # noqa: E402
from utils.exporter import write_bytes  # noqa: E402

logger = logging.getLogger(__name__)

SVG_HASH_SALT = 'eoattn'
FIGURE_SIZE = (6.4, 4.0)


class PlotKind(str, Enum):
    LINE = 'line'
    HISTOGRAM = 'histogram'
    SCATTER = 'scatter'


@dataclass(frozen=True)
class Series:
    """
    One plotted series

    Args:
        y: column holding y values (bin counts for histograms)
        x: column holding x values (bin lower edges for histograms)
        label: legend entry
        where: column -> value filter selecting this series' rows
        x_hi: upper bin edge column (histograms only)
    """

    y: str
    x: str
    label: str = ''
    where: Dict[str, object] = field(default_factory=dict)
    x_hi: Optional[str] = None


@dataclass(frozen=True)
class FigureSpec:
    kind: PlotKind
    series: List[Series]
    title: str = ''
    x_label: str = ''
    y_label: str = ''
    x_log: bool = False
    y_log: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'kind', PlotKind(self.kind))
        if not self.series:
            raise FigureError("A figure needs at least one series")


def _select(frame: pd.DataFrame, series: Series) -> pd.DataFrame:
    columns = [series.x, series.y] + list(series.where) + ([series.x_hi] if series.x_hi else [])
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise FigureError(f"Series '{series.label or series.y}' references missing columns: {', '.join(missing)}")
    rows = frame
    for column, value in series.where.items():
        rows = rows[rows[column] == value]
    return rows


def _check_log(values: np.ndarray, axis: str, label: str) -> None:
    if values.size and not np.all(values > 0):
        raise FigureError(f"Log-scale {axis} axis needs positive data (series '{label}')")


def render_svg(spec: FigureSpec, frame: pd.DataFrame, timestamp: bool = False) -> bytes:
    """
    Render a figure to SVG bytes

    Args:
        spec: plot description
        frame: data the series refer to
        timestamp: embed the creation date in the SVG metadata

    Raises:
        FigureError: unresolved column references or non-positive data on a log axis
    """
    selections = [(s, _select(frame, s)) for s in spec.series]
    for s, rows in selections:
        label = s.label or s.y
        if spec.x_log:
            _check_log(rows[s.x].to_numpy(dtype=float), 'x', label)
        if spec.y_log and spec.kind is not PlotKind.HISTOGRAM:
            _check_log(rows[s.y].to_numpy(dtype=float), 'y', label)

    metadata = {'Date': datetime.now(timezone.utc).isoformat() if timestamp else None}
    with plt.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'path'}):
        fig, ax = plt.subplots(figsize=FIGURE_SIZE)
        try:
            for s, rows in selections:
                x = rows[s.x].to_numpy(dtype=float)
                y = rows[s.y].to_numpy(dtype=float)
                label = s.label or s.y
                if spec.kind is PlotKind.LINE:
                    ax.plot(x, y, marker='o', markersize=3, label=label)
                elif spec.kind is PlotKind.SCATTER:
                    ax.scatter(x, y, s=4, label=label)
                else:
                    widths = rows[s.x_hi].to_numpy(dtype=float) - x if s.x_hi else None
                    ax.bar(x, y, width=widths, align='edge', label=label, alpha=0.8)
            if spec.x_log:
                ax.set_xscale('log')
            if spec.y_log:
                ax.set_yscale('log')
            ax.set_xlabel(spec.x_label)
            ax.set_ylabel(spec.y_label)
            if spec.title:
                ax.set_title(spec.title)
            if len(spec.series) > 1:
                ax.legend()
            ax.grid(True, alpha=0.3)
            fig.tight_layout()

            buffer = io.BytesIO()
            fig.savefig(buffer, format='svg', metadata=metadata)
        finally:
            plt.close(fig)
    return buffer.getvalue()


def save_figure(spec: FigureSpec, frame: pd.DataFrame, path: Union[str, Path], timestamp: bool = False) -> dict:
    result = write_bytes(render_svg(spec, frame, timestamp), path)
    logger.debug(f"Figure {spec.kind.value} with {len(spec.series)} series -> {path}")
    return result
