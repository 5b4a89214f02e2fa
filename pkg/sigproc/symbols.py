"""
Symbol-center integration and relative-error statistics
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from sigproc.trace import Trace
from utils.errors import EmptyWindowError, LengthMismatchError, ZeroReferenceError
from utils.exporter import dataframe_to_csv, write_text

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_FRACTION = 0.2
DEFAULT_BINS = 50
_EDGE_EPS = 1e-9  # sample-position slack for exact window edges


def integration_window(baud: float, window_fraction: float = DEFAULT_WINDOW_FRACTION) -> float:
    """Integration window length in seconds"""
    return window_fraction / baud


def integrate_symbols(trace: Trace, baud: float, window_fraction: float = DEFAULT_WINDOW_FRACTION,
                      t_start: Optional[float] = None) -> np.ndarray:
    """
    Mean amplitude over a centered window of each symbol period

    Symbol k occupies [t_start + k/baud, t_start + (k+1)/baud); its window is
    the half-open interval of length window_fraction/baud around the center.

    Args:
        trace: input waveform
        baud: symbol rate
        window_fraction: window length as a fraction of the symbol period
        t_start: time of the first symbol boundary (default: trace.t0)

    Returns:
        floor(duration * baud) per-symbol amplitudes

    Raises:
        EmptyWindowError: the window is shorter than one sample
    """
    if not 0 < window_fraction <= 1:
        raise ValueError(f"window_fraction must lie in (0, 1], got {window_fraction}")
    sps = trace.sample_rate / baud
    half = 0.5 * window_fraction * sps
    if 2 * half < 1.0 - _EDGE_EPS:
        raise EmptyWindowError(
            f"{window_fraction:g} of a symbol is {2 * half:.3g} samples at {sps:.4g} samples/symbol"
        )

    offset = 0.0 if t_start is None else (t_start - trace.t0) * trace.sample_rate
    n_symbols = int(math.floor((len(trace) - offset) / sps + _EDGE_EPS))
    if n_symbols < 1:
        raise EmptyWindowError(f"Trace of {len(trace)} samples spans no complete symbol")

    centers = offset + (np.arange(n_symbols) + 0.5) * sps
    lo = np.ceil(centers - half - _EDGE_EPS).astype(int)
    hi = np.minimum(np.ceil(centers + half - _EDGE_EPS).astype(int), len(trace))
    lo = np.maximum(lo, 0)
    if np.any(hi <= lo):
        raise EmptyWindowError("An integration window contains no sample")

    cumulative = np.concatenate([[0.0], np.cumsum(trace.samples)])
    return (cumulative[hi] - cumulative[lo]) / (hi - lo)


@dataclass(frozen=True, eq=False)
class ErrorStats:
    errors: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    sigma_hat: float
    mean: float

    @property
    def n(self) -> int:
        return int(self.errors.size)

    def histogram_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'bin_lo': self.bin_edges[:-1], 'bin_hi': self.bin_edges[1:], 'count': self.counts,
        })

    def summary_line(self) -> str:
        return f"# symbols={self.n},mean={self.mean:.17g},sigma_hat={self.sigma_hat:.17g}"


def error_stats(measured: Sequence[float], reference: Sequence[float], bins: int = DEFAULT_BINS,
                per_symbol: bool = False) -> ErrorStats:
    """
    Relative error (measured - reference) / max(reference) with histogram

    Args:
        measured, reference: equal-length amplitude sequences
        bins: histogram bin count
        per_symbol: normalize each error by its own reference value instead

    Raises:
        LengthMismatchError: sequences differ in length
        ZeroReferenceError: normalization scale is zero
    """
    m = np.asarray(measured, dtype=float)
    r = np.asarray(reference, dtype=float)
    if m.shape != r.shape:
        raise LengthMismatchError(f"measured has {m.size} values, reference has {r.size}")
    if m.size == 0:
        raise LengthMismatchError("error statistics need at least one symbol")

    if per_symbol:
        if np.any(r == 0):
            raise ZeroReferenceError("per-symbol normalization hit a zero reference value")
        errors = (m - r) / r
    else:
        scale = float(r.max())
        if scale == 0:
            raise ZeroReferenceError("reference maximum is zero")
        errors = (m - r) / scale

    counts, edges = np.histogram(errors, bins=bins)
    sigma_hat = float(np.std(errors, ddof=1)) if errors.size > 1 else 0.0
    stats = ErrorStats(errors=errors, bin_edges=edges, counts=counts,
                       sigma_hat=sigma_hat, mean=float(errors.mean()))
    logger.info(f"Relative error over {stats.n} symbols: mean={stats.mean:.4g} sigma_hat={sigma_hat:.4g}")
    return stats


def save_error_stats(stats: ErrorStats, path: Union[str, Path]) -> dict:
    """Histogram CSV `bin_lo,bin_hi,count` followed by a `#` summary line"""
    text = dataframe_to_csv(stats.histogram_frame()) + stats.summary_line() + '\n'
    return write_text(text, path)
