"""
Transfer-curve sample files
Two-column CSV with header `voltage_V,transmission`, one pair per line.
"""

import logging
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from mzm.config import SAMPLE_COLUMNS
from mzm.transfer import SineTransferModel, transmission
from utils.errors import ParseError
from utils.exporter import write_dataframe

logger = logging.getLogger(__name__)

_PANDAS_LINE = re.compile(r'line (\d+)')


def load_transfer_samples(path: Union[str, Path]) -> np.ndarray:
    """
    Read a transfer-curve CSV into an (N, 2) float array

    Raises:
        ParseError: missing/extra columns, wrong header or a non-numeric value,
            naming the offending 1-based line
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True, keep_default_na=False)
    except pd.errors.ParserError as e:
        match = _PANDAS_LINE.search(str(e))
        raise ParseError(f"malformed row ({e})", str(path), int(match.group(1)) if match else 0) from e
    except pd.errors.EmptyDataError as e:
        raise ParseError("file is empty", str(path), 1) from e

    if tuple(c.strip() for c in frame.columns) != SAMPLE_COLUMNS:
        raise ParseError(
            f"expected header {','.join(SAMPLE_COLUMNS)}, got {','.join(map(str, frame.columns))}",
            str(path), 1,
        )

    numeric = frame.apply(pd.to_numeric, errors='coerce')
    bad = numeric.isna().any(axis=1) | ~np.isfinite(numeric.to_numpy(dtype=float)).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise ParseError(
            f"non-numeric value {frame.iloc[row].tolist()}", str(path), row + 2
        )
    if numeric.empty:
        raise ParseError("no samples after the header", str(path), 2)

    logger.info(f"Loaded {len(numeric)} transfer samples from {path}")
    return numeric.to_numpy(dtype=float)


def save_transfer_samples(samples: np.ndarray, path: Union[str, Path]) -> dict:
    """Write samples in the transfer-curve CSV format (17 significant digits)"""
    arr = np.asarray(samples, dtype=float)
    frame = pd.DataFrame({SAMPLE_COLUMNS[0]: arr[:, 0], SAMPLE_COLUMNS[1]: arr[:, 1]})
    return write_dataframe(frame, path)


def synthesize_transfer_samples(model: SineTransferModel, n: int,
                                v_min: Optional[float] = None, v_max: Optional[float] = None,
                                sigma: float = 0.0,
                                rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Evenly spaced samples of the model with optional Gaussian perturbation

    Args:
        model: curve to sample
        n: sample count
        v_min, v_max: voltage span (default: the model window)
        sigma: standard deviation of additive Gaussian noise
        rng: random source, required when sigma > 0
    """
    lo = model.window.v_min if v_min is None else v_min
    hi = model.window.v_max if v_max is None else v_max
    v = np.linspace(lo, hi, n)
    t = transmission(model, v)
    if sigma > 0:
        if rng is None:
            raise ValueError("sigma > 0 needs a random generator")
        t = t + rng.normal(0.0, sigma, size=n)
    return np.column_stack([v, t])
