"""
Time-domain traces and their CSV form (`time_s,amplitude`)
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from utils.errors import NonUniformSamplingError, ParseError
from utils.exporter import write_dataframe

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ('time_s', 'amplitude')
MAX_STEP_JITTER = 1e-3  # relative deviation from the median time step


@dataclass(frozen=True, eq=False)
class Trace:
    """
    Uniformly sampled waveform

    Args:
        samples: amplitude sequence
        sample_rate: samples per second
        t0: time of the first sample (s)
    """

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError(f"Trace samples must be one-dimensional, got shape {samples.shape}")
        if not self.sample_rate > 0:
            raise ValueError(f"Sample rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("Trace samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    def with_samples(self, samples: np.ndarray) -> 'Trace':
        return Trace(samples, self.sample_rate, self.t0)


def trace_frame(trace: Trace) -> pd.DataFrame:
    return pd.DataFrame({TRACE_COLUMNS[0]: trace.times, TRACE_COLUMNS[1]: trace.samples})


def save_trace(trace: Trace, path: Union[str, Path]) -> dict:
    return write_dataframe(trace_frame(trace), path)


def load_trace(path: Union[str, Path]) -> Trace:
    """
    Read a `time_s,amplitude` CSV

    The sample rate is the reciprocal of the median time step; steps deviating
    from it by more than 0.1% are rejected.

    Raises:
        ParseError: unreadable file, wrong header or non-numeric row
        NonUniformSamplingError: time-step jitter above 0.1%
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ParseError(f"unreadable trace ({e})", str(path)) from e
    except FileNotFoundError as e:
        raise ParseError("file not found", str(path)) from e

    if tuple(frame.columns) != TRACE_COLUMNS:
        raise ParseError(f"expected header {','.join(TRACE_COLUMNS)}", str(path), 1)
    numeric = frame.apply(pd.to_numeric, errors='coerce')
    bad = numeric.isna().any(axis=1).to_numpy()
    if bad.any():
        raise ParseError("non-numeric value", str(path), int(np.flatnonzero(bad)[0]) + 2)
    if len(numeric) < 2:
        raise ParseError("a trace needs at least two samples to infer its rate", str(path))

    t = numeric[TRACE_COLUMNS[0]].to_numpy(dtype=float)
    steps = np.diff(t)
    step = float(np.median(steps))
    if not step > 0:
        raise NonUniformSamplingError(f"{path}: time column is not increasing")
    jitter = np.abs(steps - step) / step
    if np.any(jitter > MAX_STEP_JITTER):
        worst = int(np.argmax(jitter))
        raise NonUniformSamplingError(
            f"{path}: time step {steps[worst]:.6g} s at line {worst + 3} deviates "
            f"{100 * jitter[worst]:.3g}% from the median step {step:.6g} s"
        )

    trace = Trace(numeric[TRACE_COLUMNS[1]].to_numpy(dtype=float), 1.0 / step, float(t[0]))
    logger.info(f"Loaded trace {path}: {len(trace)} samples at {trace.sample_rate:.6g} S/s")
    return trace
