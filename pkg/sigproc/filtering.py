"""
Low-pass filtering and decimation of traces
"""

import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np
import scipy.signal

from sigproc.trace import Trace
from utils.errors import CutoffAboveNyquistError, ZeroFactorError

logger = logging.getLogger(__name__)

DEFAULT_TAPS = 129
CUTOFF_PER_BAUD = 1.2
TARGET_SPS = 20

# Measured symbol rate -> FIR cutoff
MEASUREMENT_CUTOFFS: Dict[float, float] = {
    10e9: 12e9,
    1e9: 1.2e9,
    100e6: 120e6,
}


@dataclass(frozen=True)
class FirSpec:
    """
    Windowed-sinc low-pass design

    Args:
        cutoff: -6 dB frequency (Hz)
        taps: odd tap count (linear phase, integer group delay)
        window: scipy.signal window name
    """

    cutoff: float
    taps: int = DEFAULT_TAPS
    window: str = 'hamming'

    def __post_init__(self):
        if self.taps < 1 or self.taps % 2 == 0:
            raise ValueError(f"FIR tap count must be odd and positive, got {self.taps}")
        if not self.cutoff > 0:
            raise ValueError(f"FIR cutoff must be positive, got {self.cutoff}")

    @classmethod
    def for_baud(cls, baud: float, taps: int = DEFAULT_TAPS) -> 'FirSpec':
        return cls(cutoff=CUTOFF_PER_BAUD * baud, taps=taps)

    def design(self, sample_rate: float) -> np.ndarray:
        """Symmetric taps with unit DC gain"""
        if self.cutoff >= sample_rate / 2:
            raise CutoffAboveNyquistError(
                f"Cutoff {self.cutoff:.6g} Hz is not below Nyquist ({sample_rate / 2:.6g} Hz)"
            )
        return scipy.signal.firwin(self.taps, self.cutoff, window=self.window, fs=sample_rate)


def fir_lowpass(trace: Trace, spec: FirSpec) -> Trace:
    """
    Zero-delay FIR low-pass

    The trace is reflect-padded by half the tap count on both sides and
    convolved in 'valid' mode, so output sample m lines up with input sample m
    and the length is preserved.
    """
    taps = spec.design(trace.sample_rate)
    half = spec.taps // 2
    padded = np.pad(trace.samples, half, mode='reflect') if half else trace.samples
    filtered = np.convolve(padded, taps, mode='valid')
    logger.debug(f"FIR {spec.taps} taps, cutoff {spec.cutoff:.4g} Hz on {len(trace)} samples")
    return trace.with_samples(filtered)


def frequency_response(spec: FirSpec, sample_rate: float, freqs: np.ndarray) -> np.ndarray:
    """Complex response of the designed taps at the given frequencies (Hz)"""
    _, h = scipy.signal.freqz(spec.design(sample_rate), worN=np.asarray(freqs, dtype=float), fs=sample_rate)
    return h


def decimate(trace: Trace, factor: int) -> Trace:
    """
    Keep every factor-th sample; trailing remainder samples are dropped

    Raises:
        ZeroFactorError: factor < 1
    """
    if int(factor) != factor or factor < 1:
        raise ZeroFactorError(f"Decimation factor must be a positive integer, got {factor}")
    factor = int(factor)
    if factor == 1:
        return trace
    kept = (len(trace) // factor) * factor
    return Trace(trace.samples[:kept:factor], trace.sample_rate / factor, trace.t0)


def decimation_factor(sample_rate: float, baud: float, target_sps: int = TARGET_SPS) -> int:
    """Integer factor bringing a trace closest to target_sps samples per symbol"""
    return max(1, int(round(sample_rate / (baud * target_sps))))
