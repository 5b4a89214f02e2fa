"""
Symbol waveform synthesis through a modulator transfer curve
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from activations.noise import NoiseSpec, RandomSource, apply_noise, require_rng
from mzm.transfer import AffineEncoder, SineTransferModel, transmission
from sigproc.trace import Trace
from utils.errors import NonIntegralSpsError

logger = logging.getLogger(__name__)

RC_ROLLOFF = 0.2
RC_SPAN_SYMBOLS = 16


class PulseShape(str, Enum):
    ZOH = 'zoh'          # each symbol held for its whole period
    NYQUIST = 'nyquist'  # raised-cosine interpolation of per-symbol transmissions


@dataclass(frozen=True)
class WaveformSpec:
    """
    Args:
        baud: symbols per second
        sample_rate: samples per second
        bit_depth: symbol resolution used by random_symbols
        n: symbol count
        pulse: drive pulse shape
    """

    baud: float
    sample_rate: float
    bit_depth: Optional[int] = None
    n: int = 2048
    pulse: PulseShape = PulseShape.ZOH

    def __post_init__(self):
        object.__setattr__(self, 'pulse', PulseShape(self.pulse))
        if not (self.baud > 0 and self.sample_rate >= 2 * self.baud):
            raise ValueError(f"Need sample_rate >= 2 * baud, got {self.sample_rate} and {self.baud}")

    @property
    def samples_per_symbol(self) -> float:
        return self.sample_rate / self.baud

    def integral_sps(self) -> int:
        sps = self.samples_per_symbol
        rounded = round(sps)
        if abs(sps - rounded) > 1e-9 * sps:
            raise NonIntegralSpsError(
                f"{self.sample_rate:.6g} S/s at {self.baud:.6g} Bd is {sps:.6g} samples per symbol"
            )
        return int(rounded)


def random_symbols(n: int, bit_depth: int, rng: np.random.Generator,
                   lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """n symbols drawn uniformly from the 2^bit_depth levels spanning [lo, hi]"""
    levels = 2 ** int(bit_depth)
    return lo + (hi - lo) * rng.integers(0, levels, size=n) / (levels - 1)


def raised_cosine(t: np.ndarray, rolloff: float = RC_ROLLOFF) -> np.ndarray:
    """Raised-cosine pulse in symbol units: 1 at t=0, 0 at every other integer"""
    t = np.asarray(t, dtype=float)
    out = np.sinc(t)
    denom = 1.0 - (2.0 * rolloff * t) ** 2
    singular = np.isclose(denom, 0.0)
    safe = np.where(singular, 1.0, denom)
    out = out * np.where(singular, 1.0, np.cos(math.pi * rolloff * t) / safe)
    # limit at |t| = 1 / (2 rolloff)
    out = np.where(singular, (math.pi / 4.0) * np.sinc(1.0 / (2.0 * rolloff)), out)
    return out


def _nyquist_waveform(levels: np.ndarray, sps: int) -> np.ndarray:
    n = levels.size
    m = np.arange(n * sps)
    t = m / sps - 0.5  # symbol units, symbol k centered at t = k
    out = np.zeros(m.size)
    for offset in range(-RC_SPAN_SYMBOLS, RC_SPAN_SYMBOLS + 1):
        k = np.floor(t).astype(int) + offset
        valid = (k >= 0) & (k < n)
        out[valid] += levels[k[valid]] * raised_cosine(t[valid] - k[valid])
    return out


def synthesize_trace(symbols: Sequence[float], spec: WaveformSpec, model: SineTransferModel,
                     encoder: AffineEncoder, noise: Optional[NoiseSpec] = None,
                     rng: RandomSource = None) -> Trace:
    """
    Drive waveform -> encoder -> transmission -> per-sample noise

    With the zero-order hold each sample carries T(encode(symbol)). The
    Nyquist pulse interpolates the per-symbol transmissions with a raised
    cosine, which leaves symbol centers untouched and stays band-limited to
    0.6 x baud.

    Raises:
        NonIntegralSpsError: sample_rate / baud is not an integer
    """
    sps = spec.integral_sps()
    noise = noise or NoiseSpec()
    require_rng(noise, rng)
    symbols = np.asarray(symbols, dtype=float)

    per_symbol = transmission(model, encoder(symbols))
    if spec.pulse is PulseShape.ZOH:
        samples = np.repeat(per_symbol, sps)
    else:
        samples = _nyquist_waveform(per_symbol, sps)
    samples = apply_noise(samples, noise, rng)

    logger.info(f"Synthesized {symbols.size} symbols at {sps} sps ({spec.pulse.value}, "
                f"noise {noise.describe()})")
    return Trace(samples, spec.sample_rate, 0.0)
