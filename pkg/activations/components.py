"""
Transfer components of the electro-optic activations

SlopeFunction is one MZM slope segment seen through its affine encoder and
normalized to [0, 1]; it serves as f_exp (rising), f_rec (falling) and
f_sig (full swing). NormModel is the calibrated reciprocal stage. The exact
components give the ideal limit in which Optmax is Softmax.
"""

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import torch

from mzm.transfer import (
    AffineEncoder, SineTransferModel, SlopeSegment, VoltageWindow,
    make_encoder, slope_window, transmission,
)
from utils.errors import DegenerateDomainError


def _where(cond, a: float, b):
    if isinstance(b, torch.Tensor):
        return torch.where(cond, torch.full_like(b, a), b)
    return np.where(cond, a, b)


@dataclass(frozen=True)
class SlopeFunction:
    """
    Normalized transmission of one slope segment over a digital domain

    Args:
        model: MZM transfer curve
        segment: which slope of the curve is driven
        w_min, w_max: digital domain mapped onto the segment's voltage window
    """

    model: SineTransferModel
    segment: SlopeSegment
    w_min: float
    w_max: float
    window: VoltageWindow = field(init=False)
    encoder: AffineEncoder = field(init=False)
    t_lo: float = field(init=False)
    t_span: float = field(init=False)
    value_at_min: float = field(init=False)

    def __post_init__(self):
        segment = SlopeSegment(self.segment)
        window = slope_window(self.model, segment)
        encoder = make_encoder(self.w_min, self.w_max, window)
        t_start = transmission(self.model, encoder(float(self.w_min)))
        t_end = transmission(self.model, encoder(float(self.w_max)))
        if t_start == t_end:
            raise DegenerateDomainError(f"{segment.value} segment has no transmission swing")
        object.__setattr__(self, 'segment', segment)
        object.__setattr__(self, 'window', window)
        object.__setattr__(self, 'encoder', encoder)
        object.__setattr__(self, 't_lo', min(t_start, t_end))
        object.__setattr__(self, 't_span', abs(t_end - t_start))
        object.__setattr__(self, 'value_at_min', 0.0 if t_start < t_end else 1.0)

    @property
    def increasing(self) -> bool:
        return self.value_at_min == 0.0

    @property
    def max_value(self) -> float:
        return 1.0

    def __call__(self, w: Any):
        is_scalar = not isinstance(w, (torch.Tensor, np.ndarray))
        if is_scalar:
            w = np.float64(w)
        f = (transmission(self.model, self.encoder(w)) - self.t_lo) / self.t_span
        # endpoints are exact so saturation is observable as 0.0 and 1.0
        f = _where(w <= self.w_min, self.value_at_min, f)
        f = _where(w >= self.w_max, 1.0 - self.value_at_min, f)
        f = f.clamp(0.0, 1.0) if isinstance(f, torch.Tensor) else np.clip(f, 0.0, 1.0)
        return float(f) if is_scalar else f


@dataclass(frozen=True)
class ExactExponential:
    """Ideal numerator e^x"""

    max_value: float = math.inf

    def __call__(self, x: Any):
        if isinstance(x, torch.Tensor):
            return torch.exp(x)
        return np.exp(x)


@dataclass(frozen=True)
class ExactReciprocal:
    """Ideal normalization 1/z over (0, inf)"""

    z_min: float = float(np.finfo(float).tiny)
    z_max: float = math.inf
    alpha: float = 1.0
    beta: float = 0.0
    sse: float = 0.0

    def __call__(self, z: Any):
        return 1.0 / z


@dataclass(frozen=True)
class NormModel:
    """
    Calibrated reciprocal stage N(z) = alpha * [beta + (1 - beta) * f_rec(z)]

    Args:
        alpha: aggregate system gain
        beta: extinction floor in [0, 1]
        f_rec: normalized falling-slope function over [z_min, z_max]
        sse: sum of squared deviations from 1/z on the calibration grid
    """

    alpha: float
    beta: float
    f_rec: Any
    z_min: float
    z_max: float
    sse: float = float('nan')

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"Extinction floor beta must lie in [0, 1], got {self.beta}")
        if not self.alpha > 0:
            raise ValueError(f"System gain alpha must be positive, got {self.alpha}")
        if not 0 < self.z_min < self.z_max:
            raise DegenerateDomainError(f"Need 0 < z_min < z_max, got [{self.z_min}, {self.z_max}]")

    @property
    def max_value(self) -> float:
        return self.alpha

    def __call__(self, z: Any):
        return self.alpha * (self.beta + (1.0 - self.beta) * self.f_rec(z))
