"""
DAC/ADC quantizer model
Uniform quantizer over [lo, hi] with 2^bits bins; the default floor rounding
puts the zero bin at [lo, lo + step), so a 4-bit [0, 1] quantizer zeroes
everything below 0.0625.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union

import numpy as np
import torch

logger = logging.getLogger(__name__)


class Rounding(str, Enum):
    FLOOR = 'floor'
    NEAREST = 'nearest'
    NONE = 'none'  # clip only


@dataclass(frozen=True)
class QuantSpec:
    """
    Quantizer settings

    Args:
        bits: bit depth, or None for a disabled (identity) quantizer
        lo, hi: quantization range
        rounding: bin assignment; NONE clips without binning
    """

    bits: Optional[int] = None
    lo: float = 0.0
    hi: float = 1.0
    rounding: Rounding = Rounding.FLOOR

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"Quantizer range needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.bits is not None and (int(self.bits) != self.bits or self.bits < 1):
            raise ValueError(f"Quantizer bits must be a positive integer or None, got {self.bits}")
        object.__setattr__(self, 'rounding', Rounding(self.rounding))

    @classmethod
    def disabled(cls, lo: float = 0.0, hi: float = 1.0) -> 'QuantSpec':
        return cls(None, lo, hi)

    @property
    def enabled(self) -> bool:
        return self.bits is not None

    @property
    def levels(self) -> Optional[int]:
        return None if self.bits is None else 2 ** int(self.bits)

    @property
    def step(self) -> Optional[float]:
        return None if self.bits is None else (self.hi - self.lo) / self.levels

    def straight_through(self) -> 'QuantSpec':
        """Same range, clipping only: the smooth surrogate used for gradients"""
        if not self.enabled:
            return self
        return replace(self, rounding=Rounding.NONE)

    def describe(self) -> str:
        if not self.enabled:
            return 'disabled'
        return f"{self.bits}-bit {self.rounding.value} [{self.lo:g}, {self.hi:g}]"


def _bin_index(scaled, spec: QuantSpec, lib):
    if spec.rounding is Rounding.NEAREST:
        idx = lib.floor(scaled + 0.5)
    else:
        idx = lib.floor(scaled)
    return lib.clip(idx, 0, spec.levels - 1) if lib is np else idx.clamp(0, spec.levels - 1)


def _quantize_values(v, spec: QuantSpec, lib):
    clipped = lib.clip(v, spec.lo, spec.hi) if lib is np else v.clamp(spec.lo, spec.hi)
    if spec.rounding is Rounding.NONE:
        return clipped
    idx = _bin_index((clipped - spec.lo) / spec.step, spec, lib)
    return spec.lo + idx * spec.step


class _StraightThroughQuantize(torch.autograd.Function):
    """Quantize forward; identity gradient inside [lo, hi], zero outside"""

    @staticmethod
    def forward(ctx, x, spec):
        ctx.save_for_backward(x)
        ctx.lo, ctx.hi = spec.lo, spec.hi
        return _quantize_values(x, spec, torch)

    @staticmethod
    def backward(ctx, grad_output):
        (x,) = ctx.saved_tensors
        inside = (x >= ctx.lo) & (x <= ctx.hi)
        return grad_output * inside.to(grad_output.dtype), None


def quantize(v: Union[float, np.ndarray, torch.Tensor], spec: QuantSpec):
    """
    Clip to [lo, hi] and map onto the lower edge of the value's bin

    Disabled specs return the input unchanged. Torch tensors get the
    straight-through gradient.
    """
    if not spec.enabled:
        return v
    if isinstance(v, torch.Tensor):
        if spec.rounding is Rounding.NONE:
            return v.clamp(spec.lo, spec.hi)
        return _StraightThroughQuantize.apply(v, spec)
    if np.ndim(v) == 0 and not isinstance(v, np.ndarray):
        return float(_quantize_values(np.float64(v), spec, np))
    return _quantize_values(np.asarray(v, dtype=float), spec, np)


def distinct_levels(spec: QuantSpec) -> np.ndarray:
    """All values a quantizer can emit"""
    if not spec.enabled or spec.rounding is Rounding.NONE:
        raise ValueError("Only binning quantizers have a finite level set")
    return spec.lo + np.arange(spec.levels) * spec.step


def bits_label(bits: Optional[int]) -> str:
    return 'inf' if bits is None else str(int(bits))


def parse_bits(text: str) -> Optional[int]:
    """'inf', 'none' or 'disabled' mean no quantization"""
    token = str(text).strip().lower()
    if token in ('inf', 'none', 'disabled', '', 'off'):
        return None
    value = float(token)
    if math.isinf(value):
        return None
    return int(value)
