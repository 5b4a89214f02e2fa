"""
Stochastic perturbation of activation outputs
Additive Gaussian noise (absolute sigma, sigma scaled by the signal maximum, or
a literal mean shift to the maximum) and multiplicative Gaussian gain.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
import torch

from utils.errors import MissingRngError

logger = logging.getLogger(__name__)

RandomSource = Union[np.random.Generator, torch.Generator, None]


class NoiseMode(str, Enum):
    NONE = 'none'
    ADDITIVE = 'additive'
    MULTIPLICATIVE = 'multiplicative'


class NoiseReference(str, Enum):
    ABSOLUTE = 'absolute'        # g ~ N(0, sigma^2)
    SIGNAL_MAX = 'signal_max'    # g ~ N(0, (sigma * max s)^2)
    MEAN_SHIFT = 'mean_shift'    # g ~ N(max s, sigma^2)


@dataclass(frozen=True)
class NoiseSpec:
    mode: NoiseMode = NoiseMode.NONE
    sigma: float = 0.0
    reference: NoiseReference = NoiseReference.ABSOLUTE

    def __post_init__(self):
        object.__setattr__(self, 'mode', NoiseMode(self.mode))
        object.__setattr__(self, 'reference', NoiseReference(self.reference))
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"Noise sigma must be finite and >= 0, got {self.sigma}")

    @classmethod
    def none(cls) -> 'NoiseSpec':
        return cls()

    @property
    def active(self) -> bool:
        return self.mode is not NoiseMode.NONE

    def describe(self) -> str:
        if not self.active:
            return 'none'
        if self.mode is NoiseMode.ADDITIVE:
            return f"additive/{self.reference.value} sigma={self.sigma:g}"
        return f"multiplicative sigma={self.sigma:g}"


def require_rng(spec: NoiseSpec, rng: RandomSource) -> None:
    if spec.active and rng is None:
        raise MissingRngError(f"Noise '{spec.describe()}' requested without a random source")


def _standard_normal(like, rng: RandomSource):
    """Standard normal draws shaped like `like`, from whichever generator was given"""
    if isinstance(like, torch.Tensor):
        if isinstance(rng, torch.Generator):
            return torch.randn(like.shape, generator=rng, dtype=like.dtype, device=like.device)
        draws = rng.standard_normal(tuple(like.shape))
        return torch.as_tensor(draws, dtype=like.dtype, device=like.device)
    if isinstance(rng, torch.Generator):
        return torch.randn(np.shape(like), generator=rng, dtype=torch.float64).numpy()
    return rng.standard_normal(np.shape(like))


def _row_max(s):
    if isinstance(s, torch.Tensor):
        return s.detach().amax(dim=-1, keepdim=True) if s.ndim else s.detach()
    arr = np.asarray(s)
    return arr.max(axis=-1, keepdims=True) if arr.ndim else arr


def apply_noise(s, spec: NoiseSpec, rng: RandomSource = None):
    """
    Perturb an activation vector (or a batch of vectors along the last axis)

    Args:
        s: activations as numpy array or torch tensor
        spec: noise settings
        rng: numpy Generator or torch Generator; draws are independent per element

    Returns:
        Perturbed activations, same type and shape as `s`
    """
    if not spec.active or spec.sigma == 0:
        return s
    require_rng(spec, rng)

    is_tensor = isinstance(s, torch.Tensor)
    values = s if is_tensor else np.asarray(s, dtype=float)
    z = _standard_normal(values, rng)

    if spec.mode is NoiseMode.MULTIPLICATIVE:
        gain = 1.0 + spec.sigma * z
        # a physical gain cannot go negative
        gain = gain.clamp(min=0.0) if is_tensor else np.maximum(gain, 0.0)
        return values * gain

    if spec.reference is NoiseReference.SIGNAL_MAX:
        return values + spec.sigma * _row_max(values) * z
    if spec.reference is NoiseReference.MEAN_SHIFT:
        return values + _row_max(values) + spec.sigma * z
    return values + spec.sigma * z
