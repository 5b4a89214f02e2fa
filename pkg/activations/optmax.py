"""
Optmax forward model

    s_i = q_out(noise(N(clip_z(sum_j f_exp(q_in(clip(x_j))))) * f_exp(q_in(clip(x_i)))))

One accumulated sum z per vector (last axis) drives the normalization stage,
so every element of a vector shares the same N(z).
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Tuple

import numpy as np
import torch

from activations.components import ExactExponential, ExactReciprocal
from activations.noise import NoiseSpec, RandomSource, apply_noise, require_rng
from activations.quantization import QuantSpec, quantize
from utils.errors import EmptyInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptmaxParams:
    """
    Calibrated Optmax configuration

    Args:
        x_min, x_max: input clip bounds
        f_exp: numerator component (SlopeFunction on the rising slope, or ExactExponential)
        norm: normalization component (NormModel, or ExactReciprocal); owns [z_min, z_max]
        q_in, q_out: DAC and ADC quantizers
        noise: output noise model
    """

    x_min: float
    x_max: float
    f_exp: Any
    norm: Any
    q_in: QuantSpec = field(default_factory=QuantSpec.disabled)
    q_out: QuantSpec = field(default_factory=QuantSpec.disabled)
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"Optmax clip range needs x_min < x_max, got [{self.x_min}, {self.x_max}]")

    @property
    def z_min(self) -> float:
        return self.norm.z_min

    @property
    def z_max(self) -> float:
        return self.norm.z_max

    @classmethod
    def ideal(cls) -> 'OptmaxParams':
        """Exact exponential and exact reciprocal with nothing binding: Softmax"""
        return cls(x_min=-math.inf, x_max=math.inf, f_exp=ExactExponential(), norm=ExactReciprocal())

    def output_bound(self) -> float:
        """Largest value a noise-free forward can emit"""
        bound = self.norm.max_value * self.f_exp.max_value
        if self.q_out.enabled:
            bound = min(bound, self.q_out.hi)
        return bound

    def surrogate(self) -> 'OptmaxParams':
        """Smooth stand-in for gradients: no noise, quantizers reduced to clipping"""
        return replace(self, q_in=self.q_in.straight_through(),
                       q_out=self.q_out.straight_through(), noise=NoiseSpec())

    def with_settings(self, q_in: Optional[QuantSpec] = None, q_out: Optional[QuantSpec] = None,
                      noise: Optional[NoiseSpec] = None) -> 'OptmaxParams':
        return replace(self, q_in=q_in or self.q_in, q_out=q_out or self.q_out,
                       noise=noise or self.noise)


def as_tensor(x: Any) -> Tuple[torch.Tensor, bool]:
    """Tensor view of the input and whether the caller passed a non-tensor"""
    if isinstance(x, torch.Tensor):
        return x, False
    return torch.as_tensor(np.asarray(x, dtype=float), dtype=torch.float64), True


def optmax_forward(x: Any, p: OptmaxParams, rng: RandomSource = None,
                   mask: Optional[torch.Tensor] = None):
    """
    Optmax over the last axis

    Args:
        x: scores, numpy array or torch tensor (batched along leading axes)
        p: calibrated parameters
        rng: random source, required when noise is enabled
        mask: boolean keep-mask broadcastable to x; masked elements are left
            out of z and forced to 0 in the output

    Returns:
        Activations of the same type and shape as x

    Raises:
        EmptyInputError: empty input vector
        MissingRngError: noise requested without a random source
    """
    xt, from_numpy = as_tensor(x)
    if xt.ndim == 0 or xt.shape[-1] == 0:
        raise EmptyInputError("Optmax needs a non-empty vector")
    require_rng(p.noise, rng)

    numerator = p.f_exp(quantize(xt.clamp(p.x_min, p.x_max), p.q_in))
    if mask is not None:
        mask = torch.as_tensor(mask, dtype=torch.bool, device=xt.device)
        numerator = numerator.masked_fill(~mask, 0.0)

    z = numerator.sum(dim=-1, keepdim=True).clamp(p.z_min, p.z_max)
    s = p.norm(z) * numerator
    s = quantize(apply_noise(s, p.noise, rng), p.q_out)
    if mask is not None:
        s = s.masked_fill(~mask, 0.0)
    return s.detach().numpy() if from_numpy else s
