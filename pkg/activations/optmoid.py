"""
Optmoid forward model

    s_i = q_out(noise(f_sig(q_in(clip(x_i + b)))))

Elementwise; the clip bounds are in the biased domain u = x + b. Noisy
outputs are held to the detector range [0, 1].
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Tuple

import torch

from activations.noise import NoiseSpec, RandomSource, apply_noise, require_rng
from activations.optmax import as_tensor
from activations.quantization import QuantSpec, quantize
from utils.errors import EmptyInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptmoidParams:
    bias: float
    x_min: float
    x_max: float
    f_sig: Any
    q_in: QuantSpec = field(default_factory=QuantSpec.disabled)
    q_out: QuantSpec = field(default_factory=QuantSpec.disabled)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    residual: float = float('nan')
    fit_range: Tuple[float, float] = (-8.0, 8.0)
    grid_points: int = 256

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"Optmoid clip range needs x_min < x_max, got [{self.x_min}, {self.x_max}]")

    def surrogate(self) -> 'OptmoidParams':
        return replace(self, q_in=self.q_in.straight_through(),
                       q_out=self.q_out.straight_through(), noise=NoiseSpec())

    def with_settings(self, q_in: Optional[QuantSpec] = None, q_out: Optional[QuantSpec] = None,
                      noise: Optional[NoiseSpec] = None, bias: Optional[float] = None) -> 'OptmoidParams':
        return replace(self, q_in=q_in or self.q_in, q_out=q_out or self.q_out,
                       noise=noise or self.noise, bias=self.bias if bias is None else float(bias))


def optmoid_forward(x: Any, p: OptmoidParams, rng: RandomSource = None,
                    mask: Optional[torch.Tensor] = None):
    """
    Elementwise Optmoid; masked elements are forced to 0

    Raises:
        EmptyInputError: empty input
        MissingRngError: noise requested without a random source
    """
    xt, from_numpy = as_tensor(x)
    if xt.numel() == 0:
        raise EmptyInputError("Optmoid needs a non-empty input")
    require_rng(p.noise, rng)

    u = (xt + p.bias).clamp(p.x_min, p.x_max)
    s = p.f_sig(quantize(u, p.q_in))
    if p.noise.active:
        # detector full scale
        s = apply_noise(s, p.noise, rng).clamp(0.0, 1.0)
    s = quantize(s, p.q_out)
    if mask is not None:
        s = s.masked_fill(~torch.as_tensor(mask, dtype=torch.bool, device=xt.device), 0.0)
    return s.detach().numpy() if from_numpy else s
