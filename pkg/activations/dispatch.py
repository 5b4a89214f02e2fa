"""
Attention nonlinearity dispatch
One object per configured nonlinearity so the attention kernel can swap
Softmax, Sigmoid, Optmax and Optmoid without changing any tensor shape.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional, Union

import torch

from activations.noise import NoiseSpec, RandomSource, apply_noise, require_rng
from activations.optmax import OptmaxParams, as_tensor, optmax_forward
from activations.optmoid import OptmoidParams, optmoid_forward
from activations.quantization import QuantSpec, quantize
from activations.reference import sigmoid_ref
from utils.errors import EmptyInputError

logger = logging.getLogger(__name__)


class Nonlinearity(str, Enum):
    SOFTMAX = 'softmax'
    SIGMOID = 'sigmoid'
    OPTMAX = 'optmax'
    OPTMOID = 'optmoid'

    @property
    def rowwise(self) -> bool:
        return self in (Nonlinearity.SOFTMAX, Nonlinearity.OPTMAX)


@dataclass(frozen=True)
class DigitalParams:
    """Reference Softmax/Sigmoid with the same output quantizer and noise as the analog ones"""

    bias: float = 0.0
    q_out: QuantSpec = field(default_factory=QuantSpec.disabled)
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def surrogate(self) -> 'DigitalParams':
        return replace(self, q_out=self.q_out.straight_through(), noise=NoiseSpec())

    def with_settings(self, q_in: Optional[QuantSpec] = None, q_out: Optional[QuantSpec] = None,
                      noise: Optional[NoiseSpec] = None, bias: Optional[float] = None) -> 'DigitalParams':
        return replace(self, q_out=q_out or self.q_out, noise=noise or self.noise,
                       bias=self.bias if bias is None else float(bias))


ActivationParams = Union[OptmaxParams, OptmoidParams, DigitalParams]


def _digital_forward(kind: Nonlinearity, x, p: DigitalParams, rng: RandomSource,
                     mask: Optional[torch.Tensor]):
    xt, from_numpy = as_tensor(x)
    if xt.ndim == 0 or xt.shape[-1] == 0:
        raise EmptyInputError(f"{kind.value} needs a non-empty vector")
    require_rng(p.noise, rng)
    keep = None if mask is None else torch.as_tensor(mask, dtype=torch.bool, device=xt.device)
    if kind is Nonlinearity.SOFTMAX:
        scores = xt if keep is None else xt.masked_fill(~keep, float('-inf'))
        s = torch.softmax(scores, dim=-1)
    else:
        s = sigmoid_ref(xt, p.bias)
    s = quantize(apply_noise(s, p.noise, rng), p.q_out)
    if keep is not None:
        s = s.masked_fill(~keep, 0.0)
    return s.detach().numpy() if from_numpy else s


@dataclass(frozen=True)
class AttentionActivation:
    """A nonlinearity together with its parameter record"""

    kind: Nonlinearity
    params: ActivationParams = field(default_factory=DigitalParams)

    def __post_init__(self):
        kind = Nonlinearity(self.kind)
        object.__setattr__(self, 'kind', kind)
        expected = {Nonlinearity.OPTMAX: OptmaxParams, Nonlinearity.OPTMOID: OptmoidParams}.get(kind, DigitalParams)
        if not isinstance(self.params, expected):
            raise TypeError(f"{kind.value} needs {expected.__name__}, got {type(self.params).__name__}")

    @classmethod
    def softmax(cls) -> 'AttentionActivation':
        return cls(Nonlinearity.SOFTMAX, DigitalParams())

    @classmethod
    def sigmoid(cls, bias: float = 0.0) -> 'AttentionActivation':
        return cls(Nonlinearity.SIGMOID, DigitalParams(bias=bias))

    @property
    def noisy(self) -> bool:
        return self.params.noise.active

    def surrogate(self) -> 'AttentionActivation':
        return replace(self, params=self.params.surrogate())

    def with_settings(self, **kwargs) -> 'AttentionActivation':
        return replace(self, params=self.params.with_settings(**kwargs))

    def without_noise(self) -> 'AttentionActivation':
        return self.with_settings(noise=NoiseSpec()) if self.noisy else self

    def __call__(self, x: Any, rng: RandomSource = None, mask: Optional[torch.Tensor] = None):
        return apply_activation(x, self, rng, mask)

    def describe(self) -> str:
        p = self.params
        return f"{self.kind.value} q_out={p.q_out.describe()} noise={p.noise.describe()}"


def apply_activation(x: Any, activation: AttentionActivation, rng: RandomSource = None,
                     mask: Optional[torch.Tensor] = None):
    """Run the configured nonlinearity; row-wise kinds act along the last axis"""
    kind = activation.kind
    if kind is Nonlinearity.OPTMAX:
        return optmax_forward(x, activation.params, rng, mask)
    if kind is Nonlinearity.OPTMOID:
        return optmoid_forward(x, activation.params, rng, mask)
    return _digital_forward(kind, x, activation.params, rng, mask)
