"""
Reverse-mode gradients of the activation surrogates
"""

from typing import Any, Callable, Union

import numpy as np
import torch

from activations.dispatch import ActivationParams, AttentionActivation, Nonlinearity, apply_activation


def activation_grad(kind: Union[Nonlinearity, str], x: Any,
                    params: ActivationParams) -> Callable[[Any], np.ndarray]:
    """
    Vector-Jacobian product of the smooth surrogate at x

    Noise is switched off and quantizers reduce to clipping, which is exactly
    the straight-through estimator (identity inside [lo, hi], zero outside).

    Args:
        kind: which nonlinearity
        x: evaluation point (last axis is the vector axis)
        params: parameter record for that nonlinearity

    Returns:
        vjp(v) -> v^T J as a float64 numpy array shaped like x
    """
    activation = AttentionActivation(Nonlinearity(kind), params).surrogate()
    point = torch.as_tensor(np.asarray(x, dtype=float), dtype=torch.float64).requires_grad_(True)
    out = apply_activation(point, activation)

    def vjp(v: Any) -> np.ndarray:
        cotangent = torch.as_tensor(np.asarray(v, dtype=float), dtype=torch.float64)
        (grad,) = torch.autograd.grad(out, point, cotangent, retain_graph=True, allow_unused=True)
        if grad is None:
            return np.zeros(point.shape)
        return grad.numpy()

    return vjp


def activation_jacobian(kind: Union[Nonlinearity, str], x: Any, params: ActivationParams) -> np.ndarray:
    """Dense Jacobian of the surrogate of a single vector"""
    x = np.asarray(x, dtype=float)
    vjp = activation_grad(kind, x, params)
    return np.stack([vjp(row) for row in np.eye(x.size)])
