"""
Exact digital attention nonlinearities
"""

import math
from typing import Union

import numpy as np
import torch
from scipy.special import expit

from utils.errors import EmptyInputError

Vector = Union[np.ndarray, torch.Tensor, list, tuple]


def softmax_ref(x: Vector):
    """Max-subtracted softmax along the last axis"""
    if isinstance(x, torch.Tensor):
        if x.numel() == 0:
            raise EmptyInputError("softmax of an empty vector")
        return torch.softmax(x, dim=-1)
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        raise EmptyInputError("softmax of an empty vector")
    shifted = np.exp(arr - arr.max(axis=-1, keepdims=True))
    return shifted / shifted.sum(axis=-1, keepdims=True)


def sigmoid_ref(x: Vector, bias: float = 0.0):
    """Elementwise logistic of x + bias"""
    if isinstance(x, torch.Tensor):
        return torch.sigmoid(x + bias)
    return expit(np.asarray(x, dtype=float) + bias)


def default_bias(n: int) -> float:
    """Sequence-length bias -ln(n) for sigmoid attention"""
    if n < 1:
        raise ValueError(f"Sequence length must be >= 1, got {n}")
    return -math.log(n)
