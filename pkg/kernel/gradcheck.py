"""
Finite-difference check of reverse-mode gradients
"""

import logging
from typing import Callable

import torch

logger = logging.getLogger(__name__)

DENOMINATOR_FLOOR = 1e-8


def _scalarize(out: torch.Tensor) -> torch.Tensor:
    """Fixed, non-uniform projection of a tensor output onto a scalar"""
    if out.ndim == 0:
        return out
    weights = torch.sin(torch.arange(1, out.numel() + 1, dtype=out.dtype, device=out.device))
    return (out.reshape(-1) * weights).sum()


def grad_check(fn: Callable[[torch.Tensor], torch.Tensor], point: torch.Tensor, h: float = 1e-5) -> float:
    """
    Max relative error between autograd and central differences

    Non-scalar outputs are projected onto a fixed sine weighting first.
    The relative error of each coordinate uses the denominator
    max(|analytic|, |numeric|, 1e-8).

    Args:
        fn: function of one tensor
        point: evaluation point (converted to float64)
        h: finite-difference step

    Returns:
        Largest relative error over all coordinates
    """
    x = point.detach().to(torch.float64).clone().requires_grad_(True)
    y = _scalarize(fn(x))
    if y.requires_grad:
        (analytic,) = torch.autograd.grad(y, x, allow_unused=True)
    else:
        analytic = None
    analytic = torch.zeros_like(x) if analytic is None else analytic.detach()

    numeric = torch.zeros_like(x)
    flat = numeric.view(-1)
    with torch.no_grad():
        base = x.detach().clone()
        coords = base.view(-1)
        for i in range(coords.numel()):
            original = coords[i].item()
            coords[i] = original + h
            f_plus = _scalarize(fn(base)).item()
            coords[i] = original - h
            f_minus = _scalarize(fn(base)).item()
            coords[i] = original
            flat[i] = (f_plus - f_minus) / (2.0 * h)

    denom = torch.clamp(torch.maximum(analytic.abs(), numeric.abs()), min=DENOMINATOR_FLOOR)
    error = float(((analytic - numeric).abs() / denom).max()) if x.numel() else 0.0
    logger.debug(f"grad_check over {x.numel()} coordinates: max relative error {error:.3e}")
    return error
