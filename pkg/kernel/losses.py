"""
Negative log-likelihood of class or next-token targets
"""

import torch
import torch.nn.functional as F

from utils.errors import IndexOutOfRangeError, ShapeMismatchError


def nll_loss(logits: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    """
    Mean -log softmax(logits)[target] over all positions

    Args:
        logits: (positions, vocab), or (..., vocab) which is flattened
        targets: integer indices matching the leading shape of logits

    Raises:
        IndexOutOfRangeError: a target lies outside [0, vocab)
        ShapeMismatchError: target count differs from position count
    """
    vocab = logits.shape[-1]
    flat_logits = logits.reshape(-1, vocab)
    flat_targets = torch.as_tensor(targets, dtype=torch.long, device=logits.device).reshape(-1)
    if flat_targets.numel() != flat_logits.shape[0]:
        raise ShapeMismatchError(
            f"{flat_targets.numel()} targets for {flat_logits.shape[0]} logit positions"
        )
    if flat_targets.numel() and (int(flat_targets.min()) < 0 or int(flat_targets.max()) >= vocab):
        raise IndexOutOfRangeError(
            f"targets span [{int(flat_targets.min())}, {int(flat_targets.max())}] outside vocab of {vocab}"
        )
    return F.cross_entropy(flat_logits, flat_targets)


def accuracy(logits: torch.Tensor, targets: torch.Tensor) -> float:
    predicted = logits.reshape(-1, logits.shape[-1]).argmax(dim=-1)
    return float((predicted == targets.reshape(-1)).double().mean())
