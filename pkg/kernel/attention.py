"""
Attention head with a pluggable nonlinearity

    out = f(Q K^T / sqrt(d_k)) V

Row-wise nonlinearities (Softmax, Optmax) act along the key axis; Sigmoid and
Optmoid act elementwise. Under the causal mask Softmax sees -inf scores and
every other kind has its masked outputs forced to 0 (Optmax also leaves them
out of its accumulated sum).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import torch
import torch.nn as nn

from activations.dispatch import AttentionActivation
from activations.noise import RandomSource
from utils.errors import ShapeMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttentionConfig:
    n: int
    d_k: int
    heads: int = 1
    activation: AttentionActivation = field(default_factory=AttentionActivation.softmax)
    causal_mask: bool = False

    def __post_init__(self):
        if self.d_k < 1 or self.n < 1 or self.heads < 1:
            raise ValueError(f"Attention needs n, d_k, heads >= 1, got {self.n}, {self.d_k}, {self.heads}")

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(self.d_k)


def causal_keep_mask(n: int, device=None) -> torch.Tensor:
    """Boolean (n, n) mask, True where query i may attend to key j <= i"""
    return torch.ones(n, n, dtype=torch.bool, device=device).tril()


def attention_forward(Q: torch.Tensor, K: torch.Tensor, V: torch.Tensor, cfg: AttentionConfig,
                      rng: RandomSource = None) -> torch.Tensor:
    """
    Scaled attention for Q, K of shape (..., n, d_k) and V of shape (..., n, d_v)

    Raises:
        ShapeMismatchError: inconsistent shapes or shapes disagreeing with cfg
    """
    if Q.ndim < 2 or K.ndim < 2 or V.ndim < 2:
        raise ShapeMismatchError("Q, K and V need at least two dimensions")
    if Q.shape[-1] != cfg.d_k or K.shape[-1] != cfg.d_k:
        raise ShapeMismatchError(f"Q/K key dimension {Q.shape[-1]}/{K.shape[-1]} != d_k={cfg.d_k}")
    if not (Q.shape[-2] == K.shape[-2] == V.shape[-2] == cfg.n):
        raise ShapeMismatchError(
            f"sequence lengths Q={Q.shape[-2]} K={K.shape[-2]} V={V.shape[-2]} do not match n={cfg.n}"
        )

    scores = (Q @ K.transpose(-2, -1)) * cfg.scale
    mask = causal_keep_mask(cfg.n, Q.device) if cfg.causal_mask else None
    weights = cfg.activation(scores, rng, mask)
    return weights @ V


class MultiHeadAttention(nn.Module):
    """Multi-head self-attention whose nonlinearity can be swapped in place"""

    def __init__(self, embed_dim: int, heads: int, activation: AttentionActivation,
                 causal: bool = False, dropout: float = 0.0):
        super().__init__()
        if embed_dim % heads:
            raise ShapeMismatchError(f"embed_dim {embed_dim} is not divisible by {heads} heads")
        self.embed_dim = embed_dim
        self.heads = heads
        self.head_dim = embed_dim // heads
        self.activation = activation
        self.causal = causal
        self.qkv = nn.Linear(embed_dim, 3 * embed_dim)
        self.proj = nn.Linear(embed_dim, embed_dim)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor, rng: RandomSource = None) -> torch.Tensor:
        batch, tokens, _ = x.shape
        qkv = self.qkv(x).reshape(batch, tokens, 3, self.heads, self.head_dim).permute(2, 0, 3, 1, 4)
        cfg = AttentionConfig(n=tokens, d_k=self.head_dim, heads=self.heads,
                              activation=self.activation, causal_mask=self.causal)
        out = attention_forward(qkv[0], qkv[1], qkv[2], cfg, rng)
        out = out.transpose(1, 2).reshape(batch, tokens, self.embed_dim)
        return self.dropout(self.proj(out))


class TransformerBlock(nn.Module):
    """Pre-LayerNorm block: attention and GELU feed-forward, each with a residual"""

    def __init__(self, embed_dim: int, hidden_dim: int, heads: int, activation: AttentionActivation,
                 causal: bool = False, dropout: float = 0.0):
        super().__init__()
        self.ln1 = nn.LayerNorm(embed_dim)
        self.attn = MultiHeadAttention(embed_dim, heads, activation, causal, dropout)
        self.ln2 = nn.LayerNorm(embed_dim)
        self.mlp = nn.Sequential(
            nn.Linear(embed_dim, hidden_dim),
            nn.GELU(),
            nn.Linear(hidden_dim, embed_dim),
            nn.Dropout(dropout),
        )

    def forward(self, x: torch.Tensor, rng: RandomSource = None) -> torch.Tensor:
        x = x + self.attn(self.ln1(x), rng)
        return x + self.mlp(self.ln2(x))


def set_activation(model: nn.Module, activation: AttentionActivation) -> None:
    """Swap the nonlinearity of every attention layer in a model"""
    for module in model.modules():
        if isinstance(module, MultiHeadAttention):
            module.activation = activation
