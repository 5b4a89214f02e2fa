"""
Causal character language model built from the same Transformer blocks
"""

from dataclasses import dataclass
from typing import Dict

import torch
import torch.nn as nn

from activations.dispatch import AttentionActivation
from activations.noise import RandomSource
from kernel.attention import TransformerBlock, set_activation
from utils.errors import ConfigError, ShapeMismatchError


@dataclass(frozen=True)
class CharLmConfig:
    vocab_size: int = 32
    context: int = 16
    embed_dim: int = 32
    hidden_dim: int = 64
    heads: int = 2
    layers: int = 2
    dropout: float = 0.0


CHARLM_PRESETS: Dict[str, CharLmConfig] = {
    'charlm-tiny': CharLmConfig(),
}


def get_charlm_preset(name: str) -> CharLmConfig:
    try:
        return CHARLM_PRESETS[name]
    except KeyError:
        raise ConfigError(f"Unknown model preset '{name}' (choose from {', '.join(sorted(CHARLM_PRESETS))})")


class CharTransformer(nn.Module):
    def __init__(self, cfg: CharLmConfig, activation: AttentionActivation):
        super().__init__()
        self.cfg = cfg
        self.tokens = nn.Embedding(cfg.vocab_size, cfg.embed_dim)
        self.pos = nn.Parameter(torch.zeros(1, cfg.context, cfg.embed_dim))
        nn.init.normal_(self.pos, std=0.02)
        self.blocks = nn.ModuleList(
            TransformerBlock(cfg.embed_dim, cfg.hidden_dim, cfg.heads, activation,
                             causal=True, dropout=cfg.dropout)
            for _ in range(cfg.layers)
        )
        self.norm = nn.LayerNorm(cfg.embed_dim)
        self.head = nn.Linear(cfg.embed_dim, cfg.vocab_size)

    def set_activation(self, activation: AttentionActivation) -> None:
        set_activation(self, activation)

    def forward(self, idx: torch.Tensor, rng: RandomSource = None) -> torch.Tensor:
        """(B, T) token ids -> (B, T, vocab) next-token logits"""
        if idx.ndim != 2 or idx.shape[1] > self.cfg.context:
            raise ShapeMismatchError(f"expected (B, T <= {self.cfg.context}) token ids, got {tuple(idx.shape)}")
        x = self.tokens(idx) + self.pos[:, :idx.shape[1]]
        for block in self.blocks:
            x = block(x, rng)
        return self.head(self.norm(x))


def build_charlm(cfg: CharLmConfig, activation: AttentionActivation, seed: int,
                 dtype: torch.dtype = torch.float32) -> CharTransformer:
    torch.manual_seed(seed)
    return CharTransformer(cfg, activation).to(dtype)
