"""
Vision Transformer classifier
Images are cut into patches, flattened, linearly embedded, given learned
positional embeddings and passed through pre-LayerNorm Transformer blocks;
the mean token feeds the class head.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import torch
import torch.nn as nn

from activations.dispatch import AttentionActivation
from activations.noise import RandomSource
from kernel.attention import TransformerBlock, set_activation
from utils.errors import ConfigError, ShapeMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VitConfig:
    image_size: int = 16
    patch_size: int = 4
    channels: int = 3
    num_classes: int = 10
    embed_dim: int = 32
    hidden_dim: int = 64
    heads: int = 2
    layers: int = 2
    dropout: float = 0.0

    def __post_init__(self):
        if self.image_size % self.patch_size:
            raise ShapeMismatchError(
                f"image size {self.image_size} is not divisible by patch size {self.patch_size}"
            )

    @property
    def num_patches(self) -> int:
        return (self.image_size // self.patch_size) ** 2

    @property
    def patch_dim(self) -> int:
        return self.channels * self.patch_size ** 2


VIT_PRESETS: Dict[str, VitConfig] = {
    'vit-paper': VitConfig(image_size=32, patch_size=4, channels=3, num_classes=10,
                            embed_dim=256, hidden_dim=512, heads=8, layers=6, dropout=0.2),
    'vit-tiny': VitConfig(),
}
VIT_PRESETS['vit-full'] = VIT_PRESETS['vit-paper']  # alias


def get_vit_preset(name: str) -> VitConfig:
    try:
        return VIT_PRESETS[name]
    except KeyError:
        raise ConfigError(f"Unknown model preset '{name}' (choose from {', '.join(sorted(VIT_PRESETS))})")


def patchify(images: torch.Tensor, patch_size: int) -> torch.Tensor:
    """(B, C, H, W) -> (B, H/p * W/p, C * p * p), patches in row-major order"""
    b, c, h, w = images.shape
    if h % patch_size or w % patch_size:
        raise ShapeMismatchError(f"image {h}x{w} is not divisible by patch size {patch_size}")
    p = patch_size
    x = images.reshape(b, c, h // p, p, w // p, p).permute(0, 2, 4, 1, 3, 5)
    return x.reshape(b, (h // p) * (w // p), c * p * p)


class VisionTransformer(nn.Module):
    def __init__(self, cfg: VitConfig, activation: AttentionActivation):
        super().__init__()
        self.cfg = cfg
        self.embed = nn.Linear(cfg.patch_dim, cfg.embed_dim)
        self.pos = nn.Parameter(torch.zeros(1, cfg.num_patches, cfg.embed_dim))
        nn.init.normal_(self.pos, std=0.02)
        self.drop = nn.Dropout(cfg.dropout)
        self.blocks = nn.ModuleList(
            TransformerBlock(cfg.embed_dim, cfg.hidden_dim, cfg.heads, activation, dropout=cfg.dropout)
            for _ in range(cfg.layers)
        )
        self.norm = nn.LayerNorm(cfg.embed_dim)
        self.head = nn.Linear(cfg.embed_dim, cfg.num_classes)

    def set_activation(self, activation: AttentionActivation) -> None:
        set_activation(self, activation)

    def forward(self, images: torch.Tensor, rng: RandomSource = None) -> torch.Tensor:
        if images.ndim != 4 or tuple(images.shape[1:]) != (self.cfg.channels, self.cfg.image_size,
                                                           self.cfg.image_size):
            raise ShapeMismatchError(
                f"expected images (B, {self.cfg.channels}, {self.cfg.image_size}, {self.cfg.image_size}), "
                f"got {tuple(images.shape)}"
            )
        x = self.drop(self.embed(patchify(images, self.cfg.patch_size)) + self.pos)
        for block in self.blocks:
            x = block(x, rng)
        return self.head(self.norm(x).mean(dim=1))


def build_vit(cfg: VitConfig, activation: AttentionActivation, seed: int,
              dtype: torch.dtype = torch.float32) -> VisionTransformer:
    """Deterministically initialised model"""
    torch.manual_seed(seed)
    return VisionTransformer(cfg, activation).to(dtype)


def vit_forward(images: torch.Tensor, model: VisionTransformer, cfg: Optional[VitConfig] = None,
                rng: RandomSource = None) -> torch.Tensor:
    """Class logits (B, num_classes) for a batch of images"""
    if cfg is not None and cfg != model.cfg:
        raise ShapeMismatchError("model was built for a different ViT configuration")
    return model(images, rng)
