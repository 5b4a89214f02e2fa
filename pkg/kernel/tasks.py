"""
Desk-scale tasks
Deterministic stand-ins for image classification and language modelling
datasets, regenerated bit-identically from TaskSpec.seed.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import torch

logger = logging.getLogger(__name__)

VAL_FRACTION = 0.1

# Word list for the character-level grammar
_SYLLABLES = ['ka', 'lo', 'mi', 're', 'su', 'ta', 'ne', 'vo', 'pi', 'da', 'xe', 'gu']


class TaskKind(str, Enum):
    SYNTHETIC_PATCHES = 'synthetic_patches'
    TINY_IMAGES = 'tiny_images'
    CHAR_LM = 'char_lm'


@dataclass(frozen=True)
class TaskSpec:
    """
    Args:
        kind: task family
        num_classes: classes (image tasks); ignored for char_lm, whose vocab is derived
        size: number of samples (image tasks) or training windows (char_lm)
        seed: generation seed
        image_size, channels: image geometry
        pixel_noise: Gaussian noise added to every pixel
        context: sequence length for char_lm windows
    """

    kind: TaskKind = TaskKind.SYNTHETIC_PATCHES
    num_classes: int = 10
    size: int = 1000
    seed: int = 0
    image_size: int = 16
    channels: int = 3
    pixel_noise: float = 0.5
    context: int = 16

    def __post_init__(self):
        object.__setattr__(self, 'kind', TaskKind(self.kind))
        if self.size < 2 or self.num_classes < 2:
            raise ValueError(f"Task needs size >= 2 and num_classes >= 2, got {self.size}, {self.num_classes}")


@dataclass(frozen=True, eq=False)
class TaskData:
    kind: TaskKind
    x_train: torch.Tensor
    y_train: torch.Tensor
    x_val: torch.Tensor
    y_val: torch.Tensor
    num_classes: int
    vocab: List[str] = field(default_factory=list)

    @property
    def is_sequence(self) -> bool:
        return self.kind is TaskKind.CHAR_LM


def _split(x: np.ndarray, y: np.ndarray, rng: np.random.Generator):
    order = rng.permutation(len(x))
    n_val = max(1, int(round(VAL_FRACTION * len(x))))
    val, train = order[:n_val], order[n_val:]
    return x[train], y[train], x[val], y[val]


def _synthetic_patches(spec: TaskSpec, rng: np.random.Generator):
    shape = (spec.channels, spec.image_size, spec.image_size)
    prototypes = rng.standard_normal((spec.num_classes,) + shape)
    labels = rng.integers(0, spec.num_classes, size=spec.size)
    images = prototypes[labels] + spec.pixel_noise * rng.standard_normal((spec.size,) + shape)
    return images, labels


def _tiny_images(spec: TaskSpec, rng: np.random.Generator):
    """Oriented stripe patterns, one orientation per class, random phase and tint"""
    coords = np.arange(spec.image_size) / spec.image_size
    yy, xx = np.meshgrid(coords, coords, indexing='ij')
    labels = rng.integers(0, spec.num_classes, size=spec.size)
    angles = math.pi * labels / spec.num_classes
    phases = rng.uniform(0, 2 * math.pi, size=spec.size)
    tint = rng.uniform(0.5, 1.0, size=(spec.size, spec.channels))
    frequency = 3.0
    stripes = np.sin(2 * math.pi * frequency * (xx[None] * np.cos(angles)[:, None, None]
                                                + yy[None] * np.sin(angles)[:, None, None])
                     + phases[:, None, None])
    images = tint[:, :, None, None] * stripes[:, None]
    images = images + spec.pixel_noise * rng.standard_normal(images.shape)
    return images, labels


def _grammar_text(rng: np.random.Generator, n_chars: int) -> str:
    words = [''.join(rng.choice(_SYLLABLES, size=rng.integers(1, 4))) for _ in range(40)]
    # bigram preference makes the next word partly predictable
    follow = rng.integers(0, len(words), size=len(words))
    pieces: List[str] = []
    current = int(rng.integers(0, len(words)))
    total = 0
    while total < n_chars:
        pieces.append(words[current])
        total += len(words[current]) + 1
        current = int(follow[current]) if rng.random() < 0.7 else int(rng.integers(0, len(words)))
    return ' '.join(pieces) + '.'


def _char_lm(spec: TaskSpec, rng: np.random.Generator):
    text = _grammar_text(rng, spec.size + spec.context + 1)
    vocab = sorted(set(text))
    ids = np.array([vocab.index(ch) for ch in text], dtype=np.int64)
    starts = np.arange(spec.size)
    windows = np.stack([ids[s:s + spec.context + 1] for s in starts])
    return windows[:, :-1], windows[:, 1:], vocab


def generate_task(spec: TaskSpec) -> TaskData:
    """Regenerate the task's train/validation split from its seed"""
    rng = np.random.default_rng(spec.seed)
    vocab: List[str] = []
    if spec.kind is TaskKind.CHAR_LM:
        x, y, vocab = _char_lm(spec, rng)
        num_classes = len(vocab)
        x_dtype = torch.long
    else:
        maker = _synthetic_patches if spec.kind is TaskKind.SYNTHETIC_PATCHES else _tiny_images
        x, y = maker(spec, rng)
        num_classes = spec.num_classes
        x_dtype = torch.float32

    x_tr, y_tr, x_va, y_va = _split(x, y, rng)
    data = TaskData(
        kind=spec.kind,
        x_train=torch.as_tensor(x_tr, dtype=x_dtype), y_train=torch.as_tensor(y_tr, dtype=torch.long),
        x_val=torch.as_tensor(x_va, dtype=x_dtype), y_val=torch.as_tensor(y_va, dtype=torch.long),
        num_classes=num_classes, vocab=vocab,
    )
    logger.info(f"Generated {spec.kind.value}: {len(x_tr)} train / {len(x_va)} val samples, "
                f"{num_classes} classes")
    return data
