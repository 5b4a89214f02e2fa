"""
Training Loop
AdamW optimisation of the toy ViT or character LM with a pluggable attention
nonlinearity. Runs are bit-reproducible for a fixed seed on one thread.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Union

import pandas as pd
import torch
import torch.nn as nn

from activations.dispatch import AttentionActivation
from kernel.attention import MultiHeadAttention
from kernel.charlm import CharLmConfig, build_charlm
from kernel.losses import accuracy, nll_loss
from kernel.tasks import TaskData, TaskSpec, generate_task
from kernel.vit import VitConfig, build_vit
from utils.errors import DivergenceError

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ['step', 'split', 'metric', 'value', 'seed']

# Derived seed offsets so batches and noise draw from independent streams
BATCH_SEED_OFFSET = 1
NOISE_SEED_OFFSET = 2

EVAL_BATCH_SIZE = 256

ModelConfig = Union[VitConfig, CharLmConfig]


@dataclass(frozen=True)
class TrainConfig:
    """
    Optimiser and loop settings

    Args:
        lr: learning rate (0 freezes every parameter)
        steps: optimiser steps
        batch_size: samples per step
        seed: seeds initialisation, batch order and noise draws
        beta1, beta2, eps, weight_decay: AdamW hyperparameters
        noise_in_training: keep the activation's noise model active while training
        eval_interval: evaluate train and val splits every N steps (0 disables)
    """

    lr: float = 3e-4
    steps: int = 500
    batch_size: int = 32
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.95
    eps: float = 1e-8
    weight_decay: float = 0.0
    noise_in_training: bool = False
    eval_interval: int = 0

    def __post_init__(self):
        if self.lr < 0 or self.steps < 0 or self.batch_size < 1 or self.eval_interval < 0:
            raise ValueError(
                f"Invalid training config: lr={self.lr}, steps={self.steps}, "
                f"batch_size={self.batch_size}, eval_interval={self.eval_interval}"
            )
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1 and self.eps > 0 and self.weight_decay >= 0):
            raise ValueError("AdamW needs betas in [0, 1), eps > 0 and weight_decay >= 0")


@dataclass(frozen=True)
class MetricRecord:
    step: int
    split: str
    metric: str
    value: float
    seed: int


@dataclass
class TrainResult:
    history: List[MetricRecord]
    model: nn.Module
    final: Dict[str, float] = field(default_factory=dict)
    data: Optional[TaskData] = None

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in self.history], columns=HISTORY_COLUMNS)


def set_determinism(seed: int) -> None:
    """Seed torch and pin it to one thread with deterministic kernels"""
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    torch.set_num_threads(1)


def build_model(data: TaskData, activation: AttentionActivation, seed: int,
                model_cfg: Optional[ModelConfig] = None) -> nn.Module:
    """
    Model sized for the task: a ViT for image tasks, a causal LM for char_lm

    The base config supplies widths and depth; geometry, class count and
    vocabulary always follow the data.
    """
    if data.is_sequence:
        base = model_cfg if isinstance(model_cfg, CharLmConfig) else CharLmConfig()
        cfg = replace(base, vocab_size=data.num_classes, context=int(data.x_train.shape[1]))
        return build_charlm(cfg, activation, seed)
    base = model_cfg if isinstance(model_cfg, VitConfig) else VitConfig()
    _, channels, size, _ = data.x_train.shape
    cfg = replace(base, image_size=int(size), channels=int(channels), num_classes=data.num_classes)
    return build_vit(cfg, activation, seed)


def _set_model_activation(model: nn.Module, activation: AttentionActivation) -> None:
    model.set_activation(activation)


def evaluate(model: nn.Module, data: TaskData, activation: Optional[AttentionActivation] = None,
             rng: Optional[torch.Generator] = None, split: str = 'val') -> Dict[str, float]:
    """
    Loss and accuracy on a split, optionally under a different activation

    Test-time noise is drawn from rng; a generator seeded at 0 is used when
    the activation is noisy and none was given.

    Returns:
        {'loss': float, 'accuracy': float}
    """
    x, y = (data.x_val, data.y_val) if split == 'val' else (data.x_train, data.y_train)
    previous = _current_activation(model)
    if activation is not None:
        _set_model_activation(model, activation)
    active = activation or previous
    if active is not None and active.noisy and rng is None:
        rng = torch.Generator().manual_seed(0)

    was_training = model.training
    model.eval()
    total_loss, correct, count = 0.0, 0.0, 0
    try:
        with torch.no_grad():
            for start in range(0, len(x), EVAL_BATCH_SIZE):
                xb, yb = x[start:start + EVAL_BATCH_SIZE], y[start:start + EVAL_BATCH_SIZE]
                logits = model(xb, rng)
                positions = yb.numel()
                total_loss += nll_loss(logits, yb).item() * positions
                correct += accuracy(logits, yb) * positions
                count += positions
    finally:
        model.train(was_training)
        if activation is not None and previous is not None:
            _set_model_activation(model, previous)
    return {'loss': total_loss / count, 'accuracy': correct / count}


def _current_activation(model: nn.Module) -> Optional[AttentionActivation]:
    for module in model.modules():
        if isinstance(module, MultiHeadAttention):
            return module.activation
    return None


def train(task: Union[TaskSpec, TaskData], cfg: TrainConfig, activation: AttentionActivation,
          model_cfg: Optional[ModelConfig] = None) -> TrainResult:
    """
    Train a fresh model on a task

    Args:
        task: task spec (regenerated from its seed) or already generated data
        cfg: loop and optimiser settings
        activation: attention nonlinearity; its noise is used during training
            only when cfg.noise_in_training is set
        model_cfg: base ViT or char-LM config

    Returns:
        TrainResult with per-step train loss rows, periodic eval rows and
        final train/val metrics under the given activation

    Raises:
        DivergenceError: the training loss became non-finite
    """
    data = generate_task(task) if isinstance(task, TaskSpec) else task
    set_determinism(cfg.seed)

    train_activation = activation if cfg.noise_in_training else activation.without_noise()
    model = build_model(data, train_activation, cfg.seed, model_cfg)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2),
                                  eps=cfg.eps, weight_decay=cfg.weight_decay)
    batch_gen = torch.Generator().manual_seed(cfg.seed + BATCH_SEED_OFFSET)
    noise_gen = torch.Generator().manual_seed(cfg.seed + NOISE_SEED_OFFSET) if train_activation.noisy else None

    logger.info(f"Training {type(model).__name__} with {activation.describe()} "
                f"for {cfg.steps} steps (lr={cfg.lr:g}, seed={cfg.seed})")
    history: List[MetricRecord] = []
    n_train = len(data.x_train)
    model.train()
    for step in range(1, cfg.steps + 1):
        idx = torch.randint(0, n_train, (min(cfg.batch_size, n_train),), generator=batch_gen)
        logits = model(data.x_train[idx], noise_gen)
        loss = nll_loss(logits, data.y_train[idx])
        value = loss.item()
        if not math.isfinite(value):
            logger.error(f"✗ Loss diverged at step {step}: {value}")
            raise DivergenceError(f"training loss became non-finite at step {step}", step=step, loss=value)

        optimizer.zero_grad(set_to_none=True)
        loss.backward()
        optimizer.step()
        history.append(MetricRecord(step, 'train', 'loss', value, cfg.seed))

        if cfg.eval_interval and step % cfg.eval_interval == 0:
            for split in ('train', 'val'):
                metrics = evaluate(model, data, split=split, rng=noise_gen)
                for name, metric in metrics.items():
                    history.append(MetricRecord(step, split, name, metric, cfg.seed))
            logger.debug(f"step {step}: train loss {value:.4f}")

    eval_gen = torch.Generator().manual_seed(cfg.seed + NOISE_SEED_OFFSET)
    final: Dict[str, float] = {}
    for split in ('train', 'val'):
        for name, metric in evaluate(model, data, activation, rng=eval_gen, split=split).items():
            final[f"{split}_{name}"] = metric

    logger.info(f"✓ Training finished: train acc {final['train_accuracy']:.4f}, "
                f"val acc {final['val_accuracy']:.4f}, val loss {final['val_loss']:.4f}")
    return TrainResult(history=history, model=model, final=final, data=data)
