"""
Quantization and noise sweeps
Trains and evaluates the toy model once per axis value. The test_only variant
trains a single noise-free model and varies only the evaluation activation;
train_and_test retrains at every point with the point's settings.
"""

import logging
import math
from dataclasses import replace
from enum import Enum
from typing import Callable, List, Optional, Sequence, Union

import pandas as pd
import torch

from activations.dispatch import AttentionActivation, Nonlinearity
from activations.noise import NoiseMode, NoiseSpec
from activations.quantization import QuantSpec, bits_label, parse_bits
from kernel.tasks import TaskData, TaskSpec, generate_task
from kernel.training import (NOISE_SEED_OFFSET, ModelConfig, TrainConfig, evaluate, train)
from utils.errors import EmptyInputError

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['axis', 'point', 'variant', 'split', 'metric', 'value', 'seed']

# Noise mode used by the sigma axis when the base activation has none
DEFAULT_SIGMA_MODE = NoiseMode.ADDITIVE


class SweepAxis(str, Enum):
    BITS = 'bits'
    SIGMA = 'sigma'
    NOISE_MODE = 'noise_mode'


class SweepVariant(str, Enum):
    TEST_ONLY = 'test_only'
    TRAIN_AND_TEST = 'train_and_test'


def _input_range(activation: AttentionActivation):
    p = activation.params
    if activation.kind in (Nonlinearity.OPTMAX, Nonlinearity.OPTMOID):
        if math.isfinite(p.x_min) and math.isfinite(p.x_max):
            return p.x_min, p.x_max
    return None


def point_activation(base: AttentionActivation, axis: SweepAxis, point: Union[str, float, int, None]
                     ) -> AttentionActivation:
    """The base activation with one axis set to a sweep value"""
    axis = SweepAxis(axis)
    if axis is SweepAxis.BITS:
        bits = parse_bits(point) if isinstance(point, str) or point is None else int(point)
        settings = {'q_out': QuantSpec(bits, 0.0, 1.0)}
        span = _input_range(base)
        if span is not None:
            settings['q_in'] = QuantSpec(bits, *span)
        return base.with_settings(**settings)

    noise = base.params.noise
    if axis is SweepAxis.SIGMA:
        mode = noise.mode if noise.active else DEFAULT_SIGMA_MODE
        return base.with_settings(noise=NoiseSpec(mode, float(point), noise.reference))
    return base.with_settings(noise=NoiseSpec(NoiseMode(point), noise.sigma, noise.reference))


def point_label(axis: SweepAxis, point) -> str:
    if SweepAxis(axis) is SweepAxis.BITS:
        return bits_label(parse_bits(point) if isinstance(point, str) or point is None else point)
    if SweepAxis(axis) is SweepAxis.SIGMA:
        return f"{float(point):g}"
    return NoiseMode(point).value


def sweep(axis: Union[SweepAxis, str], values: Sequence, task: Union[TaskSpec, TaskData],
          train_cfg: TrainConfig, activation: AttentionActivation,
          variant: Union[SweepVariant, str] = SweepVariant.TEST_ONLY,
          model_cfg: Optional[ModelConfig] = None,
          on_point: Optional[Callable[[pd.DataFrame], None]] = None) -> pd.DataFrame:
    """
    Run a sweep over one axis

    Args:
        axis: bits (None/'inf' disables the quantizers), sigma or noise_mode
        values: axis values, evaluated in order
        task: task spec or generated data shared by every point
        train_cfg: training settings; noise_in_training is overridden by the variant
        activation: base attention activation
        variant: test_only or train_and_test
        model_cfg: base model config
        on_point: called with the rows gathered so far after each point

    Returns:
        DataFrame with columns axis, point, variant, split, metric, value, seed

    Raises:
        EmptyInputError: no values given
    """
    axis, variant = SweepAxis(axis), SweepVariant(variant)
    if len(values) == 0:
        raise EmptyInputError(f"sweep over {axis.value} needs at least one value")
    data = generate_task(task) if isinstance(task, TaskSpec) else task

    trained = None
    if variant is SweepVariant.TEST_ONLY:
        trained = train(data, _with_noise_flag(train_cfg, False), activation.without_noise(), model_cfg).model

    rows: List[dict] = []
    for point in values:
        label = point_label(axis, point)
        act = point_activation(activation, axis, point)
        logger.info(f"Sweep {axis.value}={label} ({variant.value}): {act.describe()}")
        if variant is SweepVariant.TRAIN_AND_TEST:
            model = train(data, _with_noise_flag(train_cfg, act.noisy), act, model_cfg).model
        else:
            model = trained

        for split in ('train', 'val'):
            rng = torch.Generator().manual_seed(train_cfg.seed + NOISE_SEED_OFFSET)
            for metric, value in evaluate(model, data, act, rng=rng, split=split).items():
                rows.append({'axis': axis.value, 'point': label, 'variant': variant.value,
                             'split': split, 'metric': metric, 'value': value, 'seed': train_cfg.seed})
        if on_point is not None:
            on_point(pd.DataFrame(rows, columns=SWEEP_COLUMNS))

    frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    logger.info(f"✓ Sweep over {axis.value} finished: {len(values)} points, {len(frame)} rows")
    return frame


def _with_noise_flag(cfg: TrainConfig, enabled: bool) -> TrainConfig:
    return replace(cfg, noise_in_training=enabled)
