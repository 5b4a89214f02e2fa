"""
Config -> domain object builders shared by the subcommands
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from activations.calibration import calibrate_optmax, calibrate_optmoid
from activations.dispatch import AttentionActivation, DigitalParams, Nonlinearity
from activations.noise import NoiseSpec
from activations.params_io import load_params
from activations.presets import get_preset
from activations.quantization import QuantSpec
from hwperf.config import HwConfig
from kernel.charlm import CHARLM_PRESETS, get_charlm_preset
from kernel.tasks import TaskKind, TaskSpec
from kernel.training import ModelConfig, TrainConfig
from kernel.vit import get_vit_preset
from mzm.transfer import SineTransferModel
from utils.errors import ConfigError, ParseError
from utils.run_config import RunConfig

logger = logging.getLogger(__name__)


def resolve_path(config: RunConfig, text: str) -> Path:
    """Relative paths in a config file are taken relative to that file"""
    path = Path(text)
    if path.is_absolute() or config.source.startswith('<'):
        return path
    return Path(config.source).parent / path


def noise_spec(config: RunConfig, section: str = 'activation') -> NoiseSpec:
    try:
        return NoiseSpec(config.get(section, 'noise_mode'), config.get_float(section, 'noise_sigma'),
                         config.get(section, 'noise_reference'))
    except ValueError as e:
        raise ConfigError(f"[{section}] noise settings: {e}")


def _kind(config: RunConfig) -> Nonlinearity:
    try:
        return Nonlinearity(config.get('activation', 'kind'))
    except ValueError:
        raise ConfigError(f"[activation] kind must be one of "
                          f"{', '.join(k.value for k in Nonlinearity)}, got '{config.get('activation', 'kind')}'")


def activation_bias(config: RunConfig) -> float:
    bias = config.get_optional_float('activation', 'bias')
    if bias is not None:
        return bias
    return get_preset(config.get('activation', 'preset')).bias


def build_activation(config: RunConfig) -> AttentionActivation:
    """
    Attention activation from the [activation] section

    Optmax/Optmoid records come from params_file when given, otherwise they
    are calibrated on the reference modulator over the preset's ranges.
    Explicit bit depths, noise and bias override the record.
    """
    kind = _kind(config)
    noise = noise_spec(config)
    q_out_bits = config.get_bits('activation', 'q_out_bits')

    if kind in (Nonlinearity.SOFTMAX, Nonlinearity.SIGMOID):
        bias = activation_bias(config) if kind is Nonlinearity.SIGMOID else 0.0
        return AttentionActivation(kind, DigitalParams(bias=bias, q_out=QuantSpec(q_out_bits, 0.0, 1.0),
                                                       noise=noise))

    params = _analog_params(config, kind)
    settings = {}
    if config.is_set('activation', 'q_in_bits'):
        settings['q_in'] = replace(params.q_in, bits=config.get_bits('activation', 'q_in_bits'))
    if config.is_set('activation', 'q_out_bits'):
        settings['q_out'] = replace(params.q_out, bits=q_out_bits)
    if noise.active:
        settings['noise'] = noise
    if kind is Nonlinearity.OPTMOID and config.is_set('activation', 'bias'):
        settings['bias'] = activation_bias(config)
    activation = AttentionActivation(kind, params.with_settings(**settings) if settings else params)
    logger.info(f"Activation: {activation.describe()}")
    return activation


def _analog_params(config: RunConfig, kind: Nonlinearity):
    if config.is_set('activation', 'params_file'):
        doc = load_params(resolve_path(config, config.get('activation', 'params_file')))
        params = doc.optmax if kind is Nonlinearity.OPTMAX else doc.optmoid
        if params is None:
            raise ConfigError(f"Parameter file holds no [{kind.value}] record")
        return params

    preset = get_preset(config.get('activation', 'preset'))
    model = SineTransferModel.reference()
    if kind is Nonlinearity.OPTMAX:
        return calibrate_optmax(model, model, preset.x_range, preset.z_range)
    return calibrate_optmoid(model, activation_bias(config), preset.x_range)


def build_task(config: RunConfig) -> TaskSpec:
    try:
        return TaskSpec(
            kind=TaskKind(config.get('task', 'kind')),
            num_classes=config.get_int('task', 'num_classes'),
            size=config.get_int('task', 'size'),
            seed=config.get_int('task', 'seed'),
            image_size=config.get_int('task', 'image_size'),
            channels=config.get_int('task', 'channels'),
            pixel_noise=config.get_float('task', 'pixel_noise'),
            context=config.get_int('task', 'context'),
        )
    except ValueError as e:
        raise ConfigError(f"[task] {e}")


_MODEL_INT_KEYS = ('embed_dim', 'hidden_dim', 'heads', 'layers', 'patch_size')


def build_model_config(config: RunConfig, task: TaskSpec) -> ModelConfig:
    """Model preset with [model] overrides; char_lm tasks default to charlm-tiny"""
    name = config.get('model', 'preset')
    if task.kind is TaskKind.CHAR_LM and name not in CHARLM_PRESETS:
        name = 'charlm-tiny'
    base = get_charlm_preset(name) if name in CHARLM_PRESETS else get_vit_preset(name)

    overrides = {}
    for key in _MODEL_INT_KEYS:
        value = config.get_optional_int('model', key)
        if value is not None:
            if not hasattr(base, key):
                raise ConfigError(f"[model] {key} does not apply to preset '{name}'")
            overrides[key] = value
    dropout = config.get_optional_float('model', 'dropout')
    if dropout is not None:
        overrides['dropout'] = dropout
    return replace(base, **overrides) if overrides else base


def build_train_config(config: RunConfig) -> TrainConfig:
    try:
        return TrainConfig(
            lr=config.get_float('train', 'lr'),
            steps=config.get_int('train', 'steps'),
            batch_size=config.get_int('train', 'batch_size'),
            seed=config.seed,
            beta1=config.get_float('train', 'beta1'),
            beta2=config.get_float('train', 'beta2'),
            eps=config.get_float('train', 'eps'),
            weight_decay=config.get_float('train', 'weight_decay'),
            noise_in_training=config.get_bool('train', 'noise_in_training'),
            eval_interval=config.get_int('train', 'eval_interval'),
        )
    except ValueError as e:
        raise ConfigError(f"[train] {e}")


def build_hw_config(config: RunConfig) -> HwConfig:
    try:
        return HwConfig.from_flat(config.overrides('hardware'))
    except (KeyError, ValueError) as e:
        raise ConfigError(f"[hardware] {e}")


def value_range(config: RunConfig, section: str, lo_key: str, hi_key: str,
                default: Tuple[float, float]) -> Tuple[float, float]:
    lo = config.get_optional_float(section, lo_key)
    hi = config.get_optional_float(section, hi_key)
    return (default[0] if lo is None else lo, default[1] if hi is None else hi)


def optional_path(config: RunConfig, section: str, key: str) -> Optional[Path]:
    return resolve_path(config, config.get(section, key)) if config.is_set(section, key) else None


def load_column(path: Path, column: str) -> np.ndarray:
    """Values of a single-column CSV whose header is `column`"""
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ParseError(f"unreadable file ({e})", path=str(path)) from e
    except FileNotFoundError as e:
        raise ParseError("file not found", path=str(path)) from e
    if list(frame.columns) != [column]:
        raise ParseError(f"expected header '{column}', got {','.join(map(str, frame.columns))}",
                         path=str(path), line=1)
    values = pd.to_numeric(frame[column], errors='coerce').to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise ParseError("not a finite number", path=str(path), line=int(bad[0]) + 2)
    return values
