"""
Run configuration
One INI file per run. Every section and key is declared in SCHEMA with its
default; anything else is rejected. Values are kept as text and converted by
the typed getters, so parse -> serialize -> parse is idempotent.
"""

import configparser
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Union

from hwperf.config import HwConfig
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


def _hardware_keys() -> Dict[str, str]:
    # empty means "keep the HwConfig default"
    return {key: '' for key in HwConfig().flat()}


SCHEMA: Dict[str, Dict[str, str]] = {
    'run': {
        'seed': '0',
        'out_dir': '',
    },
    'calibrate': {
        'transfer_csv': '',
        'rec_transfer_csv': '',
        'preset': 'calibration',
        'x_min': '', 'x_max': '',
        'z_min': '', 'z_max': '',
        'bias': '',
        'n': '',
        'q_in_bits': 'inf',
        'q_out_bits': 'inf',
        'grid_points': '256',
        'params_file': 'params.ini',
    },
    'activation': {
        'kind': 'optmax',
        'params_file': '',
        'preset': 'desk',
        'bias': '',
        'q_in_bits': '',
        'q_out_bits': '',
        'noise_mode': 'none',
        'noise_sigma': '0',
        'noise_reference': 'absolute',
    },
    'eval': {
        'input_csv': '',
        'n': '2048',
        'bit_depth': '5',
        'x_min': '0',
        'x_max': '4',
        'scatter': 'true',
    },
    'task': {
        'kind': 'synthetic_patches',
        'num_classes': '10',
        'size': '1000',
        'seed': '0',
        'image_size': '16',
        'channels': '3',
        'pixel_noise': '0.5',
        'context': '16',
    },
    'model': {
        'preset': 'vit-tiny',
        'embed_dim': '', 'hidden_dim': '',
        'heads': '', 'layers': '',
        'patch_size': '', 'dropout': '',
    },
    'train': {
        'lr': '3e-4',
        'steps': '500',
        'batch_size': '32',
        'beta1': '0.9',
        'beta2': '0.95',
        'eps': '1e-8',
        'weight_decay': '0',
        'noise_in_training': 'false',
        'eval_interval': '0',
    },
    'sweep': {
        'axis': 'bits',
        'values': 'inf,16,8,4',
        'variant': 'test_only',
    },
    'hardware': _hardware_keys(),
    'hwmodel': {
        'archs': 'optmax,optmoid',
        'n_grid': '16,32,64,128,256,512,1024,2048',
        'baud_grid': '1e9,10e9,100e9',
        'tia_policy': 'fixed',
        'table_n': '64',
    },
    'sigproc': {
        'trace_csv': '',
        'reference_csv': '',
        't0': '0',
        'baud': '10e9',
        'sample_rate': '80e9',
        'bit_depth': '5',
        'n': '2048',
        'pulse': 'nyquist',
        'noise_sigma': '0',
        'filter': 'true',
        'cutoff': '',
        'taps': '129',
        'target_sps': '20',
        'window_fraction': '0.2',
        'bins': '50',
        'per_symbol': 'false',
    },
}


def _format(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ','.join(_format(v) for v in value)
    return str(value).strip()


class RunConfig:
    """
    Validated view over a run's INI file

    Only explicitly set values are stored; getters fall back to SCHEMA.
    """

    def __init__(self, values: Optional[Dict[str, Dict[str, object]]] = None, source: str = '<memory>'):
        self.source = source
        self._values: Dict[str, Dict[str, str]] = {}
        for section, items in (values or {}).items():
            for key, value in items.items():
                self.set(section, key, value)

    @classmethod
    def from_text(cls, text: str, source: str = '<string>') -> 'RunConfig':
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text, source=source)
        except configparser.Error as e:
            raise ConfigError(f"{source}: {e}")
        return cls({name: dict(parser[name]) for name in parser.sections()}, source=source)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> 'RunConfig':
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        logger.info(f"Loading run config: {path}")
        return cls.from_text(path.read_text(encoding='utf-8'), source=str(path))

    def _check(self, section: str, key: Optional[str] = None) -> None:
        if section not in SCHEMA:
            raise ConfigError(f"{self.source}: unknown section [{section}]")
        if key is not None and key not in SCHEMA[section]:
            raise ConfigError(f"{self.source}: unknown key '{key}' in [{section}]")

    def set(self, section: str, key: str, value) -> None:
        self._check(section, key)
        self._values.setdefault(section, {})[key] = _format(value)

    def is_set(self, section: str, key: str) -> bool:
        self._check(section, key)
        return bool(self._values.get(section, {}).get(key, ''))

    def get(self, section: str, key: str) -> str:
        self._check(section, key)
        return self._values.get(section, {}).get(key, SCHEMA[section][key])

    def overrides(self, section: str) -> Dict[str, str]:
        """Non-empty values explicitly set in a section"""
        self._check(section)
        return {k: v for k, v in self._values.get(section, {}).items() if v != ''}

    def _convert(self, section: str, key: str, kind, text: str):
        try:
            return kind(text)
        except ValueError:
            raise ConfigError(f"{self.source}: [{section}] {key} = '{text}' is not a valid {kind.__name__}")

    def get_int(self, section: str, key: str) -> int:
        return self._convert(section, key, int, self.get(section, key))

    def get_float(self, section: str, key: str) -> float:
        return self._convert(section, key, float, self.get(section, key))

    def get_optional_float(self, section: str, key: str) -> Optional[float]:
        text = self.get(section, key)
        return None if text == '' else self._convert(section, key, float, text)

    def get_optional_int(self, section: str, key: str) -> Optional[int]:
        text = self.get(section, key)
        return None if text == '' else self._convert(section, key, int, text)

    def get_bool(self, section: str, key: str) -> bool:
        text = self.get(section, key).lower()
        if text in _TRUE:
            return True
        if text in _FALSE:
            return False
        raise ConfigError(f"{self.source}: [{section}] {key} = '{text}' is not a boolean")

    def get_list(self, section: str, key: str) -> List[str]:
        return [item.strip() for item in self.get(section, key).split(',') if item.strip()]

    def get_float_list(self, section: str, key: str) -> List[float]:
        return [self._convert(section, key, float, item) for item in self.get_list(section, key)]

    def get_int_list(self, section: str, key: str) -> List[int]:
        return [self._convert(section, key, int, item) for item in self.get_list(section, key)]

    def get_bits(self, section: str, key: str) -> Optional[int]:
        """Bit depth; 'inf' (or empty) disables the quantizer"""
        text = self.get(section, key).strip().lower()
        if text in ('', 'inf', 'none', 'off', 'disabled'):
            return None
        value = self._convert(section, key, float, text)
        if math.isinf(value):
            return None
        if value != int(value) or value < 1:
            raise ConfigError(f"{self.source}: [{section}] {key} = '{text}' is not a positive bit depth")
        return int(value)

    @property
    def seed(self) -> int:
        return self.get_int('run', 'seed')

    def to_text(self) -> str:
        """Sections and keys in sorted order"""
        lines: List[str] = []
        for section in sorted(self._values):
            items = self._values[section]
            if not items:
                continue
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {items[key]}" for key in sorted(items))
            lines.append('')
        return '\n'.join(lines)

    def __eq__(self, other) -> bool:
        return isinstance(other, RunConfig) and self._values == other._values

    def __repr__(self) -> str:
        return f"RunConfig(source={self.source!r}, sections={sorted(self._values)})"
