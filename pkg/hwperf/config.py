"""
Configuration for the signal-chain performance model
Default values are the characterised subsystem figures; every field can be
overridden from the [hardware] section of a run config.
"""
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Dict

SPEED_OF_LIGHT = 299_792_458.0  # m/s
TIA_SETTLING_TIME_CONSTANTS = 5  # ~0.67% residual error after 5 tau

# Reference converter figures at the reference sample rate
DAC_REFERENCE_POWER = 132.25e-3  # W
ADC_REFERENCE_POWER = 130.25e-3  # W
CONVERTER_REFERENCE_RATE = 97e9  # samples/s

# Sweep defaults
SWEEP_BAUD_RATES = (1e9, 10e9, 100e9)
SWEEP_SEQUENCE_LENGTHS = (16, 32, 64, 128, 256, 512, 1024, 2048)
TABLE_SEQUENCE_LENGTH = 64


class TiaPolicy(str, Enum):
    FIXED = 'fixed'  # f_3dB stays at the configured value
    SCALE = 'scale'  # f_3dB = 4 * f_B


@dataclass(frozen=True)
class LaserConfig:
    v_l: float = 1.6          # V
    gamma_l: float = 0.24     # W/A slope efficiency
    i_th: float = 60e-3       # A
    p_opt: float = 50e-3      # W


@dataclass(frozen=True)
class MzmConfig:
    r_term: float = 50.0      # ohm
    v_max_optmax: float = 2.87   # V, rising/falling slope drive
    v_max_optmoid: float = 5.73  # V, full swing drive
    p_dc_optmax: float = 13.8e-3   # W, thermal bias
    p_dc_optmoid: float = 25.6e-3  # W


@dataclass(frozen=True)
class ReferenceConfig:
    p_dac_ref: float = DAC_REFERENCE_POWER
    p_adc_ref: float = ADC_REFERENCE_POWER
    rate_ref: float = CONVERTER_REFERENCE_RATE
    p_drive: float = 100e-3   # W
    p_pd: float = 1e-3        # W
    p_tia: float = 11.2e-3    # W


@dataclass(frozen=True)
class HwConfig:
    """
    Subsystem parameters of the electro-optic signal chain

    Args:
        f_baud: symbol rate (Baud)
        samples_per_symbol: DAC/ADC oversampling factor
        l_mzm: modulator length (m)
        n_eff: effective index
        f_3db: TIA bandwidth (Hz), used as-is under the fixed policy
        tia_policy: whether f_3db stays fixed or tracks 4 * f_baud
    """

    f_baud: float = 10e9
    samples_per_symbol: int = 4
    l_mzm: float = 7.3e-3
    n_eff: float = 1.2
    f_3db: float = 40e9
    tia_policy: TiaPolicy = TiaPolicy.FIXED
    laser: LaserConfig = field(default_factory=LaserConfig)
    mzm: MzmConfig = field(default_factory=MzmConfig)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)

    def __post_init__(self):
        object.__setattr__(self, 'tia_policy', TiaPolicy(self.tia_policy))
        if self.samples_per_symbol < 1:
            raise ValueError(f"samples_per_symbol must be >= 1, got {self.samples_per_symbol}")
        for name, value in self.flat().items():
            if isinstance(value, float) and not value > 0:
                raise ValueError(f"Hardware parameter {name} must be positive, got {value}")

    @property
    def tia_bandwidth(self) -> float:
        if self.tia_policy is TiaPolicy.SCALE:
            return 4.0 * self.f_baud
        return self.f_3db

    @property
    def converter_rate(self) -> float:
        return self.samples_per_symbol * self.f_baud

    def with_baud(self, f_baud: float) -> 'HwConfig':
        return replace(self, f_baud=float(f_baud))

    def flat(self) -> Dict[str, object]:
        """Flat key/value view, nested groups prefixed (laser_v_l, mzm_r_term, ...)"""
        out: Dict[str, object] = {}
        for key, value in asdict(self).items():
            if isinstance(value, dict):
                for sub, sub_value in value.items():
                    out[f"{key}_{sub}"] = sub_value
            else:
                out[key] = value.value if isinstance(value, Enum) else value
        return out

    @classmethod
    def from_flat(cls, values: Dict[str, str]) -> 'HwConfig':
        """Build from string overrides keyed like flat(); unknown keys raise KeyError"""
        base = cls().flat()
        unknown = sorted(set(values) - set(base))
        if unknown:
            raise KeyError(', '.join(unknown))
        merged = dict(base)
        for key, text in values.items():
            default = base[key]
            if isinstance(default, int) and not isinstance(default, bool):
                merged[key] = int(text)
            elif isinstance(default, float):
                merged[key] = float(text)
            else:
                merged[key] = str(text).strip()
        groups = {'laser': LaserConfig, 'mzm': MzmConfig, 'reference': ReferenceConfig}
        nested = {
            name: kind(**{k[len(name) + 1:]: v for k, v in merged.items() if k.startswith(name + '_')})
            for name, kind in groups.items()
        }
        top = {k: v for k, v in merged.items() if not any(k.startswith(g + '_') for g in groups)}
        return cls(**top, **nested)
