"""
Latency, power and energy model of the Optmax/Optmoid signal chains

Latency is the pipelined sum of the modulation trains and the per-stage
delays; power sums the subsystems present in each architecture.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd

from hwperf.config import (
    SPEED_OF_LIGHT, TIA_SETTLING_TIME_CONSTANTS, TABLE_SEQUENCE_LENGTH, HwConfig, TiaPolicy,
)
from utils.errors import UnsupportedNError

logger = logging.getLogger(__name__)


class ArchKind(str, Enum):
    OPTMAX = 'optmax'    # two modulation trains, two PD/TIA pairs, one drive amplifier
    OPTMOID = 'optmoid'  # single train


# Stage multiset per architecture: (subsystem, count)
STAGE_COUNTS: Dict[ArchKind, Dict[str, int]] = {
    ArchKind.OPTMAX: {'laser': 1, 'mzm': 2, 'dac': 2, 'drive': 1, 'pd': 2, 'tia': 2, 'adc': 1},
    ArchKind.OPTMOID: {'laser': 1, 'mzm': 1, 'dac': 1, 'drive': 1, 'pd': 1, 'tia': 1, 'adc': 1},
}

# Literature rows at n = 64: latency (s), energy per sequence (J), type, technology
LITERATURE_ROWS = [
    ('nMOS SMA', 5.5e-4, 1.9e-8, 'Electronic', 'Analog'),
    ('Softermax', 7.7e-4, 1.3e-8, 'Electronic', 'Digital'),
    ('Softonic', 1.7e-5, 4.5e-11, 'Optic', 'Analog'),
    ('VEXP', 2.2e-7, 5.0e-8, 'Electronic', 'Digital'),
]

SWEEP_COLUMNS = ['arch', 'n', 'f_baud', 'latency_s', 'power_w', 'energy_seq_j', 'energy_elem_j']
TABLE_COLUMNS = ['architecture', 'latency_s', 'energy_seq_j', 'type', 'technology', 'source']


@dataclass(frozen=True)
class StageLatencies:
    t_dac: float
    t_prop: float
    t_tia: float
    t_adc: float

    def as_dict(self) -> Dict[str, float]:
        return {'T_DAC': self.t_dac, 'T_prop': self.t_prop, 'T_TIA': self.t_tia, 'T_ADC': self.t_adc}


@dataclass(frozen=True)
class PowerBreakdown:
    """Per-subsystem power (W); each entry already multiplied by its stage count"""

    components: Dict[str, float]

    @property
    def total(self) -> float:
        return math.fsum(self.components.values())


@dataclass(frozen=True)
class PerfReport:
    arch: ArchKind
    n: int
    f_baud: float
    latency_s: float
    power_w: float
    breakdown: Dict[str, float] = field(default_factory=dict)
    stages: Dict[str, float] = field(default_factory=dict)

    @property
    def energy_per_sequence_j(self) -> float:
        return self.power_w * self.latency_s

    @property
    def energy_per_element_j(self) -> float:
        return self.energy_per_sequence_j / self.n

    @property
    def ops_per_second(self) -> float:
        return self.n / self.latency_s

    def as_row(self) -> Dict[str, object]:
        return {
            'arch': self.arch.value, 'n': self.n, 'f_baud': self.f_baud,
            'latency_s': self.latency_s, 'power_w': self.power_w,
            'energy_seq_j': self.energy_per_sequence_j, 'energy_elem_j': self.energy_per_element_j,
        }


def stage_latencies(cfg: HwConfig) -> StageLatencies:
    """
    Per-stage delays

    T_prop = n_eff * L / c; T_TIA = 5 / (2 pi f_3dB) (settling to ~0.67%);
    T_DAC = T_ADC = 1 / (samples_per_symbol * f_B).
    """
    t_conv = 1.0 / cfg.converter_rate
    return StageLatencies(
        t_dac=t_conv,
        t_prop=cfg.n_eff * cfg.l_mzm / SPEED_OF_LIGHT,
        t_tia=TIA_SETTLING_TIME_CONSTANTS / (2.0 * math.pi * cfg.tia_bandwidth),
        t_adc=t_conv,
    )


def latency(arch: ArchKind, n: int, cfg: HwConfig) -> float:
    """Seconds to push one n-element sequence through the pipeline"""
    if n < 1:
        raise ValueError(f"Sequence length must be >= 1, got {n}")
    arch = ArchKind(arch)
    st = stage_latencies(cfg)
    trains = 2 if arch is ArchKind.OPTMAX else 1
    return (trains * n / cfg.f_baud
            + trains * (st.t_dac + st.t_prop + st.t_tia)
            + st.t_adc)


def mzm_power(arch: ArchKind, cfg: HwConfig) -> float:
    """RF drive power of a uniformly distributed drive plus thermal bias, one modulator"""
    arch = ArchKind(arch)
    if arch is ArchKind.OPTMAX:
        v_max, p_dc = cfg.mzm.v_max_optmax, cfg.mzm.p_dc_optmax
    else:
        v_max, p_dc = cfg.mzm.v_max_optmoid, cfg.mzm.p_dc_optmoid
    v_rms = v_max / (2.0 * math.sqrt(3.0))
    return v_rms ** 2 / cfg.mzm.r_term + p_dc


def laser_power(cfg: HwConfig) -> float:
    las = cfg.laser
    return las.v_l * (las.p_opt / las.gamma_l + las.i_th)


def power(arch: ArchKind, cfg: HwConfig) -> PowerBreakdown:
    """
    Subsystem power budget for one architecture

    DAC/ADC power scales linearly from the reference rate to
    samples_per_symbol * f_B.
    """
    arch = ArchKind(arch)
    scale = cfg.converter_rate / cfg.reference.rate_ref
    unit = {
        'laser': laser_power(cfg),
        'mzm': mzm_power(arch, cfg),
        'dac': cfg.reference.p_dac_ref * scale,
        'drive': cfg.reference.p_drive,
        'pd': cfg.reference.p_pd,
        'tia': cfg.reference.p_tia,
        'adc': cfg.reference.p_adc_ref * scale,
    }
    return PowerBreakdown({name: count * unit[name] for name, count in STAGE_COUNTS[arch].items()})


def energy(arch: ArchKind, n: int, cfg: HwConfig) -> PerfReport:
    arch = ArchKind(arch)
    budget = power(arch, cfg)
    report = PerfReport(
        arch=arch, n=int(n), f_baud=cfg.f_baud, latency_s=latency(arch, n, cfg),
        power_w=budget.total, breakdown=dict(budget.components),
        stages=stage_latencies(cfg).as_dict(),
    )
    logger.debug(f"{arch.value} n={n} f_B={cfg.f_baud:.3g}: T={report.latency_s:.4e}s "
                 f"P={report.power_w:.4f}W E={report.energy_per_sequence_j:.4e}J")
    return report


def sweep(archs: Iterable[ArchKind], n_grid: Sequence[int], baud_grid: Sequence[float],
          cfg: Optional[HwConfig] = None, tia_policy: Optional[TiaPolicy] = None) -> pd.DataFrame:
    """
    Latency/energy over a grid of sequence lengths and baud rates

    Returns:
        DataFrame with columns arch,n,f_baud,latency_s,power_w,energy_seq_j,energy_elem_j
    """
    archs = [ArchKind(a) for a in archs]
    if not archs or not n_grid or not baud_grid:
        raise ValueError("Hardware sweep needs non-empty architecture, n and baud grids")
    cfg = cfg or HwConfig()
    if tia_policy is not None:
        cfg = replace(cfg, tia_policy=TiaPolicy(tia_policy))
    rows: List[Dict[str, object]] = []
    for arch in archs:
        for f_baud in baud_grid:
            point_cfg = cfg.with_baud(f_baud)
            for n in n_grid:
                rows.append(energy(arch, int(n), point_cfg).as_row())
    logger.info(f"✓ Hardware sweep: {len(rows)} points ({cfg.tia_policy.value} TIA bandwidth)")
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def comparison_table(n: int = TABLE_SEQUENCE_LENGTH, cfg: Optional[HwConfig] = None) -> pd.DataFrame:
    """
    Literature rows next to the computed Optmax/Optmoid rows

    Raises:
        UnsupportedNError: the literature constants exist only for n = 64
    """
    if n != TABLE_SEQUENCE_LENGTH:
        raise UnsupportedNError(
            f"Comparison constants are defined only at n={TABLE_SEQUENCE_LENGTH}, got n={n}"
        )
    cfg = cfg or HwConfig()
    rows = [
        {'architecture': name, 'latency_s': lat, 'energy_seq_j': e, 'type': kind,
         'technology': tech, 'source': 'literature'}
        for name, lat, e, kind, tech in LITERATURE_ROWS
    ]
    for arch, label in ((ArchKind.OPTMAX, 'Optmax'), (ArchKind.OPTMOID, 'Optmoid')):
        report = energy(arch, n, cfg)
        rows.append({'architecture': label, 'latency_s': report.latency_s,
                     'energy_seq_j': report.energy_per_sequence_j, 'type': 'Electro-Optic',
                     'technology': 'Analog', 'source': 'model'})
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)
