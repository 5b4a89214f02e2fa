import math

import pytest

from hwperf.config import HwConfig, TiaPolicy
from hwperf.model import (
    ArchKind, comparison_table, energy, laser_power, latency, mzm_power, power, stage_latencies, sweep,
)
from utils.errors import UnsupportedNError


@pytest.fixture
def cfg():
    return HwConfig()


def test_stage_latencies(cfg):
    st = stage_latencies(cfg)
    assert st.t_prop == pytest.approx(29e-12, rel=0.01)
    assert st.t_tia == pytest.approx(20e-12, rel=0.01)
    assert st.t_dac == pytest.approx(25e-12, rel=1e-12)
    assert st.t_adc == st.t_dac


@pytest.mark.parametrize('arch,n,expected,tol', [
    (ArchKind.OPTMAX, 64, 1.3e-8, 0.02),
    (ArchKind.OPTMOID, 64, 6.5e-9, 0.02),
    (ArchKind.OPTMAX, 2048, 410e-9, 0.01),
])
def test_latency_golden_values(cfg, arch, n, expected, tol):
    assert latency(arch, n, cfg) == pytest.approx(expected, rel=tol)


def test_latency_formula(cfg):
    st = stage_latencies(cfg)
    assert latency('optmoid', 10, cfg) == pytest.approx(
        10 / cfg.f_baud + st.t_dac + st.t_prop + st.t_tia + st.t_adc, rel=1e-12)
    with pytest.raises(ValueError):
        latency(ArchKind.OPTMAX, 0, cfg)


def test_power_golden_values(cfg):
    assert laser_power(cfg) == pytest.approx(0.43, rel=0.01)
    assert mzm_power(ArchKind.OPTMAX, cfg) == pytest.approx(27.5e-3, rel=0.01)
    assert mzm_power(ArchKind.OPTMOID, cfg) == pytest.approx(80.3e-3, rel=0.01)
    assert power(ArchKind.OPTMAX, cfg).total == pytest.approx(772e-3, rel=0.01)
    assert power(ArchKind.OPTMOID, cfg).total == pytest.approx(731e-3, rel=0.01)


def test_power_breakdown_sums_to_total(cfg):
    for arch in ArchKind:
        budget = power(arch, cfg)
        assert math.fsum(budget.components.values()) == pytest.approx(budget.total, rel=1e-12)
    optmax = power(ArchKind.OPTMAX, cfg).components
    assert optmax['dac'] == pytest.approx(2 * 132.25e-3 * 40 / 97, rel=1e-12)
    assert optmax['tia'] == pytest.approx(2 * 11.2e-3)


def test_converter_power_scales_with_rate(cfg):
    slow = power(ArchKind.OPTMOID, cfg.with_baud(5e9)).components
    fast = power(ArchKind.OPTMOID, cfg).components
    assert fast['adc'] == pytest.approx(2 * slow['adc'], rel=1e-12)


def test_energy_golden_values(cfg):
    assert energy(ArchKind.OPTMAX, 64, cfg).energy_per_sequence_j == pytest.approx(1.0e-8, rel=0.03)
    assert energy(ArchKind.OPTMOID, 64, cfg).energy_per_sequence_j == pytest.approx(4.7e-9, rel=0.03)
    long = energy(ArchKind.OPTMAX, 2048, cfg)
    assert long.energy_per_element_j == pytest.approx(154e-12, rel=0.02)
    assert long.ops_per_second == pytest.approx(5e9, rel=0.02)


def test_report_identities(cfg):
    report = energy(ArchKind.OPTMOID, 300, cfg)
    assert report.energy_per_sequence_j / report.latency_s == pytest.approx(report.power_w, rel=1e-12)
    assert report.energy_per_element_j * 300 == pytest.approx(report.energy_per_sequence_j, rel=1e-12)
    assert set(report.stages) == {'T_DAC', 'T_prop', 'T_TIA', 'T_ADC'}


def test_sweep_orderings(cfg):
    frame = sweep(list(ArchKind), [16, 32, 64, 128], [1e9, 10e9, 100e9], cfg)
    assert len(frame) == 2 * 4 * 3
    for (arch, f_baud), group in frame.groupby(['arch', 'f_baud']):
        assert group.sort_values('n').latency_s.is_monotonic_increasing
    pivot = frame.pivot_table(index=['n', 'f_baud'], columns='arch', values='latency_s')
    assert (pivot['optmoid'] < pivot['optmax']).all()
    by_baud = frame[(frame.arch == 'optmax') & (frame.n == 64)].set_index('f_baud').latency_s
    assert by_baud[100e9] < by_baud[10e9] < by_baud[1e9]


def test_tia_policy(cfg):
    fixed = stage_latencies(cfg.with_baud(1e9))
    scaled = stage_latencies(HwConfig(f_baud=1e9, tia_policy=TiaPolicy.SCALE))
    assert HwConfig().f_3db == 40e9
    assert fixed.t_tia == pytest.approx(20e-12, rel=0.01)
    assert scaled.t_tia == pytest.approx(5 / (2 * math.pi * 4e9))
    frame = sweep(['optmax'], [64], [1e9], cfg, tia_policy='scale')
    assert frame.latency_s.iloc[0] == pytest.approx(latency(ArchKind.OPTMAX, 64, HwConfig(
        f_baud=1e9, tia_policy='scale')))
    with pytest.raises(ValueError):
        sweep([], [64], [1e9])


def test_comparison_table(cfg):
    table = comparison_table(64, cfg).set_index('architecture')
    assert table.loc['VEXP', 'latency_s'] == 2.2e-7
    assert table.loc['VEXP', 'energy_seq_j'] == 5.0e-8
    assert table.energy_seq_j.idxmin() == 'Softonic'
    optmoid = energy(ArchKind.OPTMOID, 64, cfg)
    assert table.loc['Optmoid', 'latency_s'] == optmoid.latency_s
    assert table.loc['Optmoid', 'energy_seq_j'] == optmoid.energy_per_sequence_j
    with pytest.raises(UnsupportedNError):
        comparison_table(128)


def test_flat_config_round_trip(cfg):
    flat = cfg.flat()
    assert flat['laser_v_l'] == 1.6 and flat['tia_policy'] == 'fixed'
    assert HwConfig.from_flat({k: str(v) for k, v in flat.items()}) == cfg
    assert HwConfig.from_flat({'f_baud': '1e9', 'mzm_r_term': '25'}).mzm.r_term == 25.0
    with pytest.raises(KeyError):
        HwConfig.from_flat({'laser_colour': 'red'})
    with pytest.raises(ValueError):
        HwConfig(f_baud=-1.0)
