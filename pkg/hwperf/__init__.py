# hwperf/__init__.py
from .config import HwConfig, LaserConfig, MzmConfig, ReferenceConfig, TiaPolicy
from .model import (
    ArchKind, PerfReport, PowerBreakdown, StageLatencies,
    stage_latencies, latency, power, energy, sweep, comparison_table,
)

__all__ = [
    'HwConfig', 'LaserConfig', 'MzmConfig', 'ReferenceConfig', 'TiaPolicy',
    'ArchKind', 'PerfReport', 'PowerBreakdown', 'StageLatencies',
    'stage_latencies', 'latency', 'power', 'energy', 'sweep', 'comparison_table',
]
