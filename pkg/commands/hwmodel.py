"""
hwmodel: latency/power/energy sweeps and the comparison table
"""

import logging
from typing import Any, Dict

from commands.base import Command
from commands.builders import build_hw_config
from hwperf.config import TiaPolicy
from hwperf.model import ArchKind, comparison_table, sweep
from utils.errors import ConfigError
from utils.figures import FigureSpec, PlotKind, Series

logger = logging.getLogger(__name__)


class HwModelCommand(Command):
    name = 'hwmodel'

    def execute(self) -> Dict[str, Any]:
        cfg = self.config
        hw = build_hw_config(cfg)
        try:
            archs = [ArchKind(a) for a in cfg.get_list('hwmodel', 'archs')]
            policy = TiaPolicy(cfg.get('hwmodel', 'tia_policy'))
        except ValueError as e:
            raise ConfigError(f"[hwmodel] {e}")
        n_grid = cfg.get_int_list('hwmodel', 'n_grid')
        baud_grid = cfg.get_float_list('hwmodel', 'baud_grid')
        if not (archs and n_grid and baud_grid):
            raise ConfigError("[hwmodel] archs, n_grid and baud_grid must be non-empty")

        frame = sweep(archs, n_grid, baud_grid, hw, policy)
        self.write_csv(frame, 'hw_sweep.csv')
        table = comparison_table(cfg.get_int('hwmodel', 'table_n'), hw)
        self.write_csv(table, 'comparison_table.csv')

        series = [
            Series(y='latency_s', x='n', label=f"{arch.value} {baud / 1e9:g} GBd",
                   where={'arch': arch.value, 'f_baud': baud})
            for arch in archs for baud in sorted(set(frame['f_baud']))
        ]
        spec = FigureSpec(PlotKind.LINE, series, title='latency per operation',
                          x_label='sequence length n', y_label='latency (s)', x_log=True, y_log=True)
        self.write_figure(spec, frame, 'latency.svg')
        return {'rows': len(frame), 'tia_policy': policy.value}
