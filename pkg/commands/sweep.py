"""
sweep: quantization or noise sweep of the toy model
"""

import logging
from typing import Any, Dict

import numpy as np
import pandas as pd

from commands.base import Command
from commands.builders import build_activation, build_model_config, build_task, build_train_config
from kernel.sweep import SweepAxis, SweepVariant, sweep
from utils.errors import ConfigError
from utils.exporter import write_dataframe
from utils.figures import FigureSpec, PlotKind, Series

logger = logging.getLogger(__name__)

RESULTS_FILENAME = 'sweep.csv'


class SweepCommand(Command):
    name = 'sweep'

    def _axis_values(self, axis: SweepAxis) -> list:
        values = self.config.get_list('sweep', 'values')
        if not values:
            raise ConfigError("[sweep] values must list at least one point")
        if axis is SweepAxis.SIGMA:
            return self.config.get_float_list('sweep', 'values')
        return values

    def execute(self) -> Dict[str, Any]:
        cfg = self.config
        try:
            axis = SweepAxis(cfg.get('sweep', 'axis'))
            variant = SweepVariant(cfg.get('sweep', 'variant'))
        except ValueError as e:
            raise ConfigError(f"[sweep] {e}")
        task = build_task(cfg)
        train_cfg = build_train_config(cfg)
        model_cfg = build_model_config(cfg, task)
        activation = build_activation(cfg)
        results_path = self.out_dir / RESULTS_FILENAME

        def flush(partial: pd.DataFrame) -> None:
            write_dataframe(partial, results_path)

        frame = sweep(axis, self._axis_values(axis), task, train_cfg, activation, variant, model_cfg,
                      on_point=flush)
        self.write_csv(frame, RESULTS_FILENAME)

        curve = frame[(frame['split'] == 'val') & (frame['metric'] == 'accuracy')].copy()
        curve['order'] = np.arange(len(curve), dtype=float)
        spec = FigureSpec(PlotKind.LINE, [Series(y='value', x='order', label='val accuracy')],
                          title=f"{axis.value} sweep ({variant.value}): points {', '.join(curve['point'])}",
                          x_label=f"{axis.value} point index", y_label='accuracy')
        self.write_figure(spec, curve, 'sweep.svg')
        return {'axis': axis.value, 'variant': variant.value, 'points': len(curve)}
