"""
train: fit the toy model on a desk-scale task
"""

import logging
from typing import Any, Dict

import pandas as pd

from commands.base import Command
from commands.builders import build_activation, build_model_config, build_task, build_train_config
from kernel.training import train
from utils.figures import FigureSpec, PlotKind, Series

logger = logging.getLogger(__name__)


class TrainCommand(Command):
    name = 'train'

    def execute(self) -> Dict[str, Any]:
        task = build_task(self.config)
        train_cfg = build_train_config(self.config)
        model_cfg = build_model_config(self.config, task)
        activation = build_activation(self.config)

        result = train(task, train_cfg, activation, model_cfg)
        history = result.history_frame()
        self.write_csv(history, 'metrics.csv')
        summary = pd.DataFrame(
            [{'metric': name, 'value': value, 'seed': train_cfg.seed} for name, value in sorted(result.final.items())]
        )
        self.write_csv(summary, 'summary.csv')

        if len(history):
            spec = FigureSpec(PlotKind.LINE,
                              [Series(y='value', x='step', label='train loss',
                                      where={'split': 'train', 'metric': 'loss'})],
                              title=f"training loss ({activation.kind.value})", x_label='step', y_label='loss')
            self.write_figure(spec, history, 'loss.svg')
        return {'final': result.final, 'steps': train_cfg.steps}
