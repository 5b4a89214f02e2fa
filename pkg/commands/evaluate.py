"""
eval: run one activation over an input vector
"""

import logging
from typing import Any, Dict

import numpy as np
import pandas as pd

from commands.base import Command
from commands.builders import build_activation, load_column, optional_path
from sigproc.waveform import random_symbols
from utils.figures import FigureSpec, PlotKind, Series

logger = logging.getLogger(__name__)

INPUT_COLUMN = 'x'
OUTPUT_COLUMNS = ['index', 'x', 'y']


class EvalCommand(Command):
    name = 'eval'

    def execute(self) -> Dict[str, Any]:
        cfg = self.config
        activation = build_activation(cfg)
        rng = np.random.default_rng(self.seed)

        input_path = optional_path(cfg, 'eval', 'input_csv')
        if input_path is not None:
            x = load_column(input_path, INPUT_COLUMN)
            logger.info(f"Loaded {x.size} inputs from {input_path}")
        else:
            n = cfg.get_int('eval', 'n')
            bits = cfg.get_bits('eval', 'bit_depth')
            lo, hi = cfg.get_float('eval', 'x_min'), cfg.get_float('eval', 'x_max')
            x = random_symbols(n, bits, rng, lo, hi) if bits is not None else rng.uniform(lo, hi, size=n)
            logger.info(f"Generated {n} inputs on [{lo:g}, {hi:g}] ({bits or 'continuous'} bits)")

        y = np.asarray(activation(x, rng if activation.noisy else None), dtype=float)
        frame = pd.DataFrame({'index': np.arange(x.size), 'x': x, 'y': y}, columns=OUTPUT_COLUMNS)
        self.write_csv(frame, 'activation.csv')

        if cfg.get_bool('eval', 'scatter'):
            spec = FigureSpec(PlotKind.SCATTER, [Series(y='y', x='x', label=activation.kind.value)],
                              title=f"{activation.kind.value} transfer", x_label='input x',
                              y_label='output')
            self.write_figure(spec, frame, 'activation.svg')
        return {'activation': activation.describe(), 'n': int(x.size)}
