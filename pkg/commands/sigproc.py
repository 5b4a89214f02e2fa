"""
sigproc: trace -> low-pass -> decimate -> symbol integration -> error histogram
"""

import logging
from typing import Any, Dict, Tuple

import numpy as np

from activations.noise import NoiseMode, NoiseSpec
from commands.base import Command
from commands.builders import load_column, optional_path
from mzm.transfer import SineTransferModel, SlopeSegment, make_encoder, slope_window, transmission
from sigproc.filtering import CUTOFF_PER_BAUD, FirSpec, decimate, decimation_factor, fir_lowpass
from sigproc.symbols import error_stats, integrate_symbols, save_error_stats
from sigproc.trace import Trace, load_trace, save_trace
from sigproc.waveform import PulseShape, WaveformSpec, random_symbols, synthesize_trace
from utils.errors import ConfigError
from utils.figures import FigureSpec, PlotKind, Series

logger = logging.getLogger(__name__)

REFERENCE_COLUMN = 'reference'


class SigprocCommand(Command):
    name = 'sigproc'

    def _synthesize(self, baud: float) -> Tuple[Trace, np.ndarray]:
        cfg = self.config
        try:
            spec = WaveformSpec(baud=baud, sample_rate=cfg.get_float('sigproc', 'sample_rate'),
                                bit_depth=cfg.get_bits('sigproc', 'bit_depth'), n=cfg.get_int('sigproc', 'n'),
                                pulse=PulseShape(cfg.get('sigproc', 'pulse')))
        except ValueError as e:
            raise ConfigError(f"[sigproc] {e}")
        rng = np.random.default_rng(self.seed)
        bits = spec.bit_depth
        symbols = random_symbols(spec.n, bits, rng) if bits is not None else rng.uniform(0.0, 1.0, size=spec.n)

        model = SineTransferModel.reference()
        encoder = make_encoder(0.0, 1.0, slope_window(model, SlopeSegment.RISING))
        sigma = cfg.get_float('sigproc', 'noise_sigma')
        noise = NoiseSpec(NoiseMode.ADDITIVE, sigma) if sigma > 0 else NoiseSpec()
        trace = synthesize_trace(symbols, spec, model, encoder, noise, rng)
        reference = transmission(model, encoder(symbols))
        self.record(save_trace(trace, self.out_dir / 'trace.csv'))
        return trace, np.asarray(reference, dtype=float)

    def execute(self) -> Dict[str, Any]:
        cfg = self.config
        baud = cfg.get_float('sigproc', 'baud')

        trace_path = optional_path(cfg, 'sigproc', 'trace_csv')
        if trace_path is not None:
            reference_path = optional_path(cfg, 'sigproc', 'reference_csv')
            if reference_path is None:
                raise ConfigError("[sigproc] reference_csv is required with trace_csv")
            trace = load_trace(trace_path)
            reference = load_column(reference_path, REFERENCE_COLUMN)
            t_start = cfg.get_float('sigproc', 't0')
        else:
            trace, reference = self._synthesize(baud)
            t_start = None

        if cfg.get_bool('sigproc', 'filter'):
            cutoff = cfg.get_optional_float('sigproc', 'cutoff') or CUTOFF_PER_BAUD * baud
            trace = fir_lowpass(trace, FirSpec(cutoff, cfg.get_int('sigproc', 'taps')))
        factor = decimation_factor(trace.sample_rate, baud, cfg.get_int('sigproc', 'target_sps'))
        trace = decimate(trace, factor)

        measured = integrate_symbols(trace, baud, cfg.get_float('sigproc', 'window_fraction'), t_start)
        stats = error_stats(measured, reference, cfg.get_int('sigproc', 'bins'),
                            cfg.get_bool('sigproc', 'per_symbol'))
        self.record(save_error_stats(stats, self.out_dir / 'error_histogram.csv'))

        spec = FigureSpec(PlotKind.HISTOGRAM, [Series(y='count', x='bin_lo', x_hi='bin_hi')],
                          title=f"relative error (sigma_hat={stats.sigma_hat:.4g})",
                          x_label='relative error', y_label='symbols')
        self.write_figure(spec, stats.histogram_frame(), 'error_histogram.svg')
        print(stats.summary_line())
        return {'symbols': stats.n, 'sigma_hat': stats.sigma_hat, 'mean': stats.mean,
                'decimation_factor': factor}
