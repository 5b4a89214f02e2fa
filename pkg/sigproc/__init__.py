# sigproc/__init__.py
from .trace import Trace, save_trace, load_trace
from .waveform import PulseShape, WaveformSpec, random_symbols, synthesize_trace
from .filtering import FirSpec, fir_lowpass, decimate, decimation_factor, frequency_response
from .symbols import ErrorStats, integrate_symbols, integration_window, error_stats, save_error_stats

__all__ = [
    'Trace', 'save_trace', 'load_trace',
    'PulseShape', 'WaveformSpec', 'random_symbols', 'synthesize_trace',
    'FirSpec', 'fir_lowpass', 'decimate', 'decimation_factor', 'frequency_response',
    'ErrorStats', 'integrate_symbols', 'integration_window', 'error_stats', 'save_error_stats',
]
