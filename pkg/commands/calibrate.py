"""
calibrate: transfer-curve fit -> slope windows -> activation calibration
"""

import logging
from typing import Any, Dict

import pandas as pd

from activations.calibration import calibrate_optmax, calibrate_optmoid
from activations.params_io import ParamsDocument, save_params
from activations.presets import get_preset
from activations.reference import default_bias
from commands.base import Command
from commands.builders import optional_path, value_range
from mzm.samples import load_transfer_samples
from mzm.transfer import FitResult, SlopeSegment, fit_transfer, slope_window
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ['quantity', 'value']


class CalibrateCommand(Command):
    name = 'calibrate'

    def _fit(self, key: str) -> FitResult:
        path = optional_path(self.config, 'calibrate', key)
        if path is None:
            raise ConfigError(f"[calibrate] {key} is required")
        samples = load_transfer_samples(path)
        result = fit_transfer(samples)
        logger.info(f"✓ Fit {path.name}: a={result.model.a:.6g} b={result.model.b:.6g} "
                    f"c={result.model.c:.6g} residual={result.residual_norm:.3e}")
        return result

    def _bias(self, preset_bias: float) -> float:
        bias = self.config.get_optional_float('calibrate', 'bias')
        if bias is not None:
            return bias
        n = self.config.get_optional_int('calibrate', 'n')
        return default_bias(n) if n is not None else preset_bias

    def execute(self) -> Dict[str, Any]:
        cfg = self.config
        preset = get_preset(cfg.get('calibrate', 'preset'))
        x_range = value_range(cfg, 'calibrate', 'x_min', 'x_max', preset.x_range)
        z_range = value_range(cfg, 'calibrate', 'z_min', 'z_max', preset.z_range)
        q_in_bits = cfg.get_bits('calibrate', 'q_in_bits')
        q_out_bits = cfg.get_bits('calibrate', 'q_out_bits')
        grid_points = cfg.get_int('calibrate', 'grid_points')

        logger.info("Step 1: Fitting transfer curves...")
        fit_exp = self._fit('transfer_csv')
        fit_rec = self._fit('rec_transfer_csv') if cfg.is_set('calibrate', 'rec_transfer_csv') else fit_exp

        logger.info("Step 2: Locating slope windows...")
        windows = {
            'rising': slope_window(fit_exp.model, SlopeSegment.RISING),
            'falling': slope_window(fit_rec.model, SlopeSegment.FALLING),
            'full_swing': slope_window(fit_exp.model, SlopeSegment.FULL_SWING),
        }
        for name, window in windows.items():
            logger.info(f"   {name}: [{window.v_min:.6g}, {window.v_max:.6g}] V")

        logger.info("Step 3: Calibrating activations...")
        bias = self._bias(preset.bias)
        optmax = calibrate_optmax(fit_exp.model, fit_rec.model, x_range, z_range,
                                  q_in_bits, q_out_bits, grid_points=grid_points)
        optmoid = calibrate_optmoid(fit_exp.model, bias, x_range, q_in_bits, q_out_bits,
                                    grid_points=grid_points)

        report = {
            'exp_residual_norm': fit_exp.residual_norm,
            'exp_residual_rms': fit_exp.residual_rms,
            'exp_iterations': float(fit_exp.iterations),
            'rec_residual_norm': fit_rec.residual_norm,
            'rec_residual_rms': fit_rec.residual_rms,
            'norm_sse': optmax.norm.sse,
            'optmoid_residual_norm': optmoid.residual,
        }
        for name, window in windows.items():
            report[f"{name}_v_min"] = window.v_min
            report[f"{name}_v_max"] = window.v_max

        params_file = cfg.get('calibrate', 'params_file')
        self.record(save_params(ParamsDocument(optmax=optmax, optmoid=optmoid, report=report),
                                self.out_dir / params_file))
        self.write_csv(pd.DataFrame(sorted(report.items()), columns=REPORT_COLUMNS), 'calibration_report.csv')

        print(f"transfer fit residual norm: {fit_exp.residual_norm:.6e}")
        print(f"normalization fit sse:      {optmax.norm.sse:.6e}")
        print(f"optmoid fit residual norm:  {optmoid.residual:.6e}")
        return {'residual_norm': fit_exp.residual_norm, 'params_file': str(self.out_dir / params_file),
                'bias': bias}
