"""
Activation calibration
Builds Optmax/Optmoid parameter records from fitted transfer models: the
alpha/beta fit of the reciprocal stage and the least-squares fit of the
Optmoid clip bounds against the logistic.
"""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit

from activations.components import NormModel, SlopeFunction
from activations.noise import NoiseSpec
from activations.optmax import OptmaxParams
from activations.optmoid import OptmoidParams
from activations.quantization import QuantSpec
from mzm.transfer import SineTransferModel, SlopeSegment
from utils.errors import DegenerateDomainError

logger = logging.getLogger(__name__)

NORM_GRID_POINTS = 256
SIGMOID_GRID_POINTS = 256


def _face_fit(g: np.ndarray, y: np.ndarray, beta: float) -> Tuple[float, float]:
    """Best alpha for fixed beta; returns (alpha, sse)"""
    basis = beta + (1.0 - beta) * g
    denom = float(basis @ basis)
    alpha = float(basis @ y) / denom if denom > 0 else 0.0
    r = alpha * basis - y
    return alpha, float(r @ r)


def fit_norm_factor(f_rec: Callable, z_min: float, z_max: float,
                    grid_points: int = NORM_GRID_POINTS) -> NormModel:
    """
    Fit N(z) = alpha [beta + (1 - beta) f_rec(z)] to 1/z on a uniform grid

    The model is linear in p = alpha*beta and q = alpha*(1 - beta); when the
    unconstrained optimum puts beta outside [0, 1] the better of the two
    boundary faces is taken.

    Raises:
        DegenerateDomainError: z_min <= 0 or z_min >= z_max
    """
    if not z_min > 0:
        raise DegenerateDomainError(f"1/z is unbounded on a domain starting at z_min={z_min}")
    if not z_min < z_max:
        raise DegenerateDomainError(f"Need z_min < z_max, got [{z_min}, {z_max}]")
    if grid_points < 2:
        raise ValueError(f"Need at least 2 grid points, got {grid_points}")

    z = np.linspace(z_min, z_max, grid_points)
    g = np.asarray(f_rec(z), dtype=float)
    y = 1.0 / z

    design = np.column_stack([np.ones_like(g), g])
    (p, q), _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    alpha = p + q
    beta = p / alpha if alpha != 0 else -1.0

    if alpha > 0 and 0.0 <= beta <= 1.0:
        r = design @ np.array([p, q]) - y
        sse = float(r @ r)
    else:
        faces = [(b,) + _face_fit(g, y, b) for b in (0.0, 1.0)]
        faces = [face for face in faces if face[1] > 0]
        beta, alpha, sse = min(faces, key=lambda face: face[2])
        logger.debug(f"Unconstrained beta outside [0, 1]; boundary face beta={beta} chosen")

    norm = NormModel(alpha=float(alpha), beta=float(beta), f_rec=f_rec,
                     z_min=float(z_min), z_max=float(z_max), sse=sse)
    logger.info(f"✓ Norm factor fit on z in [{z_min:g}, {z_max:g}]: "
                f"alpha={norm.alpha:.6g} beta={norm.beta:.6g} sse={sse:.3e}")
    return norm


def calibrate_optmax(model_exp: SineTransferModel, model_rec: SineTransferModel,
                     x_range: Tuple[float, float], z_range: Tuple[float, float],
                     q_in_bits: Optional[int] = None, q_out_bits: Optional[int] = None,
                     noise: Optional[NoiseSpec] = None,
                     grid_points: int = NORM_GRID_POINTS) -> OptmaxParams:
    """
    Optmax parameters from the numerator and normalization modulators

    Args:
        model_exp: transfer curve of the modulator driven on its rising slope
        model_rec: transfer curve of the modulator driven on its falling slope
        x_range: input clip range [x_min, x_max]
        z_range: accumulated-sum domain [z_min, z_max]
        q_in_bits, q_out_bits: DAC/ADC bit depths (None disables)
        noise: output noise model

    Returns:
        OptmaxParams with q_in over the clip range and q_out over [0, 1]
    """
    x_min, x_max = map(float, x_range)
    z_min, z_max = map(float, z_range)
    f_exp = SlopeFunction(model_exp, SlopeSegment.RISING, x_min, x_max)
    f_rec = SlopeFunction(model_rec, SlopeSegment.FALLING, z_min, z_max)
    norm = fit_norm_factor(f_rec, z_min, z_max, grid_points)
    return OptmaxParams(
        x_min=x_min, x_max=x_max, f_exp=f_exp, norm=norm,
        q_in=QuantSpec(q_in_bits, x_min, x_max), q_out=QuantSpec(q_out_bits, 0.0, 1.0),
        noise=noise or NoiseSpec(),
    )


def _sigmoid_residuals(params: np.ndarray, model: SineTransferModel, u: np.ndarray,
                       target: np.ndarray) -> np.ndarray:
    center, log_width = params
    half = 0.5 * math.exp(log_width)
    f_sig = SlopeFunction(model, SlopeSegment.FULL_SWING, center - half, center + half)
    return f_sig(u) - target


def fit_sigmoid_bounds(model: SineTransferModel, fit_range: Tuple[float, float],
                       grid_points: int = SIGMOID_GRID_POINTS) -> Tuple[float, float, float]:
    """
    Least-squares clip bounds [u_min, u_max] making the full swing match the logistic

    Returns:
        (u_min, u_max, residual norm on the grid)
    """
    lo, hi = map(float, fit_range)
    if not lo < hi:
        raise DegenerateDomainError(f"Sigmoid fit range needs lo < hi, got [{lo}, {hi}]")
    u = np.linspace(lo, hi, grid_points)
    target = expit(u)
    # logistic center, equal slopes at the midpoint: pi / (2 width) = 1/4
    x0 = np.array([0.0, math.log(2.0 * math.pi)])
    sol = least_squares(_sigmoid_residuals, x0, args=(model, u, target), method='trf',
                        xtol=1e-12, ftol=1e-12, gtol=1e-12)
    center, log_width = sol.x
    half = 0.5 * math.exp(log_width)
    residual = float(np.linalg.norm(_sigmoid_residuals(sol.x, model, u, target)))
    return center - half, center + half, residual


def calibrate_optmoid(model: SineTransferModel, bias: float, x_range: Tuple[float, float],
                      q_in_bits: Optional[int] = None, q_out_bits: Optional[int] = None,
                      noise: Optional[NoiseSpec] = None,
                      grid_points: int = SIGMOID_GRID_POINTS) -> OptmoidParams:
    """
    Optmoid parameters for one modulator driven across its full swing

    The clip bounds live in the biased domain u = x + bias and are fit so that
    f_sig(u) tracks 1 / (1 + e^-u) for u in [x_min + bias, x_max + bias]; the grid
    residual norm is stored with the record and bounds the pointwise deviation on
    that grid.

    Args:
        model: transfer curve of the modulator
        bias: sigmoid bias b
        x_range: input range [x_min, x_max] the activation is calibrated over
        q_in_bits, q_out_bits: DAC/ADC bit depths (None disables)
        noise: output noise model
    """
    x_min, x_max = map(float, x_range)
    fit_range = (x_min + float(bias), x_max + float(bias))
    u_min, u_max, residual = fit_sigmoid_bounds(model, fit_range, grid_points)
    f_sig = SlopeFunction(model, SlopeSegment.FULL_SWING, u_min, u_max)
    params = OptmoidParams(
        bias=float(bias), x_min=u_min, x_max=u_max, f_sig=f_sig,
        q_in=QuantSpec(q_in_bits, u_min, u_max), q_out=QuantSpec(q_out_bits, 0.0, 1.0),
        noise=noise or NoiseSpec(), residual=residual,
        fit_range=fit_range, grid_points=int(grid_points),
    )
    logger.info(f"✓ Optmoid calibration: clip [{u_min:.6g}, {u_max:.6g}] bias={bias:.4g} "
                f"residual={residual:.3e}")
    return params
