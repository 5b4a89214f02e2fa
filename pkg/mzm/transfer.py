"""
MZM Transfer Model
Sinusoidal transmission T(V) = a(1 + sin(bV + c)), its least-squares fit,
slope-segment landmarks and the digital-to-voltage affine encoder.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import torch
from scipy.optimize import least_squares

from mzm.config import (
    FIT_MAX_ITERATIONS, FIT_RELATIVE_TOLERANCE, FIT_PARAMETER_TOLERANCE,
    FIT_RESIDUAL_TOLERANCE, FIT_FREQUENCY_CANDIDATES, FIT_LM_STARTS, FIT_MIN_SAMPLES,
    REFERENCE_A, REFERENCE_B, REFERENCE_C, REFERENCE_WINDOW,
)
from utils.errors import (
    DegenerateDataError, DegenerateRangeError, NonConvergenceError, WindowOutOfRangeError,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray, torch.Tensor]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class VoltageWindow:
    """Closed voltage interval [v_min, v_max]"""

    v_min: float
    v_max: float

    def __post_init__(self):
        if not (math.isfinite(self.v_min) and math.isfinite(self.v_max)) or self.v_min >= self.v_max:
            raise DegenerateRangeError(
                f"Voltage window needs v_min < v_max, got [{self.v_min}, {self.v_max}]"
            )

    @property
    def width(self) -> float:
        return self.v_max - self.v_min

    @property
    def center(self) -> float:
        return 0.5 * (self.v_min + self.v_max)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.v_min, self.v_max)


class SlopeSegment(str, Enum):
    RISING = 'rising'
    FALLING = 'falling'
    FULL_SWING = 'full_swing'


class Landmark(str, Enum):
    MINIMUM = 'minimum'
    RISING_QUADRATURE = 'rising_quadrature'
    MAXIMUM = 'maximum'
    FALLING_QUADRATURE = 'falling_quadrature'


# phase bV + c of each landmark within one period
_LANDMARK_PHASES = {
    Landmark.MINIMUM: -math.pi / 2,
    Landmark.RISING_QUADRATURE: 0.0,
    Landmark.MAXIMUM: math.pi / 2,
    Landmark.FALLING_QUADRATURE: math.pi,
}

# first landmark of each segment and the phase span it covers
_SEGMENT_PHASES = {
    SlopeSegment.RISING: (Landmark.MINIMUM, math.pi / 2),
    SlopeSegment.FALLING: (Landmark.FALLING_QUADRATURE, math.pi / 2),
    SlopeSegment.FULL_SWING: (Landmark.MINIMUM, math.pi),
}


@dataclass(frozen=True)
class SineTransferModel:
    """
    Fitted MZM transmission curve

    Args:
        a: transmission amplitude (half of peak transmission)
        b: phase rate in rad/V, equal to pi / V_pi
        c: phase offset in rad
        window: voltage span the fit is valid over
    """

    a: float
    b: float
    c: float
    window: VoltageWindow = field(default_factory=lambda: VoltageWindow(*REFERENCE_WINDOW))

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DegenerateDataError(f"Transfer amplitude must be positive, got a={self.a}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise DegenerateDataError(f"Phase rate must be positive, got b={self.b}")
        if not math.isfinite(self.c):
            raise DegenerateDataError(f"Phase offset must be finite, got c={self.c}")

    @classmethod
    def reference(cls) -> 'SineTransferModel':
        """Characterised device: V_pi = 5.73 V, minimum at 0 V"""
        return cls(REFERENCE_A, REFERENCE_B, REFERENCE_C, VoltageWindow(*REFERENCE_WINDOW))

    @property
    def v_pi(self) -> float:
        return math.pi / self.b

    @property
    def period(self) -> float:
        return TWO_PI / self.b

    @property
    def t_max(self) -> float:
        return 2.0 * self.a

    def phase(self, v: ArrayLike) -> ArrayLike:
        return self.b * v + self.c

    def landmark(self, kind: Union[Landmark, str], k: int = 0) -> float:
        """Voltage of the k-th periodic instance of a landmark"""
        return (_LANDMARK_PHASES[Landmark(kind)] + TWO_PI * k - self.c) / self.b

    def __call__(self, v: ArrayLike) -> ArrayLike:
        return transmission(self, v)


def transmission(model: SineTransferModel, v: ArrayLike) -> ArrayLike:
    """
    Evaluate a(1 + sin(bv + c))

    Accepts Python floats, numpy arrays and torch tensors; torch inputs stay
    on the autograd graph.
    """
    if isinstance(v, torch.Tensor):
        return model.a * (1.0 + torch.sin(model.b * v + model.c))
    if np.ndim(v) == 0 and not isinstance(v, np.ndarray):
        return model.a * (1.0 + math.sin(model.b * float(v) + model.c))
    return model.a * (1.0 + np.sin(model.b * np.asarray(v, dtype=float) + model.c))


# ---------------------------------------------------------
# Least-squares fit
# ---------------------------------------------------------
@dataclass(frozen=True)
class FitResult:
    """Outcome of fit_transfer"""

    model: SineTransferModel
    residual_norm: float
    iterations: int
    converged: bool
    message: str = ''
    n_samples: int = 0

    @property
    def residual_rms(self) -> float:
        return self.residual_norm / math.sqrt(max(self.n_samples, 1))


def _as_samples(samples) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DegenerateDataError(
            f"Samples must be (voltage, transmission) pairs, got array of shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise DegenerateDataError("Samples contain non-finite values")
    return arr[:, 0], arr[:, 1]


def _residuals(p: np.ndarray, v: np.ndarray, t: np.ndarray) -> np.ndarray:
    a, b, c = p
    return a * (1.0 + np.sin(b * v + c)) - t


def _jacobian(p: np.ndarray, v: np.ndarray, t: np.ndarray) -> np.ndarray:
    a, b, c = p
    phase = b * v + c
    cos_phase = np.cos(phase)
    jac = np.empty((v.size, 3))
    jac[:, 0] = 1.0 + np.sin(phase)
    jac[:, 1] = a * v * cos_phase
    jac[:, 2] = a * cos_phase
    return jac


def _linear_sine_fit(v: np.ndarray, t: np.ndarray, b: float) -> Tuple[float, np.ndarray]:
    """Solve t ~ p sin(bv) + q cos(bv) + r for fixed b; returns (sse, [p, q, r])"""
    design = np.column_stack([np.sin(b * v), np.cos(b * v), np.ones_like(v)])
    coef, _, _, _ = np.linalg.lstsq(design, t, rcond=None)
    resid = design @ coef - t
    return float(resid @ resid), coef


def _dominant_phase_rate(v: np.ndarray, t: np.ndarray) -> Optional[float]:
    """Phase rate of the strongest non-DC FFT bin of the samples on a uniform grid"""
    order = np.argsort(v)
    vs, ts = v[order], t[order]
    m = max(64, 4 * v.size)
    grid = np.linspace(vs[0], vs[-1], m)
    tu = np.interp(grid, vs, ts)
    spectrum = np.abs(np.fft.rfft(tu - tu.mean()))
    if spectrum.size < 2 or not np.any(spectrum[1:] > 0):
        return None
    k = int(np.argmax(spectrum[1:])) + 1
    freq = np.fft.rfftfreq(m, d=grid[1] - grid[0])[k]
    return TWO_PI * float(freq)


def _initial_guesses(v: np.ndarray, t: np.ndarray, starts: int) -> list:
    span = float(np.ptp(v))
    b_lo = 0.5 * math.pi / span
    b_hi = math.pi * max(v.size - 1, 2) / span
    candidates = list(np.geomspace(b_lo, b_hi, FIT_FREQUENCY_CANDIDATES))
    b_fft = _dominant_phase_rate(v, t)
    if b_fft is not None and b_fft > 0:
        candidates.append(b_fft)

    scored = []
    for b in candidates:
        sse, (p, q, r) = _linear_sine_fit(v, t, b)
        a0 = math.hypot(p, q)
        if a0 <= 0:
            continue
        scored.append((sse, np.array([a0, b, math.atan2(q, p)])))
    scored.sort(key=lambda item: item[0])
    return [guess for _, guess in scored[:starts]]


def _canonical(a: float, b: float, c: float) -> Tuple[float, float, float]:
    """Fold b < 0 onto b > 0 and wrap c into (-pi, pi]"""
    if b < 0:
        b, c = -b, math.pi - c
    c = math.pi - math.fmod(math.pi - c, TWO_PI)
    if c <= -math.pi:
        c += TWO_PI
    elif c > math.pi:
        c -= TWO_PI
    return a, b, c


def fit_transfer(samples: Union[Sequence[Tuple[float, float]], np.ndarray],
                 init: Optional[SineTransferModel] = None,
                 max_iterations: int = FIT_MAX_ITERATIONS,
                 tolerance: float = FIT_RELATIVE_TOLERANCE) -> FitResult:
    """
    Least-squares fit of a(1 + sin(bV + c)) to (voltage, transmission) samples

    Levenberg-Marquardt with the analytic Jacobian. Without an initial guess the
    phase rate is seeded from the FFT-dominant frequency and a log-spaced scan,
    each scored by the linear sin/cos/offset fit it admits; the best few are refined.

    Args:
        samples: (N, 2) array-like of voltage/transmission pairs
        init: optional starting model (its window is ignored)
        max_iterations: iteration cap per start
        tolerance: relative cost change that ends the iteration

    Returns:
        FitResult with the fitted model, residual norm and iteration count
    """
    v, t = _as_samples(samples)
    if v.size < FIT_MIN_SAMPLES:
        raise DegenerateDataError(
            f"Need at least {FIT_MIN_SAMPLES} samples to fit 3 parameters, got {v.size}"
        )
    if np.ptp(v) == 0:
        raise DegenerateDataError("All sample voltages are equal")
    if np.any(t < 0):
        logger.debug(f"{int(np.sum(t < 0))} samples have negative transmission")

    if init is not None:
        starts = [np.array([init.a, init.b, init.c], dtype=float)]
    else:
        starts = _initial_guesses(v, t, FIT_LM_STARTS)
    if not starts:
        raise DegenerateDataError("Samples carry no sinusoidal component to fit")

    best = None
    for x0 in starts:
        sol = least_squares(
            _residuals, x0, jac=_jacobian, args=(v, t), method='lm',
            ftol=tolerance, xtol=FIT_PARAMETER_TOLERANCE, gtol=1e-15,
            max_nfev=max_iterations,
        )
        logger.debug(f"LM start b0={x0[1]:.6g}: cost={sol.cost:.3e} nfev={sol.nfev} status={sol.status}")
        if best is None or sol.cost < best.cost:
            best = sol

    residual_norm = float(np.linalg.norm(best.fun))
    rms = residual_norm / math.sqrt(v.size)
    hit_cap = best.status == 0
    if hit_cap and rms > FIT_RESIDUAL_TOLERANCE:
        raise NonConvergenceError(
            f"Transfer fit hit the {max_iterations}-iteration cap with residual RMS {rms:.3e}",
            residual_norm=residual_norm, iterations=int(best.nfev),
        )

    a, b, c = _canonical(*best.x)
    if a <= 0 or b == 0:
        raise NonConvergenceError(
            f"Transfer fit ended outside the model family (a={a:.4g}, b={b:.4g})",
            residual_norm=residual_norm, iterations=int(best.nfev),
        )

    model = SineTransferModel(a, b, c, VoltageWindow(float(v.min()), float(v.max())))
    logger.info(
        f"✓ Transfer fit: a={a:.6g} b={b:.6g} rad/V (V_pi={model.v_pi:.4g} V) c={c:.6g} "
        f"residual={residual_norm:.3e} iterations={best.nfev}"
    )
    return FitResult(
        model=model, residual_norm=residual_norm, iterations=int(best.nfev),
        converged=not hit_cap, message=str(best.message), n_samples=int(v.size),
    )


# ---------------------------------------------------------
# Slope landmarks
# ---------------------------------------------------------
def slope_window(model: SineTransferModel, segment: Union[SlopeSegment, str],
                 near: Optional[float] = None) -> VoltageWindow:
    """
    Analytic voltage window of a slope segment

    Rising runs from a transmission minimum to the following rising quadrature,
    Falling from a falling quadrature to the following minimum and FullSwing
    from a minimum to the following maximum. Of the periodic instances, the
    one whose center is closest to `near` (default: the model window center)
    is returned.

    Raises:
        WindowOutOfRangeError: the chosen instance lies more than one period
            outside the model's validity window
    """
    segment = SlopeSegment(segment)
    start, span = _SEGMENT_PHASES[segment]
    theta0 = _LANDMARK_PHASES[start]
    target = model.window.center if near is None else float(near)

    k = round((target * model.b + model.c - theta0 - span / 2) / TWO_PI)
    v_start = model.landmark(start, k)
    v_end = v_start + span / model.b

    gap = max(model.window.v_min - v_end, v_start - model.window.v_max, 0.0)
    if gap > model.period:
        raise WindowOutOfRangeError(
            f"{segment.value} segment [{v_start:.4g}, {v_end:.4g}] V lies {gap:.4g} V outside "
            f"the fit window [{model.window.v_min:.4g}, {model.window.v_max:.4g}] V"
        )
    return VoltageWindow(v_start, v_end)


# ---------------------------------------------------------
# Affine encoder
# ---------------------------------------------------------
@dataclass(frozen=True)
class AffineEncoder:
    """Maps digital values w onto volts as gamma * w + delta (no clipping)"""

    gamma: float
    delta: float
    w_min: float
    w_max: float

    def __call__(self, w: ArrayLike) -> ArrayLike:
        return encode(self, w)

    def decode(self, v: ArrayLike) -> ArrayLike:
        return (v - self.delta) / self.gamma


def make_encoder(w_min: float, w_max: float, window: VoltageWindow) -> AffineEncoder:
    """
    Range-preserving affine map of [w_min, w_max] onto the voltage window

    Raises:
        DegenerateRangeError: w_min >= w_max
    """
    if not w_min < w_max:
        raise DegenerateRangeError(f"Encoder needs w_min < w_max, got [{w_min}, {w_max}]")
    gamma = (window.v_max - window.v_min) / (w_max - w_min)
    delta = window.v_min - gamma * w_min
    return AffineEncoder(gamma=gamma, delta=delta, w_min=float(w_min), w_max=float(w_max))


def encode(enc: AffineEncoder, w: ArrayLike) -> ArrayLike:
    if isinstance(w, (np.ndarray, list, tuple)):
        return enc.gamma * np.asarray(w, dtype=float) + enc.delta
    return enc.gamma * w + enc.delta
