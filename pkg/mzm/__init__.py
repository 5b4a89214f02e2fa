# mzm/__init__.py
from .transfer import (
    VoltageWindow, SlopeSegment, Landmark, SineTransferModel, FitResult, AffineEncoder,
    transmission, fit_transfer, slope_window, make_encoder, encode,
)
from .samples import load_transfer_samples, save_transfer_samples, synthesize_transfer_samples

__all__ = [
    'VoltageWindow', 'SlopeSegment', 'Landmark', 'SineTransferModel', 'FitResult', 'AffineEncoder',
    'transmission', 'fit_transfer', 'slope_window', 'make_encoder', 'encode',
    'load_transfer_samples', 'save_transfer_samples', 'synthesize_transfer_samples',
]
