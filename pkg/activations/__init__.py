# activations/__init__.py
from .quantization import QuantSpec, Rounding, quantize
from .noise import NoiseSpec, NoiseMode, NoiseReference, apply_noise
from .reference import softmax_ref, sigmoid_ref, default_bias
from .components import SlopeFunction, NormModel, ExactExponential, ExactReciprocal
from .optmax import OptmaxParams, optmax_forward
from .optmoid import OptmoidParams, optmoid_forward
from .calibration import fit_norm_factor, calibrate_optmax, calibrate_optmoid
from .dispatch import Nonlinearity, DigitalParams, AttentionActivation, apply_activation
from .gradients import activation_grad, activation_jacobian
from .params_io import ParamsDocument, dumps_params, loads_params, save_params, load_params
from .presets import ActivationPreset, PRESETS, get_preset

__all__ = [
    'QuantSpec', 'Rounding', 'quantize',
    'NoiseSpec', 'NoiseMode', 'NoiseReference', 'apply_noise',
    'softmax_ref', 'sigmoid_ref', 'default_bias',
    'SlopeFunction', 'NormModel', 'ExactExponential', 'ExactReciprocal',
    'OptmaxParams', 'optmax_forward', 'OptmoidParams', 'optmoid_forward',
    'fit_norm_factor', 'calibrate_optmax', 'calibrate_optmoid',
    'Nonlinearity', 'DigitalParams', 'AttentionActivation', 'apply_activation',
    'activation_grad', 'activation_jacobian',
    'ParamsDocument', 'dumps_params', 'loads_params', 'save_params', 'load_params',
    'ActivationPreset', 'PRESETS', 'get_preset',
]
