import sys
from pathlib import Path

import numpy as np
import pytest
import torch

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from activations.calibration import calibrate_optmax, calibrate_optmoid  # noqa: E402
from activations.presets import get_preset  # noqa: E402
from mzm.transfer import SineTransferModel  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def torch_rng():
    return torch.Generator().manual_seed(1234)


@pytest.fixture(scope='session')
def reference_model():
    return SineTransferModel.reference()


@pytest.fixture(scope='session')
def optmax_params(reference_model):
    preset = get_preset('calibration')
    return calibrate_optmax(reference_model, reference_model, preset.x_range, preset.z_range)


@pytest.fixture(scope='session')
def optmoid_params(reference_model):
    preset = get_preset('calibration')
    return calibrate_optmoid(reference_model, preset.bias, preset.x_range)


@pytest.fixture(scope='session')
def desk_optmoid(reference_model):
    preset = get_preset('desk')
    return calibrate_optmoid(reference_model, preset.bias, preset.x_range)
