import numpy as np
import pytest
import torch

from activations.noise import NoiseMode, NoiseReference, NoiseSpec, apply_noise
from activations.quantization import QuantSpec, Rounding, distinct_levels, parse_bits, quantize
from utils.errors import MissingRngError


# ---------------------------------------------------------
# quantize
# ---------------------------------------------------------
def test_four_bit_zero_threshold():
    spec = QuantSpec(4, 0.0, 1.0)
    assert quantize(0.03, spec) == 0.0
    assert quantize(0.0625, spec) == 0.0625
    assert quantize(0.0624, spec) == 0.0


def test_disabled_quantizer_is_identity(rng):
    spec = QuantSpec.disabled()
    assert quantize(0.7313, spec) == 0.7313
    v = rng.normal(size=100)
    assert quantize(v, spec) is v


def test_outputs_lie_on_level_set(rng):
    spec = QuantSpec(3, -1.0, 3.0)
    levels = distinct_levels(spec)
    out = quantize(rng.uniform(-5, 5, size=500), spec)
    assert set(np.unique(out)) <= set(levels)
    # top bin is [hi - step, hi]
    assert quantize(3.0, spec) == pytest.approx(3.0 - spec.step)
    assert quantize(-7.0, spec) == -1.0


def test_nearest_rounding():
    spec = QuantSpec(2, 0.0, 1.0, Rounding.NEAREST)
    assert quantize(0.2, spec) == 0.25
    assert quantize(0.1, spec) == 0.0


def test_tensor_quantize_uses_straight_through_gradient():
    spec = QuantSpec(4, 0.0, 1.0)
    x = torch.tensor([-0.5, 0.03, 0.5, 1.5], dtype=torch.float64, requires_grad=True)
    y = quantize(x, spec)
    np.testing.assert_allclose(y.detach().numpy(), [0.0, 0.0, 0.5, 0.9375])
    y.sum().backward()
    np.testing.assert_array_equal(x.grad.numpy(), [0.0, 1.0, 1.0, 0.0])


def test_invalid_quant_specs():
    with pytest.raises(ValueError):
        QuantSpec(4, 1.0, 1.0)
    with pytest.raises(ValueError):
        QuantSpec(0)
    with pytest.raises(ValueError):
        distinct_levels(QuantSpec.disabled())


@pytest.mark.parametrize('text,expected', [('inf', None), ('none', None), ('8', 8), (' 16 ', 16)])
def test_parse_bits(text, expected):
    assert parse_bits(text) == expected


# ---------------------------------------------------------
# apply_noise
# ---------------------------------------------------------
def test_zero_sigma_is_identity(rng):
    s = rng.uniform(size=10)
    for mode in NoiseMode:
        np.testing.assert_array_equal(apply_noise(s, NoiseSpec(mode, 0.0), rng), s)


def test_multiplicative_noise_keeps_zeros(rng):
    s = np.array([0.0, 0.5, 0.0, 1.0])
    out = apply_noise(s, NoiseSpec(NoiseMode.MULTIPLICATIVE, 0.3), rng)
    assert out[0] == 0.0 and out[2] == 0.0


def test_additive_noise_statistics():
    s = np.full(200_000, 0.25)
    out = apply_noise(s, NoiseSpec(NoiseMode.ADDITIVE, 0.05), np.random.default_rng(0))
    assert np.mean(out - s) == pytest.approx(0.0, abs=1e-3)
    assert np.std(out - s) == pytest.approx(0.05, rel=0.02)


def test_signal_max_and_mean_shift_references():
    s = np.tile(np.array([0.1, 0.4, 0.8]), (50_000, 1))
    scaled = apply_noise(s, NoiseSpec(NoiseMode.ADDITIVE, 0.1, NoiseReference.SIGNAL_MAX),
                         np.random.default_rng(1))
    assert np.std(scaled - s) == pytest.approx(0.08, rel=0.02)

    shifted = apply_noise(s, NoiseSpec(NoiseMode.ADDITIVE, 0.1, NoiseReference.MEAN_SHIFT),
                          np.random.default_rng(2))
    assert np.mean(shifted - s) == pytest.approx(0.8, abs=2e-3)


def test_noise_is_deterministic_per_seed():
    spec = NoiseSpec(NoiseMode.ADDITIVE, 0.1)
    s = np.linspace(0, 1, 32)
    a = apply_noise(s, spec, np.random.default_rng(5))
    b = apply_noise(s, spec, np.random.default_rng(5))
    np.testing.assert_array_equal(a, b)

    t = torch.linspace(0, 1, 32, dtype=torch.float64)
    ta = apply_noise(t, spec, torch.Generator().manual_seed(5))
    tb = apply_noise(t, spec, torch.Generator().manual_seed(5))
    assert torch.equal(ta, tb)


def test_noise_without_rng_fails():
    with pytest.raises(MissingRngError):
        apply_noise(np.ones(3), NoiseSpec(NoiseMode.ADDITIVE, 0.1), None)


def test_negative_sigma_rejected():
    with pytest.raises(ValueError):
        NoiseSpec(NoiseMode.ADDITIVE, -0.1)
