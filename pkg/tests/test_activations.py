import math

import numpy as np
import pytest
import torch
from scipy.special import expit

from activations.calibration import calibrate_optmax, calibrate_optmoid, fit_norm_factor
from activations.components import SlopeFunction
from activations.dispatch import AttentionActivation, DigitalParams, Nonlinearity
from activations.gradients import activation_grad, activation_jacobian
from activations.noise import NoiseMode, NoiseSpec
from activations.optmax import OptmaxParams, optmax_forward
from activations.optmoid import optmoid_forward
from activations.params_io import ParamsDocument, dumps_params, load_params, loads_params, save_params
from activations.presets import PRESETS, get_preset
from activations.quantization import QuantSpec
from activations.reference import default_bias, sigmoid_ref, softmax_ref
from mzm.transfer import SineTransferModel, SlopeSegment
from utils.errors import ConfigError, DegenerateDomainError, EmptyInputError, MissingRngError


# ---------------------------------------------------------
# digital references
# ---------------------------------------------------------
def test_softmax_reference_values():
    np.testing.assert_allclose(softmax_ref([0, 0, 0, 0]), [0.25] * 4)
    np.testing.assert_allclose(softmax_ref([1, 2, 3]), [0.09003, 0.24473, 0.66524], atol=5e-6)
    np.testing.assert_allclose(softmax_ref([1000, 1000]), [0.5, 0.5])
    with pytest.raises(EmptyInputError):
        softmax_ref([])


def test_sigmoid_reference_values():
    assert sigmoid_ref(0.0) == 0.5
    assert sigmoid_ref(4.16, -4.16) == 0.5
    assert sigmoid_ref(0.0, -4.16) == pytest.approx(1.0 / (1.0 + math.exp(4.16)), rel=1e-12)
    assert sigmoid_ref(0.0, -4.16) == pytest.approx(0.015348, abs=1e-4)


def test_default_bias():
    assert default_bias(64) == pytest.approx(-4.16, abs=0.005)
    assert default_bias(1024) == pytest.approx(-6.93, abs=0.005)
    assert default_bias(1) == 0
    with pytest.raises(ValueError):
        default_bias(0)


# ---------------------------------------------------------
# Optmax
# ---------------------------------------------------------
def test_ideal_optmax_is_softmax():
    ideal = OptmaxParams.ideal()
    np.testing.assert_allclose(optmax_forward([1.0, 2.0, 3.0], ideal), softmax_ref([1, 2, 3]),
                               rtol=0, atol=1e-12)
    np.testing.assert_allclose(optmax_forward([0.7] * 5, ideal), [0.2] * 5, atol=1e-12)


def test_ideal_optmax_is_softmax_on_random_vectors(rng):
    ideal = OptmaxParams.ideal()
    worst = 0.0
    for _ in range(1000):
        x = rng.normal(0.0, 3.0, size=int(rng.integers(1, 65)))
        worst = max(worst, float(np.max(np.abs(optmax_forward(x, ideal) - softmax_ref(x)))))
    assert worst <= 1e-12


def test_optmax_batches_along_last_axis(rng):
    x = rng.normal(size=(3, 4, 6))
    out = optmax_forward(x, OptmaxParams.ideal())
    assert out.shape == x.shape
    np.testing.assert_allclose(out, softmax_ref(x), atol=1e-12)


def test_calibrated_optmax_shares_one_norm_factor(optmax_params, rng):
    x = rng.uniform(0.5, 3.5, size=12)
    out = optmax_forward(x, optmax_params)
    numerator = optmax_params.f_exp(x)
    ratio = out / numerator
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-12)
    assert np.argmax(out) == np.argmax(x)
    assert np.all(np.diff(out[np.argsort(x)]) >= 0)
    assert np.all(out >= 0) and np.all(out <= optmax_params.output_bound() + 1e-12)


def test_optmax_clips_inputs(optmax_params):
    below = optmax_forward([-5.0, 1.0, 2.0], optmax_params)
    at_min = optmax_forward([0.0, 1.0, 2.0], optmax_params)
    np.testing.assert_array_equal(below, at_min)
    assert below[0] == 0.0


def test_optmax_mask_excludes_elements_from_sum():
    ideal = OptmaxParams.ideal()
    mask = torch.tensor([True, True, True, False])
    out = optmax_forward([1.0, 2.0, 3.0, 9.0], ideal, mask=mask)
    assert out[3] == 0.0
    np.testing.assert_allclose(out[:3], softmax_ref([1, 2, 3]), atol=1e-12)


def test_optmax_errors(optmax_params):
    with pytest.raises(EmptyInputError):
        optmax_forward(np.zeros(0), optmax_params)
    noisy = optmax_params.with_settings(noise=NoiseSpec(NoiseMode.ADDITIVE, 0.05))
    with pytest.raises(MissingRngError):
        optmax_forward([1.0, 2.0], noisy)


def test_optmax_output_quantizer(optmax_params, rng):
    params = optmax_params.with_settings(q_out=QuantSpec(4, 0.0, 1.0))
    out = optmax_forward(rng.uniform(0, 4, size=20), params)
    steps = out / 0.0625
    np.testing.assert_allclose(steps, np.round(steps), atol=1e-12)


def test_optmax_preserves_order_on_random_vectors(optmax_params, rng):
    x = rng.uniform(0.0, 4.0, size=(1000, 8))
    out = optmax_forward(x, optmax_params)
    assert np.all(out >= 0)
    ordered = np.take_along_axis(out, np.argsort(x, axis=-1), axis=-1)
    assert np.all(np.diff(ordered, axis=-1) >= 0)
    for i in (0, 499, 999):
        np.testing.assert_allclose(optmax_forward(x[i], optmax_params), out[i], rtol=1e-14)


def _zeroed_inputs(count):
    return np.tile([0.0, 0.0, 0.0, 4.0], (count, 1))


def test_additive_noise_lifts_zeros(optmax_params):
    params = optmax_params.with_settings(q_out=QuantSpec(4, 0.0, 1.0),
                                         noise=NoiseSpec(NoiseMode.ADDITIVE, 0.1))
    x = _zeroed_inputs(25_000)
    assert np.all(optmax_forward(x, params.with_settings(noise=NoiseSpec()))[:, :3] == 0.0)
    lifted = optmax_forward(x, params, np.random.default_rng(3))[:, :3]
    assert np.mean(lifted > 0) > 0


def test_multiplicative_noise_keeps_zeros(optmax_params, rng):
    params = optmax_params.with_settings(q_out=QuantSpec(4, 0.0, 1.0),
                                         noise=NoiseSpec(NoiseMode.MULTIPLICATIVE, 0.1))
    x = np.concatenate([_zeroed_inputs(5000), rng.uniform(0.0, 4.0, size=(5000, 4))])
    zero = optmax_forward(x, optmax_params) == 0.0
    noisy = optmax_forward(x, params, rng)
    assert zero.any()
    assert np.all(noisy[zero] == 0.0)
    assert np.all(noisy >= 0)


# ---------------------------------------------------------
# norm factor
# ---------------------------------------------------------
def test_norm_factor_exact_representation():
    def f_rec(z):
        return (1.0 / np.asarray(z) - 0.25) / 0.75

    norm = fit_norm_factor(f_rec, 1.0, 3.0, grid_points=3)
    assert norm.sse < 1e-20
    assert norm.alpha == pytest.approx(1.0)
    assert norm.beta == pytest.approx(0.25)


def _grid_argmin(g, y, alphas, betas):
    # sse(alpha, beta) expanded in the sums of g, g^2, y, gy
    sg, sgg, sy, sgy, syy, n = g.sum(), g @ g, y.sum(), g @ y, y @ y, y.size
    b = betas[:, None]
    a = alphas[None, :]
    basis_sq = b ** 2 * n + 2 * b * (1 - b) * sg + (1 - b) ** 2 * sgg
    basis_y = b * sy + (1 - b) * sgy
    sse = a ** 2 * basis_sq - 2 * a * basis_y + syy
    i, j = np.unravel_index(np.argmin(sse), sse.shape)
    return alphas[j], betas[i]


def test_norm_factor_matches_grid_search(reference_model):
    z_min, z_max = 6.0, 14.0
    f_rec = SlopeFunction(reference_model, SlopeSegment.FALLING, z_min, z_max)
    norm = fit_norm_factor(f_rec, z_min, z_max)

    z = np.linspace(z_min, z_max, 256)
    g, y = f_rec(z), 1.0 / z
    alpha, beta = _grid_argmin(g, y, np.arange(1, 2001) * 1e-3, np.arange(0, 1001) * 1e-3)
    # second pass on a finer grid around the coarse optimum
    fine = np.arange(-500, 501) * 1e-5
    alpha, beta = _grid_argmin(g, y, np.clip(alpha + fine, 1e-5, 2.0), np.clip(beta + fine, 0.0, 1.0))

    assert norm.alpha == pytest.approx(alpha, abs=1e-3)
    assert norm.beta == pytest.approx(beta, abs=1e-3)


def test_norm_factor_domain_errors():
    with pytest.raises(DegenerateDomainError):
        fit_norm_factor(lambda z: z, 0.0, 1.0)
    with pytest.raises(DegenerateDomainError):
        fit_norm_factor(lambda z: z, 2.0, 1.0)


def test_calibrated_optmax_carries_preset_bounds(optmax_params):
    assert (optmax_params.x_min, optmax_params.x_max) == (0.0, 4.0)
    assert (optmax_params.z_min, optmax_params.z_max) == (6.0, 14.0)
    assert 0.0 <= optmax_params.norm.beta <= 1.0
    assert optmax_params.norm.alpha > 0


# ---------------------------------------------------------
# Optmoid
# ---------------------------------------------------------
def test_optmoid_saturates_exactly(optmoid_params):
    p = optmoid_params
    lo = p.x_min - 5.0 - p.bias
    hi = p.x_max + 5.0 - p.bias
    out = optmoid_forward([lo, hi], p)
    assert out[0] == 0.0
    assert out[1] == 1.0


def test_optmoid_midpoint_is_half(optmoid_params):
    p = optmoid_params
    mid = 0.5 * (p.x_min + p.x_max) - p.bias
    assert optmoid_forward([mid], p)[0] == pytest.approx(0.5, abs=1e-9)


def test_optmoid_tracks_sigmoid_within_fit_residual(optmoid_params):
    p = optmoid_params
    assert p.bias == -3.93
    u = np.linspace(p.fit_range[0], p.fit_range[1], p.grid_points)
    out = optmoid_forward(u - p.bias, p)
    assert np.max(np.abs(out - expit(u))) <= p.residual + 1e-12
    assert np.max(np.abs(out - expit(u))) < 0.1


def test_optmoid_fit_follows_bias_and_input_range(reference_model):
    calibration = get_preset('calibration')
    shifted = calibrate_optmoid(reference_model, -3.93, calibration.x_range)
    centred = calibrate_optmoid(reference_model, 0.0, calibration.x_range)
    assert shifted.fit_range == pytest.approx((-3.93, 0.07))
    assert centred.fit_range == (0.0, 4.0)
    assert (shifted.x_min, shifted.x_max) != pytest.approx((centred.x_min, centred.x_max))
    assert shifted.residual != pytest.approx(centred.residual)

    # the recorded residual is the norm over the biased grid
    u = np.linspace(*shifted.fit_range, shifted.grid_points)
    out = optmoid_forward(u - shifted.bias, shifted)
    assert float(np.linalg.norm(out - expit(u))) == pytest.approx(shifted.residual, rel=1e-9, abs=1e-12)


def test_optmoid_rejects_empty_input_range(reference_model):
    with pytest.raises(DegenerateDomainError):
        calibrate_optmoid(reference_model, -3.93, (2.0, 2.0))


def test_optmoid_noise_stays_in_detector_range(optmoid_params, rng):
    noisy = optmoid_params.with_settings(noise=NoiseSpec(NoiseMode.ADDITIVE, 0.3))
    out = optmoid_forward(rng.normal(0, 6, size=500), noisy, rng)
    assert out.min() >= 0.0 and out.max() <= 1.0


# ---------------------------------------------------------
# dispatch
# ---------------------------------------------------------
def test_dispatch_matches_direct_calls(optmax_params, optmoid_params, rng):
    x = rng.uniform(0, 4, size=8)
    np.testing.assert_array_equal(AttentionActivation(Nonlinearity.OPTMAX, optmax_params)(x),
                                  optmax_forward(x, optmax_params))
    np.testing.assert_array_equal(AttentionActivation('optmoid', optmoid_params)(x),
                                  optmoid_forward(x, optmoid_params))
    np.testing.assert_allclose(AttentionActivation.softmax()(x), softmax_ref(x), atol=1e-15)
    np.testing.assert_allclose(AttentionActivation.sigmoid(-2.0)(x), sigmoid_ref(x, -2.0), atol=1e-15)


def test_dispatch_rejects_mismatched_params(optmoid_params):
    with pytest.raises(TypeError):
        AttentionActivation(Nonlinearity.OPTMAX, optmoid_params)
    with pytest.raises(ValueError):
        AttentionActivation('relu', DigitalParams())


def test_masked_outputs_are_zero(optmoid_params):
    mask = torch.tensor([True, False, True])
    for activation in (AttentionActivation.softmax(), AttentionActivation.sigmoid(),
                       AttentionActivation(Nonlinearity.OPTMOID, optmoid_params)):
        out = activation(torch.tensor([1.0, 2.0, 3.0], dtype=torch.float64), mask=mask)
        assert out[1].item() == 0.0


def test_without_noise_and_surrogate(optmax_params):
    activation = AttentionActivation(Nonlinearity.OPTMAX, optmax_params.with_settings(
        q_out=QuantSpec(4, 0.0, 1.0), noise=NoiseSpec(NoiseMode.MULTIPLICATIVE, 0.1)))
    assert activation.noisy
    assert not activation.without_noise().noisy
    smooth = activation.surrogate()
    assert not smooth.noisy
    assert smooth.params.q_out.rounding.value == 'none'


# ---------------------------------------------------------
# gradients
# ---------------------------------------------------------
def test_softmax_jacobian_is_analytic(rng):
    x = rng.normal(size=5)
    s = softmax_ref(x)
    jac = activation_jacobian(Nonlinearity.SOFTMAX, x, DigitalParams())
    np.testing.assert_allclose(jac, np.diag(s) - np.outer(s, s), atol=1e-12)


def test_saturated_optmoid_has_zero_gradient(optmoid_params):
    x = np.array([optmoid_params.x_min - 10.0 - optmoid_params.bias])
    vjp = activation_grad(Nonlinearity.OPTMOID, x, optmoid_params)
    np.testing.assert_array_equal(vjp(np.ones(1)), [0.0])


def _fd_jacobian(activation, x, h=1e-6):
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((activation(x + e) - activation(x - e)) / (2 * h))
    return np.stack(cols, axis=1)


def test_optmax_surrogate_gradient_matches_finite_differences(optmax_params):
    rng = np.random.default_rng(11)
    params = optmax_params.with_settings(q_in=QuantSpec(8, 0.0, 4.0), q_out=QuantSpec(8, 0.0, 1.0))
    smooth = AttentionActivation(Nonlinearity.OPTMAX, params).surrogate()
    worst = 0.0
    for _ in range(100):
        x = rng.uniform(0.3, 3.7, size=24)
        analytic = activation_jacobian(Nonlinearity.OPTMAX, x, params)
        numeric = _fd_jacobian(smooth, x)
        worst = max(worst, np.max(np.abs(analytic - numeric)) / np.max(np.abs(numeric)))
    assert worst < 1e-5


# ---------------------------------------------------------
# presets and parameter files
# ---------------------------------------------------------
def test_presets():
    assert set(PRESETS) >= {'calibration', 'vit-full', 'clm-full', 'desk'}
    assert get_preset('vit-full').bias == pytest.approx(-4.16, abs=0.005)
    assert get_preset('vit-full').tuned_optmoid_bias == -7.16
    assert get_preset('clm-full').bias == pytest.approx(-6.93, abs=0.005)
    with pytest.raises(ConfigError):
        get_preset('nope')


def test_params_round_trip(tmp_path, optmax_params, optmoid_params, rng):
    doc = ParamsDocument(optmax=optmax_params, optmoid=optmoid_params, report={'fit_residual': 1.5e-12})
    assert save_params(doc, tmp_path / 'params.ini')['success']
    loaded = load_params(tmp_path / 'params.ini')

    assert loaded.optmax == optmax_params
    assert loaded.optmoid == optmoid_params
    assert loaded.report == {'fit_residual': 1.5e-12}
    x = rng.uniform(-1, 5, size=16)
    np.testing.assert_array_equal(optmax_forward(x, loaded.optmax), optmax_forward(x, optmax_params))
    assert dumps_params(loaded) == dumps_params(doc)


def test_params_document_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_params(tmp_path / 'missing.ini')
    with pytest.raises(ConfigError):
        loads_params('[report]\nx = 1\n')
    with pytest.raises(ConfigError):
        loads_params('[optmoid]\nbias = abc\n')


def test_separate_modulator_models(reference_model):
    other = SineTransferModel(0.45, reference_model.b * 1.05, reference_model.c)
    preset = get_preset('calibration')
    params = calibrate_optmax(reference_model, other, preset.x_range, preset.z_range, q_out_bits=8)
    assert params.norm.f_rec.model == other
    assert params.q_out.bits == 8
