import math

import numpy as np
import pytest
import torch

from mzm.samples import load_transfer_samples, save_transfer_samples, synthesize_transfer_samples
from mzm.transfer import (
    Landmark, SineTransferModel, SlopeSegment, VoltageWindow, encode, fit_transfer, make_encoder,
    slope_window, transmission,
)
from utils.errors import (
    DegenerateDataError, DegenerateRangeError, NonConvergenceError, ParseError, WindowOutOfRangeError,
)


# ---------------------------------------------------------
# transmission
# ---------------------------------------------------------
def test_reference_curve_landmarks(reference_model):
    assert transmission(reference_model, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert transmission(reference_model, 5.73) == pytest.approx(1.0, abs=1e-15)
    expected = 0.5 * (1 + math.sin(math.pi / 5.73 - math.pi / 2))
    assert transmission(reference_model, 1.0) == pytest.approx(expected, rel=1e-15)


def test_transmission_accepts_arrays_and_tensors(reference_model):
    v = np.linspace(-3, 9, 17)
    out = transmission(reference_model, v)
    assert out.shape == v.shape
    assert np.all(out >= 0) and np.all(out <= 2 * reference_model.a + 1e-15)

    tv = torch.tensor(v, requires_grad=True)
    tout = transmission(reference_model, tv)
    tout.sum().backward()
    np.testing.assert_allclose(tout.detach().numpy(), out, rtol=0, atol=1e-15)
    assert tv.grad is not None


def test_transmission_is_periodic(rng):
    model = SineTransferModel(0.48, 0.55, 0.3)
    v = rng.uniform(-50, 50, size=1000)
    np.testing.assert_allclose(model(v), model(v + model.period), atol=1e-12)


def test_invalid_model_rejected():
    with pytest.raises(DegenerateDataError):
        SineTransferModel(0.0, 1.0, 0.0)
    with pytest.raises(DegenerateDataError):
        SineTransferModel(0.5, -1.0, 0.0)
    with pytest.raises(DegenerateRangeError):
        VoltageWindow(2.0, 2.0)


# ---------------------------------------------------------
# fit_transfer
# ---------------------------------------------------------
def test_fit_recovers_noiseless_parameters():
    truth = SineTransferModel(0.48, 0.55, 0.3)
    samples = synthesize_transfer_samples(truth, 64, 0.0, 14.0)
    result = fit_transfer(samples)

    assert result.converged
    assert result.model.a == pytest.approx(0.48, rel=1e-6)
    assert result.model.b == pytest.approx(0.55, rel=1e-6)
    assert result.model.c == pytest.approx(0.3, rel=1e-6)
    assert result.model.window.as_tuple() == (0.0, 14.0)
    assert result.residual_norm < 1e-8


def test_fit_curves_agree_over_random_models():
    rng = np.random.default_rng(7)
    for _ in range(20):
        truth = SineTransferModel(rng.uniform(0.2, 1.0), rng.uniform(0.3, 1.5), rng.uniform(-math.pi, math.pi))
        samples = synthesize_transfer_samples(truth, 96, 0.0, 1.5 * truth.period)
        fitted = fit_transfer(samples).model
        v = np.linspace(0.0, 1.5 * truth.period, 1024)
        np.testing.assert_allclose(fitted(v), truth(v), atol=1e-6)


def test_fit_with_noise_stays_within_one_percent():
    truth = SineTransferModel(0.48, 0.55, 0.3)
    errors = []
    for seed in range(25):
        samples = synthesize_transfer_samples(truth, 64, 0.0, 14.0, sigma=0.01,
                                              rng=np.random.default_rng(seed))
        m = fit_transfer(samples).model
        errors.append(max(abs(m.a / 0.48 - 1), abs(m.b / 0.55 - 1)))
    assert np.median(errors) < 0.01


def test_fit_derives_half_wave_voltage():
    samples = synthesize_transfer_samples(SineTransferModel.reference(), 128, -1.0, 6.73, sigma=0.002,
                                          rng=np.random.default_rng(3))
    model = fit_transfer(samples).model
    assert model.v_pi == pytest.approx(5.73, rel=0.02)


def test_fit_with_initial_guess():
    truth = SineTransferModel(0.5, 0.6, -1.0)
    samples = synthesize_transfer_samples(truth, 40, 0.0, 12.0)
    result = fit_transfer(samples, init=SineTransferModel(0.45, 0.58, -0.9))
    assert result.model.b == pytest.approx(0.6, rel=1e-6)


def test_fit_rejects_degenerate_data():
    with pytest.raises(DegenerateDataError):
        fit_transfer([(1.0, 0.2), (1.0, 0.3), (1.0, 0.4), (1.0, 0.5)])
    with pytest.raises(DegenerateDataError):
        fit_transfer([(0.0, 0.1), (1.0, 0.2)])


def test_fit_iteration_cap_raises_non_convergence():
    truth = SineTransferModel(0.48, 0.55, 0.3)
    samples = synthesize_transfer_samples(truth, 64, 0.0, 14.0)
    with pytest.raises(NonConvergenceError) as info:
        fit_transfer(samples, init=SineTransferModel(0.1, 0.2, 2.0), max_iterations=1)
    assert info.value.exit_code == 2


# ---------------------------------------------------------
# slope_window
# ---------------------------------------------------------
def test_slope_windows_of_reference_device(reference_model):
    rising = slope_window(reference_model, SlopeSegment.RISING)
    assert rising.v_min == pytest.approx(0.0, abs=1e-12)
    assert rising.v_max == pytest.approx(2.865, abs=1e-12)
    assert rising.width == pytest.approx(5.73 / 2, rel=1e-12)

    full = slope_window(reference_model, 'full_swing')
    assert full.as_tuple() == pytest.approx((0.0, 5.73), abs=1e-12)


def test_landmark_voltages(reference_model):
    assert reference_model.landmark(Landmark.MINIMUM) == pytest.approx(0.0, abs=1e-12)
    assert reference_model.landmark('rising_quadrature') == pytest.approx(2.865, abs=1e-12)
    assert reference_model.landmark(Landmark.MAXIMUM) == pytest.approx(5.73, abs=1e-12)
    assert reference_model.landmark(Landmark.FALLING_QUADRATURE) == pytest.approx(8.595, abs=1e-12)
    assert reference_model.landmark(Landmark.MINIMUM, 1) == pytest.approx(reference_model.period, abs=1e-12)
    assert reference_model.landmark(Landmark.MAXIMUM, -1) == pytest.approx(-5.73, abs=1e-12)
    assert transmission(reference_model, reference_model.landmark(Landmark.MAXIMUM, 3)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        reference_model.landmark('saddle')


def test_slope_monotonicity(reference_model):
    rising = slope_window(reference_model, SlopeSegment.RISING)
    falling = slope_window(reference_model, SlopeSegment.FALLING)
    up = reference_model(np.linspace(rising.v_min, rising.v_max, 1024))
    down = reference_model(np.linspace(falling.v_min, falling.v_max, 1024))
    assert np.all(np.diff(up) > 0)
    assert np.all(np.diff(down) < 0)
    assert reference_model(falling.v_max) == pytest.approx(0.0, abs=1e-12)


def test_slope_window_far_from_fit_window():
    model = SineTransferModel(0.5, math.pi / 5.73, -math.pi / 2, VoltageWindow(0.0, 1.0))
    with pytest.raises(WindowOutOfRangeError):
        slope_window(model, SlopeSegment.RISING, near=100.0)


# ---------------------------------------------------------
# encoder
# ---------------------------------------------------------
def test_encoder_endpoints_and_midpoint():
    enc = make_encoder(0.0, 4.0, VoltageWindow(0.0, 2.865))
    assert encode(enc, 0.0) == 0.0
    assert encode(enc, 4.0) == pytest.approx(2.865, abs=1e-15)
    assert enc(2.0) == pytest.approx(2.865 / 2, abs=1e-15)

    enc = make_encoder(0.0, 10.0, VoltageWindow(1.0, 2.0))
    assert enc.gamma == pytest.approx(0.1)
    assert enc.delta == 1.0
    # no clipping outside the digital range
    assert enc(20.0) == pytest.approx(3.0)
    assert enc.decode(enc(7.5)) == pytest.approx(7.5)


def test_encoder_rejects_degenerate_range():
    with pytest.raises(DegenerateRangeError):
        make_encoder(1.0, 1.0, VoltageWindow(0.0, 1.0))


# ---------------------------------------------------------
# sample files
# ---------------------------------------------------------
def test_sample_file_round_trip(tmp_path, reference_model):
    samples = synthesize_transfer_samples(reference_model, 32)
    result = save_transfer_samples(samples, tmp_path / 'curve.csv')
    assert result['success']
    np.testing.assert_allclose(load_transfer_samples(tmp_path / 'curve.csv'), samples, rtol=1e-14, atol=0)


def test_malformed_sample_file_names_line(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('voltage_V,transmission\n0.0,0.1\n1.0,abc\n2.0,0.3\n')
    with pytest.raises(ParseError) as info:
        load_transfer_samples(path)
    assert info.value.line == 3
    assert ':3:' in str(info.value)


def test_wrong_header_rejected(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('v,t\n0.0,0.1\n')
    with pytest.raises(ParseError):
        load_transfer_samples(path)
