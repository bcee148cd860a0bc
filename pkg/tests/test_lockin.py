import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nveddy.emforward import ComplexField
from nveddy.errors import InsufficientSettlingError, PreconditionError
from nveddy.lockin import TimeSeries, demodulate, demodulate_xy, synthesize_detector_signal

FS = 1e6
F_REF = 10e3
TAU = 1e-3


def tone(amplitude, phase, f=F_REF, duration=12 * TAU, fs=FS, offset=0.0):
    t = np.arange(int(round(duration * fs))) / fs
    return TimeSeries(fs, offset + amplitude * np.sin(2 * np.pi * f * t + phase))


def test_pure_tone_exact():
    reading = demodulate(tone(0.37, 0.8), F_REF, TAU)
    assert reading.r == pytest.approx(0.37, rel=1e-9)
    assert reading.theta == pytest.approx(0.8, abs=1e-9)
    assert reading.x == pytest.approx(0.37 * math.cos(0.8), rel=1e-9)


def test_dc_offset_removed():
    reading = demodulate(tone(1.0, -1.0, offset=5.0), F_REF, TAU)
    assert reading.r == pytest.approx(1.0, rel=1e-9)


def test_zero_signal():
    reading = demodulate(TimeSeries(FS, np.zeros(12000)), F_REF, TAU)
    assert reading.r == 0.0
    assert reading.theta == 0.0


def test_off_reference_tone_rejected():
    reading = demodulate(tone(1.0, 0.3, f=3 * F_REF), F_REF, TAU)
    assert reading.r < 1e-3


def test_reference_above_nyquist():
    with pytest.raises(PreconditionError):
        demodulate(tone(1.0, 0.0), 0.6 * FS, TAU)


def test_insufficient_settling():
    with pytest.raises(InsufficientSettlingError):
        demodulate(tone(1.0, 0.0, duration=5 * TAU), F_REF, TAU)


def test_empty_series_rejected():
    with pytest.raises(PreconditionError):
        TimeSeries(FS, np.array([]))


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 1e3), st.floats(-math.pi + 1e-6, math.pi))
def test_round_trip(amplitude, phase):
    reading = demodulate(tone(amplitude, phase), F_REF, TAU)
    assert reading.r == pytest.approx(amplitude, rel=1e-6)
    assert math.remainder(reading.theta - phase, 2 * math.pi) == pytest.approx(0, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_phase_additivity(p1, p2):
    a = demodulate(tone(1.0, p1), F_REF, TAU).theta
    b = demodulate(tone(1.0, p1 + p2), F_REF, TAU).theta
    assert math.remainder(b - a - p2, 2 * math.pi) == pytest.approx(0, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_amplitude_scaling(k):
    a = demodulate(tone(0.5, 0.2), F_REF, TAU).r
    b = demodulate(tone(0.5 * k, 0.2), F_REF, TAU).r
    assert b == pytest.approx(k * a, rel=1e-9)


def test_vectorized_rows_match_scalar():
    rows = np.stack([tone(a, p).samples for a, p in [(1, 0), (2, 1), (0.5, -2)]])
    x, y = demodulate_xy(rows, FS, F_REF, TAU)
    for k, (a, p) in enumerate([(1, 0), (2, 1), (0.5, -2)]):
        assert math.hypot(x[k], y[k]) == pytest.approx(a, rel=1e-9)


def test_synthesized_signal_round_trip(params, alpha_point):
    b = ComplexField(1e-6, 0.4)
    f = 50e3
    sig = synthesize_detector_signal(b, alpha_point, params, 12 * TAU, 1e6, f)
    reading = demodulate(sig, f, TAU)
    expected = alpha_point.responsivity * b.amplitude
    assert reading.r == pytest.approx(expected, rel=5e-3)
    assert reading.theta == pytest.approx(0.4, abs=5e-3)


def test_synthesized_gain_scales(params, alpha_point):
    b = ComplexField(1e-6, 0.0)
    r1 = demodulate(synthesize_detector_signal(b, alpha_point, params, 12 * TAU, 1e6, 50e3,
                                               gain=1.0), 50e3, TAU).r
    r2 = demodulate(synthesize_detector_signal(b, alpha_point, params, 12 * TAU, 1e6, 50e3,
                                               gain=0.5), 50e3, TAU).r
    assert r2 == pytest.approx(0.5 * r1, rel=1e-3)


def test_synthesized_noise_deterministic(params, alpha_point):
    b = ComplexField(1e-6, 0.0)
    a = synthesize_detector_signal(b, alpha_point, params, 1e-3, 1e6, 50e3, noise=True,
                                   noise_seed=7)
    c = synthesize_detector_signal(b, alpha_point, params, 1e-3, 1e6, 50e3, noise=True,
                                   noise_seed=7)
    d = synthesize_detector_signal(b, alpha_point, params, 1e-3, 1e6, 50e3, noise=True,
                                   noise_seed=8)
    assert np.array_equal(a.samples, c.samples)
    assert not np.array_equal(a.samples, d.samples)


def test_synthesis_needs_oversampling(params, alpha_point):
    with pytest.raises(PreconditionError):
        synthesize_detector_signal(ComplexField(1e-6, 0), alpha_point, params, 1e-3, 1e5, 50e3)
