"""
Digital lock-in amplifier and detector-signal synthesis.

The demodulator AC-couples the record, mixes it with quadrature references,
and smooths each product with a first-order RC filter of time constant
``tau``.  X and Y are read as the mean of the filter output over the final
quarter of the record, trimmed to whole reference periods so the residual
2f ripple cancels.  The filter state is pre-charged with the periodic steady
state of the leading whole-period segment, which removes the start-up
transient of a steady input without changing the filter itself.

Reference convention: ``A sin(2 pi f t + phi)`` demodulates to ``R = A``,
``theta = phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .emforward import ComplexField, wrap_phase
from .errors import InsufficientSettlingError, PreconditionError
from .magnetometer import MagnetometerParams, OperatingPoint, pl_derivative, pl_vs_field

SETTLING_TIME_CONSTANTS = 10.0


@dataclass(frozen=True)
class TimeSeries:
    sample_rate: float
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if not self.sample_rate > 0:
            raise PreconditionError("sample_rate must be > 0")
        if samples.size == 0:
            raise PreconditionError("time series is empty")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return self.samples.shape[-1] / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.shape[-1]) / self.sample_rate


@dataclass(frozen=True)
class LockInReading:
    r: float
    theta: float

    @property
    def x(self) -> float:
        return self.r * math.cos(self.theta)

    @property
    def y(self) -> float:
        return self.r * math.sin(self.theta)


def _whole_periods(n_samples, sample_rate, f_ref):
    """Largest sample count <= n_samples spanning an integer number of periods."""
    samples_per_period = sample_rate / f_ref
    periods = math.floor(n_samples / samples_per_period + 1e-9)
    if periods < 1:
        return n_samples
    return max(1, int(round(periods * samples_per_period)))


def demodulate_xy(samples, sample_rate, f_ref, time_constant, ac_couple=True):
    """Vectorized core of :func:`demodulate`.

    ``samples`` may be 2-D with one record per row; returns arrays X, Y.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    n = samples.shape[-1]
    if not 0 < f_ref < sample_rate / 2.0:
        raise PreconditionError(
            f"reference {f_ref:g} Hz must lie in (0, Nyquist={sample_rate / 2:g} Hz)")
    if not time_constant > 0:
        raise PreconditionError("time_constant must be > 0")
    duration = n / sample_rate
    if duration < SETTLING_TIME_CONSTANTS * time_constant * (1 - 1e-9):
        raise InsufficientSettlingError(
            f"record of {duration:g} s shorter than "
            f"{SETTLING_TIME_CONSTANTS:g} time constants ({time_constant:g} s)")
    if ac_couple:
        samples = samples - samples.mean(axis=-1, keepdims=True)
    t = np.arange(n) / sample_rate
    phase = 2.0 * np.pi * f_ref * t
    mixed_x = 2.0 * samples * np.sin(phase)
    mixed_y = 2.0 * samples * np.cos(phase)

    # exact discretization of the RC filter
    alpha = -math.expm1(-1.0 / (sample_rate * time_constant))
    b_coef, a_coef = [alpha], [1.0, alpha - 1.0]
    n_head = _whole_periods(min(n, int(math.ceil(time_constant * sample_rate))),
                            sample_rate, f_ref)
    n_tail = _whole_periods(n // 4, sample_rate, f_ref)

    # periodic steady state of the leading segment: y0 = y_zero(end) / (1 - (1-alpha)^n)
    decay = 1.0 - (1.0 - alpha) ** n_head
    out = []
    for mixed in (mixed_x, mixed_y):
        head = lfilter(b_coef, a_coef, mixed[:, :n_head], axis=-1)
        start = head[:, -1:] / decay
        zi = (1.0 - alpha) * start
        filtered, _ = lfilter(b_coef, a_coef, mixed, axis=-1, zi=zi)
        out.append(filtered[:, n - n_tail:].mean(axis=-1))
    return out[0], out[1]


def demodulate(signal: TimeSeries, f_ref: float, time_constant: float,
               ac_couple: bool = True) -> LockInReading:
    """Amplitude and phase of ``signal`` at ``f_ref``.

    Raises :class:`PreconditionError` if ``f_ref`` is at or above Nyquist and
    :class:`InsufficientSettlingError` if the record is shorter than ten time
    constants.
    """
    x, y = demodulate_xy(signal.samples, signal.sample_rate, f_ref, time_constant,
                         ac_couple)
    x, y = float(x[0]), float(y[0])
    r = math.hypot(x, y)
    theta = wrap_phase(math.atan2(y, x)) if r > 0 else 0.0
    return LockInReading(r, theta)


def synthesize_detector_signal(b_ac: ComplexField, op_point: OperatingPoint,
                               params: MagnetometerParams, duration: float,
                               sample_rate: float, frequency: float,
                               gain: float = 1.0, noise: bool = False,
                               noise_seed: int = 0) -> TimeSeries:
    """Photodiode signal for an AC field ``b_ac`` at ``frequency`` hertz.

    The PL follows ``pl_vs_field(bias + gain * b(t))`` with
    ``b(t) = |b_ac| sin(2 pi f t + phase)``.  ``gain`` carries the sensor's
    frequency response.  The PL is sign-corrected so that its first harmonic
    is in phase with ``b(t)`` (as a lock-in phase offset would be set).  With
    ``noise=True`` white noise of ``responsivity * noise_floor *
    sqrt(sample_rate / 2)`` per sample is added from ``noise_seed``.
    """
    if not sample_rate > 4.0 * frequency:
        raise PreconditionError(
            f"sample_rate {sample_rate:g} Hz must exceed 4x the field frequency")
    if not duration > 0:
        raise PreconditionError("duration must be > 0")
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    b = gain * b_ac.amplitude * np.sin(2.0 * np.pi * frequency * t + b_ac.phase)
    samples = _pl_samples(b, op_point, params)
    if noise:
        rng = np.random.default_rng(noise_seed)
        sigma = op_point.responsivity * params.noise_floor * math.sqrt(sample_rate / 2.0)
        samples = samples + sigma * rng.standard_normal(n)
    return TimeSeries(sample_rate, samples)


def _pl_samples(b, op_point, params):
    bias = op_point.bias_field
    pl = np.asarray(pl_vs_field(np.maximum(bias + b, 0.0), params))
    baseline = pl_vs_field(bias, params)
    slope_sign = 1.0 if pl_derivative(bias, params) >= 0 else -1.0
    return baseline + slope_sign * (pl - baseline)
