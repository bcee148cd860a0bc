"""
Phenomenological response model of a microwave-free NV magnetometer.

The photoluminescence (PL) versus bias field is a sum of Lorentzian dips on
a flat background: a broad low-field feature (region alpha), the NV-NV
cross-relaxation dip near 50 mT (beta) and the ground-state level
anti-crossing at 102.4 mT (gamma).  Misalignment between the NV axis and the
field deepens the broad feature and washes out the anti-crossing.  The lock-in
amplitude is the first-harmonic response to a small field modulation,
``R = |dPL/dB| * b_mod``.

None of the default numbers are measured PL contrasts; they only reproduce the
qualitative ordering of the features.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateRegionError, DomainError, LargeModulationWarning

B_NORMALIZATION = 80e-3
"""PL is normalized to unity at this bias field (tesla)."""

REGION_WINDOWS = {
    "alpha": (0.0, 25e-3),
    "beta": (40e-3, 60e-3),
    "gamma": (95e-3, 105e-3),
}


@dataclass(frozen=True)
class Feature:
    """One Lorentzian PL dip.

    ``depth`` is the fractional dip at zero misalignment; the effective depth
    is ``depth * (1 + depth_per_degree * angle)`` for broadening features
    (positive coefficient) or ``depth / (1 + |coeff| * angle)`` for features
    destroyed by misalignment (negative coefficient).
    """

    name: str
    center: float
    width: float
    depth: float
    depth_per_degree: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"feature {self.name!r}: width must be > 0")
        if not 0 <= self.depth < 1:
            raise DomainError(f"feature {self.name!r}: depth must be in [0, 1)")

    def effective_depth(self, angle_deg: float) -> float:
        k = self.depth_per_degree
        if k >= 0:
            scaled = self.depth * (1.0 + k * angle_deg)
        else:
            scaled = self.depth / (1.0 - k * angle_deg)
        return min(scaled, 0.95)


def default_features() -> tuple[Feature, ...]:
    return (
        Feature("slope", 35e-3, 25e-3, 0.10, 0.2),
        Feature("cross_relaxation", 51e-3, 0.8e-3, 0.02, 0.0),
        Feature("gslac", 102.4e-3, 0.3e-3, 0.08, -1.0),
    )


@dataclass(frozen=True)
class MagnetometerParams:
    """Sensor model parameters (SI units except where noted).

    Attributes
    ----------
    features : tuple of Feature
    misalignment_angle : float
        Angle between NV axis and bias field, degrees (0 to 5).
    pump_intensity, saturation_intensity : float
        Pump intensity and its saturation value, W/mm^2.
    modulation_amplitude, modulation_frequency : float
        Field modulation used for the R(B) characterization (T, Hz).
    noise_floor : float
        White magnetic noise, T/sqrt(Hz).
    bandwidth_reference : float
        Cutoff (Hz) reached at saturation intensity and
        ``bandwidth_reference_angle`` degrees of misalignment.
    bandwidth_angle_slope : float
        Slope of the linear misalignment factor, 1/degree.
    """

    features: tuple[Feature, ...] = field(default_factory=default_features)
    misalignment_angle: float = 0.5
    pump_intensity: float = 600.0
    saturation_intensity: float = 600.0
    modulation_amplitude: float = 50e-6
    modulation_frequency: float = 60e3
    noise_floor: float = 10e-6
    bandwidth_reference: float = 3.5e6
    bandwidth_reference_angle: float = 3.0
    bandwidth_angle_slope: float = 1.0 / 3.0

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        if not self.pump_intensity >= 0:
            raise DomainError("pump_intensity must be >= 0")
        if not self.saturation_intensity > 0:
            raise DomainError("saturation_intensity must be > 0")
        if not self.noise_floor > 0:
            raise DomainError("noise_floor must be > 0")
        if not 0 <= self.misalignment_angle <= 90:
            raise DomainError("misalignment_angle must be in [0, 90] degrees")
        if not self.modulation_amplitude >= 0:
            raise DomainError("modulation_amplitude must be >= 0")

    def replace(self, **changes) -> "MagnetometerParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class OperatingPoint:
    region: str
    bias_field: float
    responsivity: float

    def __post_init__(self):
        if self.region not in REGION_WINDOWS:
            raise DomainError(f"unknown region {self.region!r}")
        lo, hi = REGION_WINDOWS[self.region]
        if not lo <= self.bias_field <= hi:
            raise DomainError(
                f"bias {self.bias_field} T outside region {self.region} [{lo}, {hi}]")


def _raw_pl(b, features, angle):
    b = np.asarray(b, dtype=float)
    out = np.ones_like(b)
    for f in features:
        x = (b - f.center) / f.width
        out = out - f.effective_depth(angle) / (1.0 + x * x)
    return out


def _raw_pl_derivative(b, features, angle):
    b = np.asarray(b, dtype=float)
    out = np.zeros_like(b)
    for f in features:
        x = (b - f.center) / f.width
        den = 1.0 + x * x
        out = out + f.effective_depth(angle) * 2.0 * x / (f.width * den * den)
    return out


def _as_output(value):
    return float(value) if np.ndim(value) == 0 else value


def pl_vs_field(b, params: MagnetometerParams):
    """Normalized PL at bias field ``b`` (tesla); equals 1 at 80 mT."""
    if np.any(np.asarray(b) < 0):
        raise DomainError("bias field must be >= 0")
    norm = _raw_pl(B_NORMALIZATION, params.features, params.misalignment_angle)
    return _as_output(_raw_pl(b, params.features, params.misalignment_angle) / norm)


def pl_derivative(b, params: MagnetometerParams):
    """Analytic ``d(PL)/dB`` in 1/T."""
    norm = _raw_pl(B_NORMALIZATION, params.features, params.misalignment_angle)
    return _as_output(
        _raw_pl_derivative(b, params.features, params.misalignment_angle) / norm)


def lockin_r_vs_bias(b_bias, params: MagnetometerParams):
    """Lock-in R (PL fraction) for the configured field modulation.

    Warns with :class:`LargeModulationWarning` when the modulation amplitude
    exceeds a fifth of the narrowest feature width.
    """
    narrowest = min((f.width for f in params.features), default=math.inf)
    if params.modulation_amplitude > narrowest / 5.0:
        warnings.warn(
            f"modulation amplitude {params.modulation_amplitude:g} T exceeds "
            f"width/5 of the narrowest feature ({narrowest:g} T)",
            LargeModulationWarning, stacklevel=2)
    return _as_output(np.abs(pl_derivative(b_bias, params)) * params.modulation_amplitude)


def _golden_max(func, lo, hi, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = func(d)
    return (a + b) / 2.0


def select_operating_point(region: str, params: MagnetometerParams,
                           tol: float = 1e-6, grid_points: int = 2001) -> OperatingPoint:
    """Bias field maximizing the lock-in response within ``region``.

    A uniform grid locates the best bracket, then golden-section search refines
    it to ``tol`` tesla.  Raises :class:`DegenerateRegionError` if the
    response is flat across the window.
    """
    if region not in REGION_WINDOWS:
        raise DomainError(f"unknown region {region!r}")
    lo, hi = REGION_WINDOWS[region]

    def slope(b):
        return abs(float(pl_derivative(b, params)))

    grid = np.linspace(lo, hi, grid_points)
    values = np.abs(pl_derivative(grid, params))
    k = int(np.argmax(values))
    if not values[k] > 1e-12:
        raise DegenerateRegionError(f"flat lock-in response in region {region}")
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, grid_points - 1)]
    best = _golden_max(slope, a, b, tol)
    # keep the grid point if refinement drifted onto a lower shoulder
    if slope(best) < values[k]:
        best = float(grid[k])
    best = min(max(best, lo), hi)
    return OperatingPoint(region, best, slope(best))


def misalignment_factor(angle_deg: float, params: MagnetometerParams) -> float:
    """Linear bandwidth factor, normalized to 1 at the reference angle."""
    k = params.bandwidth_angle_slope
    angle = min(max(angle_deg, 0.0), 5.0)
    return (1.0 + k * angle) / (1.0 + k * params.bandwidth_reference_angle)


def bandwidth_cutoff(pump_intensity: float, misalignment: float,
                     params: MagnetometerParams) -> float:
    """First-order cutoff frequency (Hz) of the optical readout.

    ``f_max * I / (I + I_sat) * g(angle)``, calibrated so that saturation
    intensity at the reference angle yields ``params.bandwidth_reference``.
    """
    if not pump_intensity >= 0:
        raise DomainError("pump_intensity must be >= 0")
    i_sat = params.saturation_intensity
    f_max = params.bandwidth_reference * 2.0  # I/(I+I_sat) = 1/2 at I = I_sat
    return f_max * pump_intensity / (pump_intensity + i_sat) * misalignment_factor(
        misalignment, params)


def sensor_response(f, cutoff: float):
    """First-order low-pass magnitude ``1/sqrt(1 + (f/f_c)^2)``."""
    if not cutoff > 0:
        raise DomainError("cutoff must be > 0")
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise DomainError("frequency must be >= 0")
    return _as_output(1.0 / np.sqrt(1.0 + (f / cutoff) ** 2))


def sensor_cutoff(params: MagnetometerParams) -> float:
    """Cutoff at the parameter set's own pump intensity and misalignment."""
    return bandwidth_cutoff(params.pump_intensity, params.misalignment_angle, params)
