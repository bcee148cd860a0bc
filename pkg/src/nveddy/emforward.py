"""
Quasi-static eddy-current forward model for thin conductive samples.

The primary field is taken as spatially uniform over the sample and oscillating
at a single frequency.  Faraday's law around a circle of radius ``r`` gives an
azimuthal electric field ``E = omega * B_prim * r / 2``, which drives loop
currents ``J = sigma * E``.  The field of those loops at a sensor on the disc
axis integrates in closed form; off-axis positions use the equivalent magnetic
dipole of the disc.

Phasors follow the convention that the secondary field of a thin sample leads
the primary by +pi/2.  Finite thickness is folded in through a complex
effective thickness, which integrates the diffusive current profile
``exp(-(1 + i) z / delta)`` over the sample depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MU0 = 4e-7 * math.pi
"""Vacuum permeability in T m / A (exact, pre-2019 SI value)."""

SIGMA_COPPER = 5.96e7
SIGMA_ALUMINIUM = 3.77e7


@dataclass(frozen=True)
class CoilDrive:
    """Primary field at the sample plane.

    Parameters
    ----------
    b_primary : float
        Amplitude of the oscillating primary flux density, tesla.
    frequency : float
        Drive frequency, hertz.
    """

    b_primary: float
    frequency: float

    def __post_init__(self):
        if not self.b_primary >= 0:
            raise DomainError(f"b_primary must be >= 0, got {self.b_primary}")
        if not self.frequency >= 0:
            raise DomainError(f"frequency must be >= 0, got {self.frequency}")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.frequency


@dataclass(frozen=True)
class SampleDisc:
    """Thin conductive cylinder coaxial with the sensor.

    All lengths in meters, conductivity in S/m.  ``standoff_d`` is the
    distance from the sample to the sensor along the common axis.  A zero
    conductivity is accepted and yields no eddy currents.
    """

    radius_r0: float
    thickness_h: float
    conductivity_sigma: float
    standoff_d: float

    def __post_init__(self):
        for name in ("radius_r0", "thickness_h", "standoff_d"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be > 0, got {value}")
        if not self.conductivity_sigma >= 0:
            raise DomainError(
                f"conductivity_sigma must be >= 0, got {self.conductivity_sigma}")

    def with_sigma(self, sigma: float) -> "SampleDisc":
        return SampleDisc(self.radius_r0, self.thickness_h, sigma, self.standoff_d)


@dataclass(frozen=True)
class ComplexField:
    """Secondary field phasor.

    ``phase`` is measured relative to the primary-field oscillation and lies
    in (-pi, pi].  ``thin_regime`` is False when the sample is thicker than
    the skin depth, marking the value as an extrapolation of the thin model.
    """

    amplitude: float
    phase: float
    thin_regime: bool = True

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise DomainError(f"amplitude must be >= 0, got {self.amplitude}")

    @classmethod
    def from_phasor(cls, z: complex, thin_regime: bool = True) -> "ComplexField":
        amplitude = abs(z)
        phase = wrap_phase(float(np.angle(z))) if amplitude > 0 else 0.0
        return cls(float(amplitude), phase, thin_regime)

    @property
    def phasor(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


def wrap_phase(phase):
    """Map angles onto (-pi, pi]."""
    wrapped = np.mod(np.asarray(phase, dtype=float) + np.pi, 2 * np.pi) - np.pi
    wrapped = np.where(wrapped <= -np.pi, np.pi, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def skin_depth(sigma: float, frequency: float) -> float:
    """Electromagnetic skin depth ``sqrt(2 / (mu0 * sigma * omega))`` in meters."""
    if not sigma > 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    if not frequency > 0:
        raise DomainError(f"frequency must be > 0, got {frequency}")
    return math.sqrt(2.0 / (MU0 * sigma * 2.0 * math.pi * frequency))


def induced_e_field(r: float, drive: CoilDrive) -> float:
    """Azimuthal electric field magnitude (V/m) at radius ``r`` inside a
    uniform oscillating axial field, from ``|U| = 2 pi r E = omega B pi r^2``."""
    if not r >= 0:
        raise DomainError(f"r must be >= 0, got {r}")
    return drive.omega * drive.b_primary * r / 2.0


def eddy_current_density(r: float, sigma: float, drive: CoilDrive) -> float:
    """Eddy-current density magnitude (A/m^2) at radius ``r``."""
    if not sigma >= 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    return sigma * induced_e_field(r, drive)


def effective_thickness(thickness: float, sigma: float, frequency: float,
                        skin_effect: bool = True) -> complex:
    """Complex current-carrying thickness of a slab.

    Integral of ``exp(-(1 + i) z / delta)`` over ``0 <= z <= thickness``.
    Tends to ``thickness`` (real) as ``thickness / delta -> 0``.
    """
    if not thickness > 0:
        raise DomainError(f"thickness must be > 0, got {thickness}")
    if not skin_effect or sigma == 0 or frequency == 0:
        return complex(thickness)
    delta = skin_depth(sigma, frequency)
    k = (1 + 1j) / delta
    return complex(-np.expm1(-k * thickness) / k)


def _loop_integral(r0: float, d: float) -> float:
    """``F(r0) - F(0)`` with ``F(r) = sqrt(r^2+d^2) + d^2/sqrt(r^2+d^2)``.

    Evaluated as ``d (s - 1)^2 / s`` with ``s = sqrt(1 + r0^2/d^2)`` to avoid
    cancellation when ``r0 << d``.
    """
    u = (r0 / d) ** 2
    s = math.sqrt(1.0 + u)
    s_minus_1 = u / (s + 1.0)
    return d * s_minus_1 * s_minus_1 / s


def _field_prefactor(sample: SampleDisc, drive: CoilDrive, skin_effect: bool):
    h_eff = effective_thickness(sample.thickness_h, sample.conductivity_sigma,
                                drive.frequency, skin_effect)
    thin = True
    if sample.conductivity_sigma > 0 and drive.frequency > 0:
        thin = sample.thickness_h <= skin_depth(sample.conductivity_sigma, drive.frequency)
    # +pi/2 lead of the induced field relative to the primary
    scale = 1j * sample.conductivity_sigma * drive.omega * drive.b_primary * h_eff
    return scale, thin


def secondary_field_on_axis(sample: SampleDisc, drive: CoilDrive,
                            skin_effect: bool = True) -> ComplexField:
    """Secondary field of the eddy currents at a sensor on the disc axis.

    Closed-form Biot-Savart integral of the loop currents over the disc,
    ``mu0 sigma omega B h_eff / 4 * [F(r0) - F(0)]``.  With
    ``skin_effect=False`` the thin-sample limit ``h_eff = h`` is used exactly.
    """
    scale, thin = _field_prefactor(sample, drive, skin_effect)
    z = MU0 * scale / 4.0 * _loop_integral(sample.radius_r0, sample.standoff_d)
    return ComplexField.from_phasor(z, thin)


def dipole_moment(sample: SampleDisc, drive: CoilDrive, skin_effect: bool = True) -> complex:
    """Complex magnetic moment (A m^2) of the disc's eddy currents,
    ``pi sigma omega B h_eff r0^4 / 8``."""
    scale, _ = _field_prefactor(sample, drive, skin_effect)
    return complex(math.pi * scale * sample.radius_r0 ** 4 / 8.0)


def dipole_axial_kernel(dx, dy, d):
    """Axial field of a unit z-dipole, ``mu0/(4 pi) (2 d^2 - rho^2) / R^5``.

    Broadcasts over ``dx`` and ``dy`` (lateral sensor offsets, m).
    """
    rho2 = np.square(dx) + np.square(dy)
    r2 = rho2 + d * d
    return (MU0 / (4.0 * math.pi)) * (2.0 * d * d - rho2) / (r2 * r2 * np.sqrt(r2))


def secondary_field_offaxis(sample: SampleDisc, lateral_offset, drive: CoilDrive,
                            skin_effect: bool = True) -> ComplexField:
    """Field along the sensor axis for a sensor displaced laterally by
    ``lateral_offset = (dx, dy)`` meters, in the point-dipole approximation.

    The dipole approximation underestimates the finite disc on axis by a
    relative ``~(r0/d)^2``; it is accurate for pixels much smaller than the
    standoff, which is how the scan engine uses it.
    """
    dx, dy = (float(v) for v in lateral_offset)
    d = sample.standoff_d
    if dx * dx + dy * dy + d * d == 0:
        raise DomainError("sensor coincides with the sample")
    m = dipole_moment(sample, drive, skin_effect)
    scale, thin = _field_prefactor(sample, drive, skin_effect)
    z = m * float(dipole_axial_kernel(dx, dy, d))
    return ComplexField.from_phasor(z, thin)
