import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nveddy.emforward import (MU0, SIGMA_ALUMINIUM, SIGMA_COPPER, CoilDrive, ComplexField,
                              SampleDisc, dipole_moment, effective_thickness,
                              eddy_current_density, induced_e_field, secondary_field_offaxis,
                              secondary_field_on_axis, skin_depth, wrap_phase)
from nveddy.errors import DomainError

DRIVE = CoilDrive(91e-6, 3.5e6)
DISC = SampleDisc(1e-3, 0.1e-3, 8e5, 0.5e-3)


def quad_on_axis(r0, d, sigma, drive, h):
    """Biot-Savart over concentric loops, thin limit, by adaptive quadrature."""
    # loop of radius r carrying dI = sigma * E(r) * h dr; on-axis field mu0 dI r^2 / (2 R^3)
    f = lambda r: sigma * drive.omega * drive.b_primary * r / 2 * h * r * r / (
        2 * (r * r + d * d) ** 1.5)
    val, _ = integrate.quad(f, 0, r0, epsabs=0, epsrel=1e-12, limit=200)
    return MU0 * val


def test_skin_depth_reference_values():
    assert skin_depth(SIGMA_COPPER, 3.5e6) == pytest.approx(34.85e-6, rel=1e-3)
    assert skin_depth(SIGMA_ALUMINIUM, 3.5e6) == pytest.approx(43.8e-6, rel=1e-3)
    assert skin_depth(8e5, 3.5e6) == pytest.approx(300.8e-6, rel=1e-3)


@pytest.mark.parametrize("sigma,f", [(-1.0, 1e6), (1e6, -1.0), (0.0, 1e6), (1e6, 0.0)])
def test_skin_depth_rejects_negative(sigma, f):
    with pytest.raises(DomainError):
        skin_depth(sigma, f)


@given(st.floats(1e3, 1e8), st.floats(1e2, 1e8))
def test_skin_depth_scaling(sigma, f):
    d = skin_depth(sigma, f)
    assert skin_depth(4 * sigma, f) == pytest.approx(d / 2, rel=1e-12)
    assert skin_depth(sigma, 4 * f) == pytest.approx(d / 2, rel=1e-12)


def test_induced_field_value_and_linearity():
    drive = CoilDrive(91e-6, 3.5e6)
    assert induced_e_field(1e-3, drive) == pytest.approx(1.000597, rel=1e-6)
    assert induced_e_field(0.0, drive) == 0.0
    assert induced_e_field(2e-3, drive) == pytest.approx(2 * induced_e_field(1e-3, drive))
    assert eddy_current_density(1e-3, 5.0, drive) == pytest.approx(5 * induced_e_field(1e-3, drive))


def test_induced_field_rejects_negative_radius():
    with pytest.raises(DomainError):
        induced_e_field(-1e-3, DRIVE)


def test_example_disc_thin_limit_field():
    z = secondary_field_on_axis(DISC, DRIVE, skin_effect=False)
    assert z.amplitude == pytest.approx(17.18e-6, rel=1e-3)
    assert z.phase == pytest.approx(math.pi / 2, abs=1e-12)
    assert z.thin_regime


@pytest.mark.parametrize("ratio", np.geomspace(0.1, 10, 13))
def test_on_axis_matches_quadrature(ratio):
    d = 0.5e-3
    disc = SampleDisc(ratio * d, 1e-5, 1e6, d)
    closed = secondary_field_on_axis(disc, DRIVE, skin_effect=False).amplitude
    oracle = quad_on_axis(disc.radius_r0, d, 1e6, DRIVE, 1e-5)
    assert closed == pytest.approx(oracle, rel=1e-6)


def test_skin_effect_matches_depth_quadrature():
    # thick copper: integrate exp(-(1+i) z / delta) over the thickness numerically
    disc = SampleDisc(1e-3, 0.2e-3, SIGMA_COPPER, 0.5e-3)
    delta = skin_depth(SIGMA_COPPER, DRIVE.frequency)
    re, _ = integrate.quad(lambda z: math.exp(-z / delta) * math.cos(z / delta), 0, 0.2e-3,
                           epsabs=0, epsrel=1e-12)
    im, _ = integrate.quad(lambda z: -math.exp(-z / delta) * math.sin(z / delta), 0, 0.2e-3,
                           epsabs=0, epsrel=1e-12)
    h_eff = effective_thickness(0.2e-3, SIGMA_COPPER, DRIVE.frequency)
    assert h_eff.real == pytest.approx(re, rel=1e-9)
    assert h_eff.imag == pytest.approx(im, rel=1e-9)
    z = secondary_field_on_axis(disc, DRIVE)
    thin = secondary_field_on_axis(disc, DRIVE, skin_effect=False)
    assert z.phasor == pytest.approx(thin.phasor * h_eff / 0.2e-3, rel=1e-12)
    assert not z.thin_regime
    assert z.amplitude < thin.amplitude


def test_thin_limit_phase_is_quarter_cycle():
    delta = skin_depth(1e6, DRIVE.frequency)
    disc = SampleDisc(1e-3, 1e-3 * delta, 1e6, 0.5e-3)
    z = secondary_field_on_axis(disc, DRIVE)
    assert z.phase == pytest.approx(math.pi / 2, abs=2e-3)


def test_zero_conductivity_gives_zero_field():
    z = secondary_field_on_axis(DISC.with_sigma(0.0), DRIVE)
    assert z.amplitude == 0.0
    assert z.phase == 0.0


def test_dc_drive_gives_zero_field():
    z = secondary_field_on_axis(DISC, CoilDrive(91e-6, 0.0))
    assert z.amplitude == 0.0


@pytest.mark.parametrize("kw", [dict(radius_r0=0), dict(thickness_h=-1e-4),
                                dict(conductivity_sigma=-1.0), dict(standoff_d=0)])
def test_sample_disc_validation(kw):
    base = dict(radius_r0=1e-3, thickness_h=1e-4, conductivity_sigma=1e6, standoff_d=5e-4)
    base.update(kw)
    with pytest.raises(DomainError):
        SampleDisc(**base)


@settings(max_examples=50)
@given(k=st.floats(0.1, 10.0), which=st.sampled_from(["sigma", "b", "h", "omega"]))
def test_thin_limit_linearity(k, which):
    base = secondary_field_on_axis(DISC, DRIVE, skin_effect=False).amplitude
    disc, drive = DISC, DRIVE
    if which == "sigma":
        disc = DISC.with_sigma(k * DISC.conductivity_sigma)
    elif which == "b":
        drive = CoilDrive(k * DRIVE.b_primary, DRIVE.frequency)
    elif which == "h":
        disc = SampleDisc(DISC.radius_r0, k * DISC.thickness_h, DISC.conductivity_sigma,
                          DISC.standoff_d)
    else:
        drive = CoilDrive(DRIVE.b_primary, k * DRIVE.frequency)
    scaled = secondary_field_on_axis(disc, drive, skin_effect=False).amplitude
    assert scaled == pytest.approx(k * base, rel=1e-12)


@settings(max_examples=50)
@given(st.floats(0.05, 20.0))
def test_field_decreases_with_standoff(ratio):
    d = 0.5e-3
    near = SampleDisc(ratio * d, 1e-4, 1e6, d)
    far = SampleDisc(ratio * d, 1e-4, 1e6, 1.1 * d)
    assert secondary_field_on_axis(far, DRIVE).amplitude < \
        secondary_field_on_axis(near, DRIVE).amplitude


def dipole_error(ratio):
    d = 1e-3
    disc = SampleDisc(d / ratio, 1e-5, 1e6, d)
    exact = secondary_field_on_axis(disc, DRIVE).amplitude
    dip = secondary_field_offaxis(disc, (0.0, 0.0), DRIVE).amplitude
    return abs(dip - exact) / max(dip, exact)


def test_dipole_limit_within_one_percent_far_away():
    for ratio in (10, 10.5, 15, 30, 100, 1000):
        assert dipole_error(ratio) < 0.01


def test_dipole_error_decreases_with_distance():
    errs = [dipole_error(r) for r in (1, 2, 3, 5, 10, 20, 50)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_dipole_error_bound_five_percent():
    # the point-dipole approximation errs by ~(r0/d)^2 on axis; 5% is reached near d = 4.5 r0
    assert dipole_error(5.0) < 0.05
    assert dipole_error(3.0) > 0.05


def test_dipole_moment_formula():
    m = dipole_moment(DISC, DRIVE, skin_effect=False)
    expected = math.pi * 8e5 * DRIVE.omega * 91e-6 * 1e-4 * 1e-12 / 8
    assert m == pytest.approx(1j * expected, rel=1e-12)


@settings(max_examples=50)
@given(st.floats(-3e-3, 3e-3), st.floats(-3e-3, 3e-3))
def test_offaxis_symmetry(dx, dy):
    a = secondary_field_offaxis(DISC, (dx, dy), DRIVE)
    for off in [(-dx, dy), (dx, -dy), (dy, dx)]:
        b = secondary_field_offaxis(DISC, off, DRIVE)
        assert b.amplitude == pytest.approx(a.amplitude, rel=1e-12, abs=1e-30)


def test_offaxis_maximum_on_axis_and_decays():
    rho = np.linspace(0, 0.4e-3, 30)
    amps = [secondary_field_offaxis(DISC, (x, 0.0), DRIVE).amplitude for x in rho]
    assert np.all(np.diff(amps) < 0)
    far = secondary_field_offaxis(DISC, (50e-3, 0.0), DRIVE).amplitude
    assert far < 1e-4 * amps[0]


def test_offaxis_sign_change_at_magic_radius():
    d = DISC.standoff_d
    inside = secondary_field_offaxis(DISC, (0.9 * math.sqrt(2) * d, 0), DRIVE).phasor
    outside = secondary_field_offaxis(DISC, (1.1 * math.sqrt(2) * d, 0), DRIVE).phasor
    assert inside.imag > 0 > outside.imag


def test_complex_field_validation_and_round_trip():
    z = 3e-6 - 4e-6j
    f = ComplexField.from_phasor(z)
    assert f.amplitude == pytest.approx(5e-6)
    assert f.phasor == pytest.approx(z)
    assert -math.pi < f.phase <= math.pi
    with pytest.raises(DomainError):
        ComplexField(-1.0, 0.0)


@given(st.floats(-50, 50))
def test_wrap_phase_range(x):
    w = wrap_phase(x)
    assert -math.pi < w <= math.pi
    assert math.cos(w) == pytest.approx(math.cos(x), abs=1e-9)
