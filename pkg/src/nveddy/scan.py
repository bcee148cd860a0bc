"""
Raster-scan simulator producing lock-in R and theta images.

Every conductive pixel of a :class:`ConductivityMap` is replaced by a thin
disc of equal area and its eddy-current dipole; the sensor field at each scan
position is the superposition of those dipoles plus an optional uniform
background phasor.  The detection chain then either applies the small-signal
lock-in result directly (``mode="analytic"``) or synthesizes and demodulates
a photodiode record per position (``mode="timedomain"``).

When the scan grid coincides with the map lattice the dipole sum is a
discrete convolution and is evaluated by FFT; otherwise every pixel is summed
at every position.  Either way the work partition does not depend on the
worker count, so the output is bit-identical for any number of threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

from .emforward import CoilDrive, dipole_axial_kernel, wrap_phase, MU0
from .errors import DomainError, ResolutionError
from .lockin import demodulate_xy
from .magnetometer import (MagnetometerParams, OperatingPoint, select_operating_point,
                           sensor_cutoff, sensor_response)
from . import lockin

_PAIR_BUDGET = 2_000_000


@dataclass(frozen=True)
class ConductivityMap:
    """Conductivity raster.

    ``sigma[i, j]`` is the conductivity (S/m) of the pixel centered at
    ``x = origin[0] + j * pitch``, ``y = origin[1] + i * pitch``.
    """

    sigma: np.ndarray
    pitch: float
    thickness: float
    standoff: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=float)
        if sigma.ndim != 2 or sigma.size == 0:
            raise DomainError("sigma must be a non-empty 2-D array")
        if np.any(~np.isfinite(sigma)) or np.any(sigma < 0):
            raise DomainError("sigma must be finite and >= 0")
        for name in ("pitch", "thickness", "standoff"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))

    @property
    def shape(self):
        return self.sigma.shape

    @property
    def x(self) -> np.ndarray:
        return self.origin[0] + self.pitch * np.arange(self.shape[1])

    @property
    def y(self) -> np.ndarray:
        return self.origin[1] + self.pitch * np.arange(self.shape[0])

    def shifted(self, dx: float, dy: float) -> "ConductivityMap":
        return replace(self, origin=(self.origin[0] + dx, self.origin[1] + dy))

    def with_sigma(self, sigma) -> "ConductivityMap":
        return replace(self, sigma=sigma)


@dataclass(frozen=True)
class ScanConfig:
    """Raster geometry and detection settings.

    ``operating_point`` defaults to the best bias in region alpha.
    ``background`` is a uniform complex field (T) added at every position,
    e.g. the offset of a foil covering the sample.  Time-domain settings are
    used only with ``mode="timedomain"``; there the record is sampled at
    ``samples_per_period`` times the drive frequency.
    """

    x_start: float
    x_stop: float
    y_start: float
    y_stop: float
    step: float
    drive: CoilDrive
    params: MagnetometerParams = field(default_factory=MagnetometerParams)
    operating_point: Optional[OperatingPoint] = None
    mode: str = "analytic"
    skin_effect: bool = True
    background: complex = 0j
    time_constant: float = 3e-3
    samples_per_period: int = 8
    noise: bool = False
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError("scan step must be > 0")
        if self.x_stop < self.x_start or self.y_stop < self.y_start:
            raise DomainError("scan extents must cover at least one point")
        if self.mode not in ("analytic", "timedomain"):
            raise DomainError(f"unknown evaluation mode {self.mode!r}")
        if self.threads < 1:
            raise DomainError("threads must be >= 1")
        if self.mode == "timedomain" and self.samples_per_period <= 4:
            raise DomainError("samples_per_period must exceed 4")

    @classmethod
    def covering(cls, cmap: ConductivityMap, step: float, drive: CoilDrive,
                 margin: float = 0.0, **kwargs) -> "ScanConfig":
        """Scan over the map's pixel-center extent grown by ``margin``."""
        x, y = cmap.x, cmap.y
        return cls(x[0] - margin, x[-1] + margin, y[0] - margin, y[-1] + margin,
                   step, drive, **kwargs)

    @property
    def xs(self) -> np.ndarray:
        n = int(math.floor((self.x_stop - self.x_start) / self.step + 1e-9)) + 1
        return self.x_start + self.step * np.arange(n)

    @property
    def ys(self) -> np.ndarray:
        n = int(math.floor((self.y_stop - self.y_start) / self.step + 1e-9)) + 1
        return self.y_start + self.step * np.arange(n)

    def resolved_operating_point(self) -> OperatingPoint:
        if self.operating_point is not None:
            return self.operating_point
        return select_operating_point("alpha", self.params)

    def replace(self, **changes) -> "ScanConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class ScanImage:
    """Lock-in images; row ``i`` is ``y = y0 + i * step``, column ``j`` is
    ``x = x0 + j * step``.  ``r`` is in PL-fraction units."""

    r: np.ndarray
    theta: np.ndarray
    x0: float
    y0: float
    step: float

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        if r.shape != theta.shape or r.ndim != 2:
            raise DomainError("r and theta must be 2-D arrays of equal shape")
        if np.any(r < 0):
            raise DomainError("r must be non-negative")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", theta)

    @property
    def shape(self):
        return self.r.shape

    @property
    def complex(self) -> np.ndarray:
        return self.r * np.exp(1j * self.theta)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.step * np.arange(self.shape[1])

    @property
    def y(self) -> np.ndarray:
        return self.y0 + self.step * np.arange(self.shape[0])


def pixel_moments(cmap: ConductivityMap, drive: CoilDrive, skin_effect: bool = True):
    """Complex dipole moments (A m^2) of the conductive pixels.

    Returns ``(x, y, m)`` for pixels with nonzero conductivity.  Each pixel is
    a disc of radius ``pitch / sqrt(pi)``.
    """
    rows, cols = np.nonzero(cmap.sigma)
    sigma = cmap.sigma[rows, cols]
    omega = drive.omega
    if skin_effect and omega > 0 and sigma.size:
        k = (1 + 1j) * np.sqrt(MU0 * sigma * omega / 2.0)
        h_eff = -np.expm1(-k * cmap.thickness) / k
    else:
        h_eff = np.full(sigma.shape, cmap.thickness, dtype=complex)
    r_pix = cmap.pitch / math.sqrt(math.pi)
    m = 1j * math.pi * sigma * omega * drive.b_primary * h_eff * r_pix ** 4 / 8.0
    return cmap.x[cols], cmap.y[rows], m


def secondary_field_map(cmap: ConductivityMap, cfg: ScanConfig,
                        method: str = "auto") -> np.ndarray:
    """Complex secondary field (T) at every scan position, shape (ny, nx).

    ``method="direct"`` sums every pixel dipole at every position.
    ``"lattice"`` requires the scan step to equal the map pitch with scan
    positions on the pixel lattice, and evaluates the same sum as an FFT
    convolution.  ``"auto"`` picks the lattice path whenever it applies.
    """
    if cmap.pitch > cmap.standoff / 2.0 * (1 + 1e-12):
        raise ResolutionError(
            f"map pitch {cmap.pitch:g} m exceeds standoff/2 = {cmap.standoff / 2:g} m; "
            "the pixel-dipole discretization would be inaccurate")
    px, py, m = pixel_moments(cmap, cfg.drive, cfg.skin_effect)
    xs, ys = cfg.xs, cfg.ys
    out = np.full((ys.size, xs.size), complex(cfg.background))
    if m.size == 0:
        return out
    offsets = _lattice_offsets(cmap, cfg) if method != "direct" else None
    if offsets is not None:
        out += _convolve_on_lattice(cmap, cfg, offsets)
        return out
    if method == "lattice":
        raise DomainError("scan grid is not aligned with the map lattice")
    rows_per_block = max(1, _PAIR_BUDGET // (xs.size * m.size))
    blocks = [(i, min(i + rows_per_block, ys.size)) for i in range(0, ys.size, rows_per_block)]
    m_re, m_im = np.ascontiguousarray(m.real), np.ascontiguousarray(m.imag)

    def work(block):
        i0, i1 = block
        gx, gy = np.meshgrid(xs, ys[i0:i1])
        kern = dipole_axial_kernel(gx.reshape(-1, 1) - px, gy.reshape(-1, 1) - py,
                                   cmap.standoff)
        field_ = kern @ m_re + 1j * (kern @ m_im)
        out[i0:i1] += field_.reshape(i1 - i0, xs.size)

    _run(work, blocks, cfg.threads)
    return out


def _lattice_offsets(cmap, cfg):
    """Integer pixel offsets of the first scan position, or None if the scan
    grid does not coincide with the map lattice."""
    if abs(cfg.step - cmap.pitch) > 1e-9 * cmap.pitch:
        return None
    ox = (cfg.x_start - cmap.origin[0]) / cmap.pitch
    oy = (cfg.y_start - cmap.origin[1]) / cmap.pitch
    if abs(ox - round(ox)) > 1e-6 or abs(oy - round(oy)) > 1e-6:
        return None
    return int(round(oy)), int(round(ox))


def _convolve_on_lattice(cmap, cfg, offsets):
    oy, ox = offsets
    _, _, m = pixel_moments(cmap, cfg.drive, cfg.skin_effect)
    moments = np.zeros(cmap.shape, dtype=complex)
    moments[np.nonzero(cmap.sigma)] = m
    nyp, nxp = cmap.shape
    ny, nx = cfg.ys.size, cfg.xs.size
    ky = (oy - (nyp - 1) + np.arange(ny + nyp - 1)) * cmap.pitch
    kx = (ox - (nxp - 1) + np.arange(nx + nxp - 1)) * cmap.pitch
    kernel = dipole_axial_kernel(kx[None, :], ky[:, None], cmap.standoff)
    shape = (nyp + kernel.shape[0] - 1, nxp + kernel.shape[1] - 1)
    fshape = tuple(sp_fft.next_fast_len(n) for n in shape)
    with sp_fft.set_workers(cfg.threads):
        spec = sp_fft.fft2(moments, fshape) * sp_fft.fft2(kernel, fshape)
        full = sp_fft.ifft2(spec)
    return full[nyp - 1:nyp - 1 + ny, nxp - 1:nxp - 1 + nx]


def _run(work, blocks, threads):
    if threads == 1:
        for b in blocks:
            work(b)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, blocks))


def scan(cmap: ConductivityMap, cfg: ScanConfig, method: str = "auto") -> ScanImage:
    """Simulate a raster scan of ``cmap`` and return the R/theta images.

    ``method`` selects how the dipole sum is evaluated, see
    :func:`secondary_field_map`.
    """
    field_ = secondary_field_map(cmap, cfg, method)
    op = cfg.resolved_operating_point()
    gain = sensor_response(cfg.drive.frequency, sensor_cutoff(cfg.params))
    if cfg.mode == "analytic":
        r = op.responsivity * gain * np.abs(field_)
        theta = np.where(r > 0, wrap_phase(np.angle(field_)), 0.0)
    else:
        r, theta = _timedomain_detect(field_, op, gain, cfg)
    return ScanImage(r, theta, float(cfg.xs[0]), float(cfg.ys[0]), cfg.step)


def _timedomain_detect(field_, op, gain, cfg):
    f = cfg.drive.frequency
    if not f > 0:
        raise DomainError("time-domain mode needs a nonzero drive frequency")
    fs = cfg.samples_per_period * f
    periods = math.ceil(lockin.SETTLING_TIME_CONSTANTS * cfg.time_constant * f)
    n = periods * cfg.samples_per_period
    t = np.arange(n) / fs
    carrier_sin = np.sin(2 * np.pi * f * t)
    carrier_cos = np.cos(2 * np.pi * f * t)
    flat = field_.reshape(-1)
    r = np.empty(flat.size)
    theta = np.empty(flat.size)
    per_block = max(1, _PAIR_BUDGET // n)
    blocks = [(i, min(i + per_block, flat.size)) for i in range(0, flat.size, per_block)]
    noise_scale = op.responsivity * cfg.params.noise_floor * math.sqrt(fs / 2.0)
    ny, nx = field_.shape

    def work(block):
        i0, i1 = block
        z = gain * flat[i0:i1, None]
        # |z| sin(wt + arg z) = Re(z) sin(wt) + Im(z) cos(wt)
        b = z.real * carrier_sin + z.imag * carrier_cos
        samples = lockin._pl_samples(b, op, cfg.params)
        if cfg.noise:
            for k, idx in enumerate(range(i0, i1)):
                rng = np.random.default_rng([cfg.seed, idx // nx, idx % nx])
                samples[k] += noise_scale * rng.standard_normal(n)
        x, y = demodulate_xy(samples, fs, f, cfg.time_constant)
        r[i0:i1] = np.hypot(x, y)
        theta[i0:i1] = np.where(r[i0:i1] > 0, wrap_phase(np.arctan2(y, x)), 0.0)

    _run(work, blocks, cfg.threads)
    return r.reshape(ny, nx), theta.reshape(ny, nx)
