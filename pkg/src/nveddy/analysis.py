"""
Quantitative analyses of scan images and sensor characterization data.

* averaged cross-sections through repeated features,
* resolution from a forward fit of a rectangle convolved with a Gaussian,
* first-order low-pass fits of frequency sweeps,
* the minimum conductivity producing a field equal to the sensor noise.

Both fits use :func:`levenberg_marquardt`, a damped Gauss-Newton solver with
Marquardt's diagonal scaling and analytic Jacobians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.special import erf

from .emforward import CoilDrive, SampleDisc, secondary_field_on_axis
from .errors import DegenerateDataError, DomainError, FitError, NoSolutionError, RangeError
from .scan import ScanImage

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class LMResult:
    params: np.ndarray
    covariance: np.ndarray
    cost: float
    iterations: int
    residuals: np.ndarray


def levenberg_marquardt(residual, jacobian, p0, xtol=1e-8, max_iter=200):
    """Minimize ``sum(residual(p)**2)``.

    Converges when an accepted step changes every parameter by less than
    ``xtol`` relative (absolute below unit magnitude), or when no damping
    level can reduce the cost any further.  Raises :class:`FitError` after
    ``max_iter`` iterations without convergence.

    The returned covariance is ``inv(J^T J) * SSR / (n - p)``.
    """
    p = np.array(p0, dtype=float)
    r = residual(p)
    cost = float(r @ r)
    lam = 1e-3
    for it in range(1, max_iter + 1):
        jac = jacobian(p)
        jtj = jac.T @ jac
        grad = jac.T @ r
        scale = np.maximum(np.diag(jtj), 1e-300)
        accepted = False
        while lam < 1e16:
            try:
                delta = np.linalg.solve(jtj + lam * np.diag(scale), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p + delta
            r_trial = residual(trial)
            cost_trial = float(r_trial @ r_trial)
            if np.isfinite(cost_trial) and cost_trial <= cost:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            return _lm_result(p, r, jacobian, it)
        rel = np.abs(delta) / np.maximum(np.abs(p), 1.0)
        p, r, cost = trial, r_trial, cost_trial
        lam = max(lam / 10.0, 1e-12)
        if np.all(rel < xtol):
            return _lm_result(p, r, jacobian, it)
    raise FitError(f"no convergence after {max_iter} iterations",
                   {"params": p.tolist(), "cost": cost, "damping": lam})


def _lm_result(p, r, jacobian, iterations):
    jac = jacobian(p)
    dof = max(r.size - p.size, 1)
    cost = float(r @ r)
    try:
        cov = np.linalg.inv(jac.T @ jac) * cost / dof
    except np.linalg.LinAlgError:
        cov = np.full((p.size, p.size), np.inf)
    return LMResult(p, cov, cost, iterations, r)


@dataclass(frozen=True)
class CrossSection:
    positions: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if pos.shape != val.shape or pos.ndim != 1:
            raise DomainError("positions and values must be 1-D of equal length")
        if np.any(np.diff(pos) <= 0):
            raise DomainError("positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "values", val)


@dataclass(frozen=True)
class KernelFit:
    """Resolution fit; lengths in meters."""

    fwhm: float
    fwhm_uncertainty: float
    residual_rms: float
    amplitude: float = 1.0
    center: float = 0.0
    baseline: float = 0.0
    iterations: int = 0


@dataclass(frozen=True)
class LowpassFit:
    cutoff: float
    amplitude: float
    cutoff_uncertainty: float = 0.0
    unbounded: bool = False


def average_cross_section(img: ScanImage, dot_centers, half_window: float,
                          quantity: str = "r") -> CrossSection:
    """Mean horizontal profile through several features.

    Each profile is sampled (bilinearly) along ``x`` at the image step, from
    ``-half_window`` to ``+half_window`` around its center, then the profiles
    are averaged and the result is scaled to unit peak.  Positions are
    relative to the centers.
    """
    centers = list(dot_centers)
    if not centers:
        raise DomainError("at least one center is required")
    grid = getattr(img, quantity)
    n = int(math.floor(half_window / img.step + 1e-9))
    offsets = img.step * np.arange(-n, n + 1)
    ny, nx = grid.shape
    profiles = []
    for cx, cy in centers:
        cols = (cx + offsets - img.x0) / img.step
        row = (cy - img.y0) / img.step
        tol = 1e-9
        if cols[0] < -tol or cols[-1] > nx - 1 + tol or not -tol <= row <= ny - 1 + tol:
            raise RangeError(
                f"window around ({cx:g}, {cy:g}) m exceeds the image bounds")
        coords = np.vstack([np.full_like(cols, row), cols])
        coords = np.clip(coords, 0, [[ny - 1], [nx - 1]])
        profiles.append(ndimage.map_coordinates(grid, coords, order=1))
    mean = np.mean(profiles, axis=0)
    peak = mean.max()
    if not peak > 0:
        raise DegenerateDataError("cross-section has no positive peak to normalize")
    return CrossSection(offsets, mean / peak)


def rect_gauss(x, fwhm, width, amplitude=1.0, center=0.0, baseline=0.0):
    """Rectangle of ``width`` convolved with a unit-area Gaussian of ``fwhm``."""
    x = np.asarray(x, dtype=float)
    s = max(abs(fwhm), 1e-300) / FWHM_PER_SIGMA
    u1 = (x - center + width / 2.0) / (math.sqrt(2.0) * s)
    u2 = (x - center - width / 2.0) / (math.sqrt(2.0) * s)
    return amplitude * 0.5 * (erf(u1) - erf(u2)) + baseline


def _rect_gauss_jacobian(x, p):
    """Columns d/d(fwhm, amplitude, center, baseline) for unit width."""
    fwhm, amp, c, _ = p
    sign = 1.0 if fwhm >= 0 else -1.0
    s = max(abs(fwhm), 1e-12) / FWHM_PER_SIGMA
    v1 = x - c + 0.5
    v2 = x - c - 0.5
    e1 = np.exp(-0.5 * (v1 / s) ** 2)
    e2 = np.exp(-0.5 * (v2 / s) ** 2)
    k = math.sqrt(2.0 / math.pi)
    d_amp = 0.5 * (erf(v1 / (math.sqrt(2) * s)) - erf(v2 / (math.sqrt(2) * s)))
    d_c = amp * 0.5 * (-k / s) * (e1 - e2)
    d_s = amp * 0.5 * (-k / s ** 2) * (v1 * e1 - v2 * e2)
    d_fwhm = sign * d_s / FWHM_PER_SIGMA
    return np.column_stack([d_fwhm, d_amp, d_c, np.ones_like(x)])


def fit_square_gauss_kernel(profile: CrossSection, square_width: float,
                            max_iter: int = 200) -> KernelFit:
    """Gaussian kernel that, convolved with a rectangle of ``square_width``,
    best reproduces ``profile`` in the least-squares sense.

    Free parameters are FWHM, amplitude, center and baseline.  Fixed starting
    point: baseline = profile minimum, amplitude = peak-to-peak, center =
    weighted centroid, FWHM = 0.3 * square_width.  Positions are scaled by
    ``square_width`` internally.
    """
    if not square_width > 0:
        raise DomainError("square_width must be > 0")
    x_raw, y = profile.positions, profile.values
    if x_raw[-1] - x_raw[0] < 3.0 * square_width * (1 - 1e-9):
        raise DomainError("profile must span at least 3x the square width")
    x = x_raw / square_width
    base0 = float(y.min())
    amp0 = float(y.max() - base0)
    if not amp0 > 0:
        raise DegenerateDataError("flat profile")
    w = y - base0
    c0 = float(np.sum(w * x) / np.sum(w))
    p0 = [0.3, amp0, c0, base0]

    def residual(p):
        return rect_gauss(x, p[0], 1.0, p[1], p[2], p[3]) - y

    try:
        res = levenberg_marquardt(residual, lambda p: _rect_gauss_jacobian(x, p), p0,
                                  max_iter=max_iter)
    except FitError as exc:
        exc.diagnostics["square_width"] = square_width
        raise
    fwhm = float(abs(res.params[0]) * square_width)
    unc = math.sqrt(max(res.covariance[0, 0], 0.0)) * square_width
    rms = math.sqrt(res.cost / y.size)
    return KernelFit(fwhm, float(unc), float(rms), float(res.params[1]),
                     float(res.params[2]) * square_width, float(res.params[3]),
                     res.iterations)


def profile_fwhm(positions, values) -> float:
    """Full width at half maximum of a single-peaked profile (linear
    interpolation between samples)."""
    x = np.asarray(positions, dtype=float)
    y = np.asarray(values, dtype=float)
    k = int(np.argmax(y))
    half = y[k] / 2.0
    if not y[k] > 0:
        raise DegenerateDataError("profile has no positive peak")
    left = k
    while left > 0 and y[left - 1] >= half:
        left -= 1
    right = k
    while right < y.size - 1 and y[right + 1] >= half:
        right += 1
    if left == 0 or right == y.size - 1:
        raise RangeError("half maximum not reached inside the profile")
    xl = np.interp(half, [y[left - 1], y[left]], [x[left - 1], x[left]])
    xr = np.interp(half, [y[right + 1], y[right]], [x[right + 1], x[right]])
    return float(xr - xl)


def fit_lowpass(frequencies, responses, max_iter: int = 200) -> LowpassFit:
    """Fit ``A / sqrt(1 + (f / f_c)^2)`` to a frequency sweep.

    The cutoff is fitted on a log scale.  If the data show no roll-off (the
    cutoff runs beyond 100x the highest frequency) the result is flagged
    ``unbounded`` with ``cutoff = inf``.
    """
    f = np.asarray(frequencies, dtype=float)
    y = np.asarray(responses, dtype=float)
    if f.shape != y.shape or f.ndim != 1 or f.size < 3:
        raise DomainError("need at least 3 (frequency, response) points")
    if np.any(f <= 0):
        raise DomainError("frequencies must be > 0")
    order = np.argsort(f)
    f, y = f[order], y[order]
    f_ref = math.exp(float(np.mean(np.log(f))))
    q_max = math.log(1e4 * f[-1] / f_ref)

    amp0 = float(y[0])
    below = np.nonzero(y < amp0 / math.sqrt(2.0))[0]
    fc0 = float(f[below[0]]) if below.size else float(f[-1])
    p0 = [amp0, math.log(fc0 / f_ref)]

    def parts(p):
        q = min(p[1], q_max)
        xx = f / (f_ref * math.exp(q))
        g = 1.0 / np.sqrt(1.0 + xx * xx)
        return q, xx, g

    def residual(p):
        _, _, g = parts(p)
        return p[0] * g - y

    def jacobian(p):
        q, xx, g = parts(p)
        d_q = p[0] * xx * xx * g ** 3 if p[1] < q_max else np.zeros_like(f)
        return np.column_stack([g, d_q])

    res = levenberg_marquardt(residual, jacobian, p0, max_iter=max_iter)
    amp, q = float(res.params[0]), float(res.params[1])
    fc = f_ref * math.exp(min(q, q_max))
    if fc > 100.0 * f[-1]:
        return LowpassFit(math.inf, amp, math.inf, True)
    unc = fc * math.sqrt(max(res.covariance[1, 1], 0.0))
    return LowpassFit(fc, amp, unc, False)


def min_detectable_conductivity(radius_r0: float, thickness_h: float, standoff_d: float,
                                drive: CoilDrive, noise_floor: float) -> float:
    """Conductivity (S/m per sqrt(Hz)) whose thin-sample secondary field on
    axis equals ``noise_floor`` (T/sqrt(Hz))."""
    if not noise_floor > 0:
        raise DomainError("noise_floor must be > 0")
    unit = SampleDisc(radius_r0, thickness_h, 1.0, standoff_d)
    per_sigma = secondary_field_on_axis(unit, drive, skin_effect=False).amplitude
    if not per_sigma > 0:
        raise NoSolutionError("drive produces no eddy currents (zero field or frequency)")
    return noise_floor / per_sigma


def find_peaks(grid, min_distance: int = 3, threshold_rel: float = 0.5):
    """Local maxima of a 2-D array as ``(row, col)`` index pairs.

    A peak is the maximum within a ``(2 * min_distance + 1)`` square window
    and at least ``threshold_rel`` times the global maximum.  Flat-topped
    maxima count once.
    """
    grid = np.asarray(grid, dtype=float)
    top = grid.max()
    if not top > 0:
        return []
    local = ndimage.maximum_filter(grid, size=2 * min_distance + 1, mode="nearest")
    mask = (grid == local) & (grid >= threshold_rel * top)
    labels, n = ndimage.label(mask, structure=np.ones((3, 3)))
    peaks = ndimage.center_of_mass(mask, labels, range(1, n + 1))
    return sorted((int(round(r)), int(round(c))) for r, c in peaks)


def peak_positions(img: ScanImage, min_distance: float, threshold_rel: float = 0.5,
                   quantity: str = "r"):
    """Physical ``(x, y)`` positions of the peaks of an image quantity."""
    radius = max(1, int(round(min_distance / img.step)))
    return [(img.x0 + c * img.step, img.y0 + r * img.step)
            for r, c in find_peaks(getattr(img, quantity), radius, threshold_rel)]
