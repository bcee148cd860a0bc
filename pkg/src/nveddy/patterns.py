"""
Pattern ingestion, synthetic test patterns and image export.

Inputs are portable graymaps (binary P5 or ASCII P2, 8 or 16 bit) or CSV
grids.  Outputs are CSV files with a ``#``-prefixed ``key=value`` metadata
header followed by row-major values, and 16-bit binary PGMs whose min-max
scaling is stored in a ``<name>.scale.txt`` sidecar.

Array row 0 is always the first row written to or read from a file.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import DomainError, FormatError
from .scan import ConductivityMap, ScanImage

_PNM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a P2/P5 graymap; returns ``(pixels, maxval)``."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PNM_TOKEN.match(data, pos)
        if m is None:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError(f"{path}: malformed PGM header") from None
    if magic not in (b"P2", b"P5") or width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise FormatError(f"{path}: not a supported PGM (magic {magic!r})")
    count = width * height
    if magic == b"P5":
        dtype = ">u2" if maxval > 255 else "u1"
        body = data[pos + 1:]
        if len(body) < count * np.dtype(dtype).itemsize:
            raise FormatError(f"{path}: PGM pixel data truncated")
        pixels = np.frombuffer(body, dtype=dtype, count=count)
    else:
        try:
            pixels = np.array(data[pos:].split(), dtype=np.int64)
        except ValueError:
            raise FormatError(f"{path}: non-integer ASCII PGM data") from None
        if pixels.size != count:
            raise FormatError(f"{path}: expected {count} values, found {pixels.size}")
    return pixels.reshape(height, width).astype(np.int64), maxval


def write_pgm(path, pixels, maxval: int = 65535) -> None:
    """Write a binary (P5) graymap; 16-bit big-endian when ``maxval > 255``."""
    pixels = np.asarray(pixels)
    height, width = pixels.shape
    dtype = ">u2" if maxval > 255 else "u1"
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.clip(pixels, 0, maxval).astype(dtype).tobytes())
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write PGM: {exc.strerror}", str(path)) from exc


def read_csv_grid(path) -> tuple[np.ndarray, dict]:
    """Read a numeric CSV grid and its ``# key=value`` header lines."""
    path = Path(path)
    meta = {}
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, sep, value = line[1:].partition("=")
                    if sep:
                        meta[key.strip()] = value.strip()
                    continue
                try:
                    rows.append([float(v) for v in line.split(",")])
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: non-numeric value") from None
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    if not rows:
        raise FormatError(f"{path}: no data rows")
    if len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: rows have differing lengths")
    return np.array(rows, dtype=float), meta


def _load_intensity(source) -> np.ndarray:
    """Pattern intensities normalized to [0, 1]."""
    if isinstance(source, np.ndarray):
        values = source.astype(float)
        peak = values.max() if values.size else 0.0
        return values / peak if peak > 1 else values
    path = Path(source)
    if path.suffix.lower() in (".pgm", ".pnm"):
        pixels, maxval = read_pgm(path)
        return pixels / float(maxval)
    if path.suffix.lower() in (".csv", ".txt"):
        values, _ = read_csv_grid(path)
        if np.any(values < 0):
            raise FormatError(f"{path}: negative intensity")
        peak = values.max()
        return values / peak if peak > 1 else values
    raise FormatError(f"{path}: unsupported pattern format (use .pgm or .csv)")


def ingest_pattern(source, sigma: float, pitch: float, thickness: float,
                   standoff: float, threshold: float = 0.5, grayscale: bool = False,
                   origin=(0.0, 0.0)) -> ConductivityMap:
    """Turn artwork into a conductivity map.

    White (high intensity) is conductor.  In binary mode pixels with
    normalized intensity strictly above ``threshold`` get ``sigma``; in
    grayscale mode intensity maps linearly onto ``[0, sigma]``.
    """
    if not 0.0 <= threshold <= 1.0:
        raise DomainError("threshold must lie in [0, 1]")
    intensity = _load_intensity(source)
    if grayscale:
        sig = sigma * intensity
    else:
        sig = np.where(intensity > threshold, sigma, 0.0)
    return ConductivityMap(sig, pitch, thickness, standoff, origin)


def count_components(mask) -> int:
    """Number of 8-connected regions in a boolean mask."""
    _, n = ndimage.label(np.asarray(mask, dtype=bool), structure=np.ones((3, 3)))
    return int(n)


def dot_grid_pattern(rows: int = 3, cols: int = 5, diameter: float = 1e-3,
                     spacing: float = 2e-3, pitch: float = 50e-6,
                     margin: float = 2e-3):
    """Binary raster of a ``rows x cols`` grid of discs.

    Returns ``(mask, centers)`` where centers are ``(x, y)`` in meters relative
    to pixel ``[0, 0]``.
    """
    width = (cols - 1) * spacing + 2 * margin
    height = (rows - 1) * spacing + 2 * margin
    nx = int(round(width / pitch)) + 1
    ny = int(round(height / pitch)) + 1
    x = pitch * np.arange(nx)
    y = pitch * np.arange(ny)
    gx, gy = np.meshgrid(x, y)
    mask = np.zeros((ny, nx), dtype=bool)
    centers = []
    for i in range(rows):
        for j in range(cols):
            cx, cy = margin + j * spacing, margin + i * spacing
            centers.append((cx, cy))
            mask |= (gx - cx) ** 2 + (gy - cy) ** 2 <= (diameter / 2) ** 2
    return mask, centers


def wheel_pattern(outer_diameter: float = 9e-3, rim_width: float = 0.7e-3,
                  spoke_width: float = 0.6e-3, hub_diameter: float = 1.6e-3,
                  spokes: int = 6, pitch: float = 50e-6, margin: float = 1.5e-3):
    """Binary raster of a spoked wheel, a simplified civic coat-of-arms motif."""
    size = outer_diameter + 2 * margin
    n = int(round(size / pitch)) + 1
    c = size / 2
    coords = pitch * np.arange(n) - c
    gx, gy = np.meshgrid(coords, coords)
    rad = np.hypot(gx, gy)
    r_out = outer_diameter / 2
    mask = (rad <= r_out) & (rad >= r_out - rim_width)
    mask |= rad <= hub_diameter / 2
    for k in range(spokes):
        a = np.pi / 2 + 2 * np.pi * k / spokes
        along = gx * np.cos(a) + gy * np.sin(a)
        across = -gx * np.sin(a) + gy * np.cos(a)
        mask |= (np.abs(across) <= spoke_width / 2) & (along >= 0) & (along <= r_out)
    return mask


def export_image(img: ScanImage, path, format: str = "csv", quantity: str = "r") -> None:
    """Write one quantity (``"r"`` or ``"theta"``) of a scan image.

    CSV values are printed with 17 significant digits so a re-import is
    bit-identical.  PGM output is min-max scaled to 16 bits; the scale is
    written to ``<path>.scale.txt``.
    """
    if quantity not in ("r", "theta"):
        raise DomainError(f"unknown quantity {quantity!r}")
    grid = getattr(img, quantity)
    path = Path(path)
    try:
        if format == "csv":
            _write_csv(img, grid, path, quantity)
        elif format == "pgm":
            lo, hi = float(grid.min()), float(grid.max())
            span = hi - lo
            scaled = np.zeros(grid.shape) if span == 0 else (grid - lo) / span
            write_pgm(path, np.rint(scaled * 65535).astype(np.int64), 65535)
            sidecar = path.with_name(path.name + ".scale.txt")
            sidecar.write_text(
                f"quantity={quantity}\nmin={lo!r}\nmax={hi!r}\nmaxval=65535\n"
                f"x0={img.x0!r}\ny0={img.y0!r}\nstep={img.step!r}\n", encoding="utf-8")
        else:
            raise DomainError(f"unknown export format {format!r}")
    except OSError as exc:
        raise OSError(exc.errno, f"{path}: {exc.strerror}") from exc


def _write_csv(img, grid, path, quantity):
    header = (f"# quantity={quantity}\n# x0={img.x0!r}\n# y0={img.y0!r}\n"
              f"# step={img.step!r}\n# rows={grid.shape[0]}\n# cols={grid.shape[1]}\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header)
        for row in grid:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_image_csv(path, theta_path=None) -> ScanImage:
    """Rebuild a :class:`ScanImage` from an exported R CSV (and optional theta CSV)."""
    r, meta = read_csv_grid(path)
    theta = np.zeros_like(r)
    if theta_path is not None:
        theta, _ = read_csv_grid(theta_path)
        if theta.shape != r.shape:
            raise FormatError(f"{theta_path}: shape differs from {path}")
    try:
        x0, y0, step = (float(meta[k]) for k in ("x0", "y0", "step"))
    except KeyError as exc:
        raise FormatError(f"{path}: missing metadata {exc}") from None
    return ScanImage(r, theta, x0, y0, step)


def write_mask_pgm(path, mask) -> None:
    """Store a boolean mask as an 8-bit binary PGM (conductor = 255)."""
    write_pgm(path, np.where(mask, 255, 0), 255)


def bundled_assets():
    """Masks of the bundled test patterns, keyed by file name."""
    return {
        "fifteen_dots.pgm": dot_grid_pattern()[0],
        "mainz_wheel.pgm": wheel_pattern(),
    }


def data_path(name: str) -> Path:
    """Path of a bundled data file."""
    return Path(os.path.dirname(__file__)) / "data" / name
