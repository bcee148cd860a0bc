"""
Command-line entry point.

Exit status: 0 on success, 1 on runtime errors, 2 on usage or configuration
errors (including missing input files).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (average_cross_section, fit_lowpass, fit_square_gauss_kernel,
                       min_detectable_conductivity, peak_positions, rect_gauss)
from .config import RunConfig, load_magnetometer_params
from .emforward import CoilDrive, skin_depth
from .errors import ConfigError, DomainError, FormatError, NVEddyError
from .magnetometer import bandwidth_cutoff, select_operating_point, sensor_response
from .patterns import export_image, ingest_pattern, read_image_csv
from .scan import ScanConfig, scan

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _drive(run: RunConfig) -> CoilDrive:
    sec = run.section("drive")
    return CoilDrive(sec.quantity("b_primary", "T"), sec.quantity("frequency", "Hz"))


def _load_params(run):
    return load_magnetometer_params(run.magnetometer_file if run else None)


def _out_dir(args, run, default="nveddy-out") -> Path:
    if args.out is not None:
        out = Path(args.out)
    elif run is not None and run.section("output").text("directory", ""):
        # relative to the working directory, so bundled configs never write into the package
        out = Path(run.section("output").text("directory"))
    else:
        out = Path(default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _seed(args, run) -> int:
    if args.seed is not None:
        return args.seed
    if run is not None:
        return run.section("output").integer("seed", 0)
    return 0


def _build_scan(run: RunConfig, args):
    try:
        return _build_scan_unchecked(run, args)
    except DomainError as exc:
        raise ConfigError(f"{run.source}: {exc}") from exc


def _build_scan_unchecked(run, args):
    pat = run.section("pattern")
    source = pat.path("source")
    if not source.is_file():
        raise ConfigError(f"{source}: pattern file not found")
    cmap = ingest_pattern(source, pat.quantity("sigma", "S/m"), pat.quantity("pitch", "m"),
                          pat.quantity("thickness", "m"), pat.quantity("standoff", "m"),
                          threshold=pat.number("threshold", 0.5),
                          grayscale=pat.flag("grayscale", False))
    sec = run.section("scan")
    params = _load_params(run)
    region = sec.text("region", "alpha")
    background = complex(sec.quantity("background_re", "T", 0.0),
                         sec.quantity("background_im", "T", 0.0))
    cfg = ScanConfig.covering(
        cmap, sec.quantity("step", "m", 50e-6), _drive(run),
        margin=sec.quantity("margin", "m", 0.0),
        params=params, operating_point=select_operating_point(region, params),
        mode=args.mode or sec.text("mode", "analytic"),
        skin_effect=sec.flag("skin_effect", True), background=background,
        time_constant=sec.quantity("time_constant", "s", 3e-3),
        samples_per_period=sec.integer("samples_per_period", 8),
        noise=sec.flag("noise", False), seed=_seed(args, run), threads=args.threads)
    return cmap, cfg, source


def _manifest(out: Path, command: str, run: RunConfig, seed, extra, outputs):
    manifest = {
        "command": command,
        "software": {"name": "nveddy", "version": __version__},
        "config": {"path": str(run.source), "sha256": _sha256(run.source)} if run else None,
        "seed": seed,
        **extra,
        "outputs": {name: _sha256(out / name) for name in outputs},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")


def cmd_scan(args) -> int:
    run = RunConfig.load(args.config)
    cmap, cfg, source = _build_scan(run, args)
    img = scan(cmap, cfg)
    out = _out_dir(args, run)
    outputs = []
    for quantity, stem in (("r", "R"), ("theta", "theta")):
        for fmt in ("csv", "pgm"):
            name = f"{stem}.{fmt}"
            export_image(img, out / name, fmt, quantity)
            outputs.append(name)
            if fmt == "pgm":
                outputs.append(name + ".scale.txt")
    extra = {"mode": cfg.mode,
             "inputs": {"pattern": {"path": str(source), "sha256": _sha256(source)}},
             "operating_point": {"region": cfg.operating_point.region,
                                 "bias_field_T": cfg.operating_point.bias_field}}
    if run.magnetometer_file:
        extra["inputs"]["magnetometer"] = {"path": str(run.magnetometer_file),
                                           "sha256": _sha256(run.magnetometer_file)}
    _manifest(out, "scan", run, cfg.seed, extra, outputs)
    print(f"scan: {img.shape[1]}x{img.shape[0]} positions, max R = {img.r.max():.6g}, "
          f"outputs in {out}")
    return EXIT_OK


def cmd_resolution(args) -> int:
    run = RunConfig.load(args.config)
    sec = run.section("resolution")
    if args.image is not None:
        image_path = Path(args.image)
        if not image_path.is_file():
            raise ConfigError(f"{image_path}: image file not found")
        img = read_image_csv(image_path)
    else:
        cmap, cfg, _ = _build_scan(run, args)
        img = scan(cmap, cfg)
    width = sec.quantity("square_width", "m", 1e-3)
    half_window = sec.quantity("half_window", "m", 1.5 * width)
    separation = sec.quantity("peak_separation", "m", width / 2)
    centers = peak_positions(img, separation, sec.number("peak_threshold", 0.5))
    expected = sec.integer("expected_features", 0)
    if expected and len(centers) != expected:
        print(f"warning: found {len(centers)} features, expected {expected}", file=sys.stderr)
    profile = average_cross_section(img, centers, half_window)
    fit = fit_square_gauss_kernel(profile, width)
    out = _out_dir(args, run)
    model = rect_gauss(profile.positions, fit.fwhm, width, fit.amplitude, fit.center,
                       fit.baseline)
    with open(out / "profile.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# square_width={width!r}\n# features={len(centers)}\n")
        fh.write("position_m,value,model\n")
        for x, v, m in zip(profile.positions, profile.values, model):
            fh.write(f"{x!r},{v!r},{m!r}\n")
    report = {
        "features": len(centers),
        "square_width_m": width,
        "fwhm_m": fit.fwhm,
        "fwhm_uncertainty_m": fit.fwhm_uncertainty,
        "residual_rms": fit.residual_rms,
        "amplitude": fit.amplitude,
        "center_m": fit.center,
        "baseline": fit.baseline,
        "iterations": fit.iterations,
    }
    _write_report(out / "resolution.txt", report)
    _manifest(out, "resolution", run, _seed(args, run), {},
              ["profile.csv", "resolution.txt"])
    print(f"resolution: FWHM = {fit.fwhm * 1e6:.1f} +/- {fit.fwhm_uncertainty * 1e6:.1f} um "
          f"from {len(centers)} features")
    return EXIT_OK


def _write_report(path, values):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in values.items():
            fh.write(f"{key} = {value!r}\n" if isinstance(value, float) else
                     f"{key} = {value}\n")


def cmd_bandwidth(args) -> int:
    run = RunConfig.load(args.config) if args.config else None
    params = _load_params(run)
    sec = run.section("bandwidth") if run else None
    get = (lambda k, u, d: sec.quantity(k, u, d)) if sec else (lambda k, u, d: d)
    intensity = get("pump_intensity", "W/mm^2", params.saturation_intensity)
    angle = get("misalignment", "deg", params.bandwidth_reference_angle)
    f_lo, f_hi = get("f_min", "Hz", 1e4), get("f_max", "Hz", 1e8)
    points = int(get("points", "", 30))
    rel_noise = get("relative_noise", "", 0.0)
    seed = _seed(args, run)

    cutoff = bandwidth_cutoff(intensity, angle, params)
    if not cutoff > 0:
        raise ConfigError("pump intensity yields zero bandwidth")
    freqs = np.logspace(math.log10(f_lo), math.log10(f_hi), points)
    response = np.asarray(sensor_response(freqs, cutoff))
    if rel_noise > 0:
        rng = np.random.default_rng(seed)
        response = response * (1.0 + rel_noise * rng.standard_normal(points))
    fit = fit_lowpass(freqs, response)
    out = _out_dir(args, run)
    with open(out / "bandwidth.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frequency_hz,response\n")
        for f, r in zip(freqs, response):
            fh.write(f"{f!r},{r!r}\n")
    _write_report(out / "bandwidth.txt", {
        "pump_intensity_w_per_mm2": intensity, "misalignment_deg": angle,
        "model_cutoff_hz": cutoff, "fitted_cutoff_hz": fit.cutoff,
        "fitted_cutoff_uncertainty_hz": fit.cutoff_uncertainty,
        "fitted_amplitude": fit.amplitude, "unbounded": fit.unbounded})
    if run:
        _manifest(out, "bandwidth", run, seed, {}, ["bandwidth.csv", "bandwidth.txt"])
    print(f"bandwidth: model cutoff {cutoff:.6g} Hz, fitted {fit.cutoff:.6g} Hz"
          + (" (unbounded)" if fit.unbounded else ""))
    return EXIT_OK


SENSITIVITY_DEFAULTS = {
    "radius": 1e-3, "thickness": 0.1e-3, "standoff": 0.5e-3,
    "b_primary": 91e-6, "frequency": 3.5e6, "noise_floor": 10e-6,
}


def cmd_sensitivity(args) -> int:
    run = RunConfig.load(args.config) if args.config else None
    sec = run.section("sensitivity") if run else None
    units = {"radius": "m", "thickness": "m", "standoff": "m", "b_primary": "T",
             "frequency": "Hz", "noise_floor": "T/sqrt(Hz)"}
    v = {k: (sec.quantity(k, units[k], d) if sec else d)
         for k, d in SENSITIVITY_DEFAULTS.items()}
    sigma_min = min_detectable_conductivity(
        v["radius"], v["thickness"], v["standoff"],
        CoilDrive(v["b_primary"], v["frequency"]), v["noise_floor"])
    print(f"sigma_min = {sigma_min:.6g} S/m/sqrt(Hz)")
    if args.out is not None:
        out = _out_dir(args, run)
        _write_report(out / "sensitivity.txt", {**v, "sigma_min_s_per_m_sqrt_hz": sigma_min})
    return EXIT_OK


def cmd_skin_depth(args) -> int:
    sigmas, freqs = args.sigma, args.frequency
    if len(sigmas) != len(freqs) and 1 not in (len(sigmas), len(freqs)):
        raise ConfigError("--sigma and --frequency need equal lengths (or one value)")
    n = max(len(sigmas), len(freqs))
    sigmas = sigmas * n if len(sigmas) == 1 else sigmas
    freqs = freqs * n if len(freqs) == 1 else freqs
    print("sigma_S_per_m,frequency_Hz,skin_depth_m")
    for s, f in zip(sigmas, freqs):
        print(f"{s!r},{f!r},{skin_depth(s, f)!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="random seed (unsigned 64-bit)")
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    common.add_argument("--mode", choices=("analytic", "timedomain"),
                        help="detection model for scans")

    parser = argparse.ArgumentParser(
        prog="nveddy", description="NV-diamond eddy-current imaging simulator")
    parser.add_argument("--version", action="version", version=f"nveddy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", parents=[common], help="simulate a raster scan")
    p.set_defaults(func=cmd_scan, needs_config=True)
    p = sub.add_parser("resolution", parents=[common],
                       help="average cross-section and rect x Gaussian kernel fit")
    p.add_argument("--image", help="exported R.csv to analyse instead of scanning")
    p.set_defaults(func=cmd_resolution, needs_config=True)
    p = sub.add_parser("bandwidth", parents=[common], help="frequency sweep and low-pass fit")
    p.set_defaults(func=cmd_bandwidth, needs_config=False)
    p = sub.add_parser("sensitivity", parents=[common],
                       help="minimum detectable conductivity")
    p.set_defaults(func=cmd_sensitivity, needs_config=False)
    p = sub.add_parser("skin-depth", parents=[common], help="print skin depths")
    p.add_argument("--sigma", type=float, nargs="+", required=True, help="S/m")
    p.add_argument("--frequency", type=float, nargs="+", required=True, help="Hz")
    p.set_defaults(func=cmd_skin_depth, needs_config=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        parser.error("--seed must be an unsigned 64-bit integer")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.needs_config and not args.config:
        parser.error(f"{args.command} requires --config")
    try:
        return args.func(args)
    except (ConfigError, FormatError, FileNotFoundError) as exc:
        print(f"nveddy {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NVEddyError, OSError, ValueError) as exc:
        print(f"nveddy {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
