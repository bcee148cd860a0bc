"""Simulation and analysis of eddy-current imaging with an all-optical NV-diamond
magnetometer: forward fields, sensor model, lock-in detection, raster scans and
resolution/bandwidth/sensitivity analyses."""

__version__ = "0.1.0"

from .emforward import (CoilDrive, ComplexField, SampleDisc, induced_e_field,
                        secondary_field_offaxis, secondary_field_on_axis, skin_depth)
from .magnetometer import (MagnetometerParams, OperatingPoint, bandwidth_cutoff,
                           lockin_r_vs_bias, pl_vs_field, select_operating_point,
                           sensor_response)
from .lockin import LockInReading, TimeSeries, demodulate, synthesize_detector_signal
from .scan import ConductivityMap, ScanConfig, ScanImage, scan
from .patterns import export_image, ingest_pattern, read_image_csv
from .analysis import (CrossSection, KernelFit, LowpassFit, average_cross_section,
                       fit_lowpass, fit_square_gauss_kernel, min_detectable_conductivity)
from .config import load_magnetometer_params

__all__ = [
    "CoilDrive", "ComplexField", "SampleDisc", "induced_e_field",
    "secondary_field_offaxis", "secondary_field_on_axis", "skin_depth",
    "MagnetometerParams", "OperatingPoint", "bandwidth_cutoff", "lockin_r_vs_bias",
    "pl_vs_field", "select_operating_point", "sensor_response",
    "LockInReading", "TimeSeries", "demodulate", "synthesize_detector_signal",
    "ConductivityMap", "ScanConfig", "ScanImage", "scan",
    "export_image", "ingest_pattern", "read_image_csv",
    "CrossSection", "KernelFit", "LowpassFit", "average_cross_section", "fit_lowpass",
    "fit_square_gauss_kernel", "min_detectable_conductivity", "load_magnetometer_params",
]
