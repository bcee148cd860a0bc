"""
Key-value configuration files with unit-checked physical quantities.

Files use INI-style ``[section]`` headers and ``key = value unit`` lines,
e.g. ``frequency = 3.5e6 Hz``.  Quantities must carry exactly the SI unit the
key expects; a wrong or missing unit is a :class:`ConfigError`.  Relative
file paths are resolved against the directory of the config file.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .magnetometer import Feature, MagnetometerParams
from .patterns import data_path

DEFAULT_MAGNETOMETER_FILE = "magnetometer.cfg"

_SENSOR_KEYS = {
    "misalignment_angle": "deg",
    "pump_intensity": "W/mm^2",
    "saturation_intensity": "W/mm^2",
    "modulation_amplitude": "T",
    "modulation_frequency": "Hz",
    "noise_floor": "T/sqrt(Hz)",
    "bandwidth_reference": "Hz",
    "bandwidth_reference_angle": "deg",
    "bandwidth_angle_slope": "1/deg",
}

_FEATURE_KEYS = {
    "center": "T",
    "width": "T",
    "depth": "",
    "depth_per_degree": "1/deg",
}


def parse_quantity(text: str, unit: str, key: str = "value") -> float:
    """Parse ``"<number> <unit>"`` and check the unit.

    ``unit=""`` means dimensionless (no suffix allowed).
    """
    parts = text.split(None, 1)
    if not parts:
        raise ConfigError(f"{key}: empty value")
    try:
        number = float(parts[0])
    except ValueError:
        raise ConfigError(f"{key}: {parts[0]!r} is not a number") from None
    given = parts[1].strip() if len(parts) > 1 else ""
    if given != unit:
        expected = f"unit {unit!r}" if unit else "no unit"
        raise ConfigError(f"{key}: expected {expected}, got {given!r}")
    return number


def _read(path) -> configparser.ConfigParser:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{path}: config file not found")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";",),
                                       interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parser


class Section:
    """Typed accessors over one config section."""

    def __init__(self, parser, name, source):
        self.name = name
        self.source = source
        self._data = parser[name] if parser.has_section(name) else {}

    def __contains__(self, key):
        return key in self._data

    def _raw(self, key):
        if key not in self._data:
            raise ConfigError(f"{self.source}: [{self.name}] missing key {key!r}")
        return self._data[key]

    def quantity(self, key, unit, default=None):
        """Unit-checked number; ``default=None`` makes the key required."""
        if key not in self._data and default is not None:
            return default
        return parse_quantity(self._raw(key), unit, f"{self.source}: [{self.name}] {key}")

    def number(self, key, default=None):
        return self.quantity(key, "", default)

    def integer(self, key, default=None):
        value = self.number(key, default)
        if value != int(value):
            raise ConfigError(f"{self.source}: [{self.name}] {key} must be an integer")
        return int(value)

    def flag(self, key, default=False):
        if key not in self._data:
            return default
        raw = self._data[key]
        value = raw.strip().lower()
        if value in ("1", "true", "yes", "on"):
            return True
        if value in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{self.source}: [{self.name}] {key}: not a boolean: {raw!r}")

    def text(self, key, default=None):
        if key not in self._data and default is not None:
            return default
        return self._raw(key).strip()

    def path(self, key, default=None):
        raw = self.text(key, default)
        if raw is None:
            return None
        p = Path(raw)
        if not p.is_absolute():
            p = Path(self.source).parent / p
        return p




def load_magnetometer_params(path=None) -> MagnetometerParams:
    """Read a magnetometer parameter file (bundled defaults when ``path`` is None)."""
    path = Path(path) if path is not None else data_path(DEFAULT_MAGNETOMETER_FILE)
    parser = _read(path)
    sensor = Section(parser, "sensor", path)
    kwargs = {k: sensor.quantity(k, u) for k, u in _SENSOR_KEYS.items() if k in sensor}
    features = []
    for name in parser.sections():
        if not name.startswith("feature."):
            continue
        sec = Section(parser, name, path)
        values = {k: sec.quantity(k, u, 0.0 if k == "depth_per_degree" else None)
                  for k, u in _FEATURE_KEYS.items()}
        features.append(Feature(name.split(".", 1)[1], **values))
    if features:
        kwargs["features"] = tuple(features)
    try:
        return MagnetometerParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def format_magnetometer_params(params: MagnetometerParams) -> str:
    """Serialize parameters in the file format read by :func:`load_magnetometer_params`."""
    lines = ["[sensor]"]
    for key, unit in _SENSOR_KEYS.items():
        lines.append(f"{key} = {getattr(params, key)!r} {unit}".rstrip())
    for f in params.features:
        lines.append("")
        lines.append(f"[feature.{f.name}]")
        for key, unit in _FEATURE_KEYS.items():
            lines.append(f"{key} = {getattr(f, key)!r} {unit}".rstrip())
    return "\n".join(lines) + "\n"


@dataclass
class RunConfig:
    """Parsed run configuration; see the bundled ``*.cfg`` files for the layout."""

    source: Path
    parser: configparser.ConfigParser = field(repr=False)
    magnetometer_file: Optional[Path] = None

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        parser = _read(path)
        cfg = cls(path, parser)
        sec = cfg.section("magnetometer")
        if sec.text("file", ""):
            mag = sec.path("file")
            if not mag.is_file():
                raise ConfigError(f"{mag}: magnetometer parameter file not found")
            cfg.magnetometer_file = mag
        return cfg

    def section(self, name: str) -> Section:
        return Section(self.parser, name, self.source)

    def has_section(self, name: str) -> bool:
        return self.parser.has_section(name)
