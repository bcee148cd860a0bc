import pytest

from nveddy.config import RunConfig, load_magnetometer_params, parse_quantity
from nveddy.errors import ConfigError


@pytest.mark.parametrize("text,unit,value", [("3.5e6 Hz", "Hz", 3.5e6), ("600 W/mm^2", "W/mm^2", 600),
                                             ("0.5", "", 0.5), ("  -2 deg ", "deg", -2)])
def test_parse_quantity(text, unit, value):
    assert parse_quantity(text, unit) == value


@pytest.mark.parametrize("text,unit", [("3.5 MHz", "Hz"), ("3.5", "Hz"), ("1 m", ""),
                                       ("abc T", "T"), ("", "T")])
def test_parse_quantity_rejects(text, unit):
    with pytest.raises(ConfigError):
        parse_quantity(text, unit)


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_section_accessors(tmp_path):
    run = RunConfig.load(write(tmp_path, "[a]\nx = 2 m\nn = 3\nflag = yes\npath = sub/f.pgm\n"))
    sec = run.section("a")
    assert sec.quantity("x", "m") == 2.0
    assert sec.integer("n") == 3
    assert sec.flag("flag") is True
    assert sec.flag("absent", False) is False
    assert sec.quantity("absent", "m", 7.0) == 7.0
    assert sec.path("path") == tmp_path / "sub" / "f.pgm"
    assert "x" in sec and "y" not in sec
    assert not run.has_section("b")


def test_section_errors(tmp_path):
    sec = RunConfig.load(write(tmp_path, "[a]\nn = 2.5\nflag = maybe\n")).section("a")
    with pytest.raises(ConfigError, match="missing key"):
        sec.quantity("x", "m")
    with pytest.raises(ConfigError, match="integer"):
        sec.integer("n")
    with pytest.raises(ConfigError, match="boolean"):
        sec.flag("flag")


def test_malformed_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(write(tmp_path, "no section header\n"))


def test_missing_magnetometer_file(tmp_path):
    with pytest.raises(ConfigError, match="magnetometer"):
        RunConfig.load(write(tmp_path, "[magnetometer]\nfile = nothere.cfg\n"))


def test_custom_magnetometer_file(tmp_path):
    write(tmp_path, "[sensor]\nmisalignment_angle = 2 deg\n", "mag.cfg")
    run = RunConfig.load(write(tmp_path, "[magnetometer]\nfile = mag.cfg\n"))
    params = load_magnetometer_params(run.magnetometer_file)
    assert params.misalignment_angle == 2.0
    assert len(params.features) == 3


def test_invalid_magnetometer_values(tmp_path):
    with pytest.raises(ConfigError):
        load_magnetometer_params(write(tmp_path, "[sensor]\nnoise_floor = 0 T/sqrt(Hz)\n"))
