import numpy as np
import pytest

from nveddy.errors import DomainError, FormatError
from nveddy.patterns import (bundled_assets, count_components, data_path, dot_grid_pattern,
                             export_image, ingest_pattern, read_csv_grid, read_image_csv,
                             read_pgm, wheel_pattern, write_mask_pgm, write_pgm)
from nveddy.analysis import peak_positions
from nveddy.scan import ScanImage, scan

GEOM = dict(pitch=50e-6, thickness=35e-6, standoff=0.5e-3)


def write_ascii_pgm(path, pixels, maxval=255):
    h, w = pixels.shape
    body = "\n".join(" ".join(str(v) for v in row) for row in pixels)
    path.write_text(f"P2\n# comment\n{w} {h}\n{maxval}\n{body}\n")


def test_all_white_and_all_black(tmp_path):
    white, black = tmp_path / "w.pgm", tmp_path / "b.pgm"
    write_pgm(white, np.full((4, 6), 255), 255)
    write_pgm(black, np.zeros((4, 6)), 255)
    assert np.all(ingest_pattern(white, 2.0, **GEOM).sigma == 2.0)
    assert np.all(ingest_pattern(black, 2.0, **GEOM).sigma == 0.0)


def test_ascii_and_binary_pgm_agree(tmp_path):
    rng = np.random.default_rng(0)
    pix = rng.integers(0, 256, (7, 9))
    write_ascii_pgm(tmp_path / "a.pgm", pix)
    write_pgm(tmp_path / "b.pgm", pix, 255)
    a, _ = read_pgm(tmp_path / "a.pgm")
    b, _ = read_pgm(tmp_path / "b.pgm")
    assert np.array_equal(a, pix) and np.array_equal(b, pix)


def test_sixteen_bit_pgm(tmp_path):
    pix = np.array([[0, 1000, 65535], [40000, 2, 3]])
    write_pgm(tmp_path / "x.pgm", pix, 65535)
    back, maxval = read_pgm(tmp_path / "x.pgm")
    assert maxval == 65535 and np.array_equal(back, pix)


def test_threshold_is_strict(tmp_path):
    pix = np.array([[0, 127, 128, 255]])
    write_pgm(tmp_path / "t.pgm", pix, 255)
    cmap = ingest_pattern(tmp_path / "t.pgm", 1.0, threshold=127 / 255, **GEOM)
    assert cmap.sigma.tolist() == [[0.0, 0.0, 1.0, 1.0]]


def test_grayscale_mode():
    cmap = ingest_pattern(np.array([[0.0, 0.25, 1.0]]), 4.0, grayscale=True, **GEOM)
    assert cmap.sigma.tolist() == [[0.0, 1.0, 4.0]]


def test_csv_pattern(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("0,1,0\n1,1,1\n")
    assert ingest_pattern(p, 3.0, **GEOM).sigma.sum() == 12.0


@pytest.mark.parametrize("content,name", [
    (b"P6\n2 2\n255\n" + bytes(12), "color.pgm"),
    (b"P5\n4 4\n255\n" + bytes(3), "short.pgm"),
    (b"P5\n", "header.pgm"),
    (b"0,1\n1\n", "ragged.csv"),
    (b"0,x\n", "text.csv"),
    (b"", "empty.csv"),
    (b"abc", "pattern.png"),
])
def test_format_errors(tmp_path, content, name):
    p = tmp_path / name
    p.write_bytes(content)
    with pytest.raises(FormatError):
        ingest_pattern(p, 1.0, **GEOM)


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        ingest_pattern(tmp_path / "nope.pgm", 1.0, **GEOM)


def test_bad_threshold():
    with pytest.raises(DomainError):
        ingest_pattern(np.zeros((2, 2)), 1.0, threshold=1.5, **GEOM)


def test_dot_grid_has_fifteen_components():
    mask, centers = dot_grid_pattern()
    assert count_components(mask) == 15
    assert len(centers) == 15


def test_wheel_is_one_component():
    assert count_components(wheel_pattern()) == 1


def test_bundled_assets_match_generators():
    for name, mask in bundled_assets().items():
        pix, _ = read_pgm(data_path(name))
        assert np.array_equal(pix > 127, mask), name


def make_image(seed=0, shape=(6, 9)):
    rng = np.random.default_rng(seed)
    return ScanImage(rng.random(shape) * 1e-7, rng.uniform(-3, 3, shape), 1.25e-3, -0.5e-3,
                     50e-6)


def test_csv_round_trip_bit_identical(tmp_path):
    img = make_image()
    export_image(img, tmp_path / "R.csv", "csv", "r")
    export_image(img, tmp_path / "T.csv", "csv", "theta")
    back = read_image_csv(tmp_path / "R.csv", tmp_path / "T.csv")
    assert np.array_equal(back.r, img.r) and np.array_equal(back.theta, img.theta)
    assert (back.x0, back.y0, back.step) == (img.x0, img.y0, img.step)
    _, meta = read_csv_grid(tmp_path / "R.csv")
    assert meta["rows"] == "6" and meta["cols"] == "9"


def test_zero_image_exports(tmp_path):
    img = ScanImage(np.zeros((3, 3)), np.zeros((3, 3)), 0.0, 0.0, 1e-4)
    export_image(img, tmp_path / "z.csv")
    export_image(img, tmp_path / "z.pgm", "pgm")
    assert np.all(read_csv_grid(tmp_path / "z.csv")[0] == 0)
    assert np.all(read_pgm(tmp_path / "z.pgm")[0] == 0)


def test_pgm_export_with_sidecar(tmp_path):
    img = make_image()
    export_image(img, tmp_path / "R.pgm", "pgm")
    pix, maxval = read_pgm(tmp_path / "R.pgm")
    meta = dict(line.split("=", 1) for line in
                (tmp_path / "R.pgm.scale.txt").read_text().splitlines())
    lo, hi = float(meta["min"]), float(meta["max"])
    restored = lo + pix / maxval * (hi - lo)
    assert np.max(np.abs(restored - img.r)) <= (hi - lo) / maxval


def test_export_rejects_unknown(tmp_path):
    with pytest.raises(DomainError):
        export_image(make_image(), tmp_path / "x", "tiff")
    with pytest.raises(DomainError):
        export_image(make_image(), tmp_path / "x", "csv", "phase")


def test_fifteen_peaks_in_exported_pgm(tmp_path, dot_map, dot_config):
    cmap, _ = dot_map
    img = scan(cmap, dot_config)
    export_image(img, tmp_path / "R.pgm", "pgm")
    pix, _ = read_pgm(tmp_path / "R.pgm")
    reread = ScanImage(pix.astype(float), np.zeros(pix.shape), img.x0, img.y0, img.step)
    assert len(peak_positions(reread, 0.5e-3)) == 15
