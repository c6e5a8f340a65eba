import numpy as np
import pytest

from ffcontour.forces import build_force_field
from ffcontour.freeform import make_circle_contour
from ffcontour.imaging import (
    DecodeError,
    dump_force_field,
    load_gray,
    load_mask,
    read_force_field_dump,
    render_overlay,
    render_svg,
    save_gray,
    save_mask,
)


def test_pgm_round_trip(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 64, 128, 255]))
    img = load_gray(path)
    assert img.shape == (2, 2)
    assert np.allclose(img, np.array([[0, 64], [128, 255]]) / 255.0)
    save_gray(img, tmp_path / "b.pgm")
    assert np.array_equal(load_gray(tmp_path / "b.pgm"), img)


def test_png_white_and_round_trip(tmp_path, rng):
    save_gray(np.ones((5, 7)), tmp_path / "w.png")
    w = load_gray(tmp_path / "w.png")
    assert w.shape == (5, 7) and np.all(w == 1.0)
    img = np.round(rng.random((9, 11)) * 255) / 255
    save_gray(img, tmp_path / "r.png")
    assert np.array_equal(load_gray(tmp_path / "r.png"), img)


def test_malformed_file(tmp_path):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"\x89PNG not really")
    with pytest.raises(DecodeError):
        load_gray(bad)


@pytest.mark.parametrize("fill", ["random", "empty", "full"])
def test_mask_round_trip(tmp_path, rng, fill):
    m = {"random": rng.random((13, 17)) > 0.5, "empty": np.zeros((13, 17), bool),
         "full": np.ones((13, 17), bool)}[fill]
    save_mask(m, tmp_path / "m.png")
    assert np.array_equal(load_mask(tmp_path / "m.png"), m)
    raw = load_gray(tmp_path / "m.png")
    assert set(np.unique(raw)) <= {0.0, 1.0}


def test_svg_one_path_per_patch():
    img = np.zeros((50, 60))
    a = make_circle_contour((30, 25), 10, 8)
    b = make_circle_contour((30, 25), 4, 5)
    svg = render_svg(img, [a, b])
    assert svg.count("<path ") == 13
    assert svg.count("<g ") == 2
    plain = render_svg(img, [])
    assert "<path" not in plain and "<image" in plain


def test_overlay_png(tmp_path):
    img = np.full((50, 60), 0.5)
    svg, rgb = render_overlay(img, [make_circle_contour((30, 25), 10, 8)], png_path=tmp_path / "o.png")
    assert rgb.shape == (50, 60, 3)
    assert np.all(rgb[25, 20] == [255, 0, 0])  # on the circle
    assert np.all(rgb[25, 30] == 128)  # centre untouched
    _, plain = render_overlay(img, [])
    assert np.all(plain == 128)


def test_force_field_dump(tmp_path, rng):
    fld = build_force_field(rng.random((20, 30)))
    path = tmp_path / "f.bin"
    dump_force_field(fld, path)
    fe, fd = read_force_field_dump(path)
    assert fe.shape == (20, 30)
    assert np.allclose(fe, fld.f_edge, rtol=1e-6) and np.allclose(fd, fld.f_diff, rtol=1e-6)
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(DecodeError):
        read_force_field_dump(path)
