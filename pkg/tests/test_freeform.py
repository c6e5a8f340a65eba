import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from skimage.draw import polygon2mask

from ffcontour.bezier import build_interpolation_map, eval_many
from ffcontour.freeform import (
    ContourError,
    FreeFormContour,
    contour_polygon,
    global_parameter_eval,
    make_circle_contour,
    orient_ccw,
    rasterize_region,
    sample_contour,
    signed_area,
)
from ffcontour.refine import split_pass

from oracles import bezier_float


def wobbly_contour(rng, n=12, d=3, r=80.0, c=(120.0, 110.0)):
    t = np.linspace(0, 2 * np.pi, n * d, endpoint=False)
    rad = r * (1 + 0.2 * rng.uniform(-1, 1, t.size))
    return FreeFormContour(np.stack([c[0] + rad * np.cos(t), c[1] + rad * np.sin(t)], 1), d)


circles = st.builds(
    make_circle_contour,
    st.tuples(st.floats(-500, 500), st.floats(-500, 500)),
    st.floats(5, 400),
    st.integers(3, 40),
    st.integers(1, 5),
)


# --- construction -------------------------------------------------------------------

def test_circle_endpoints_and_midpoints():
    c = make_circle_contour((0.0, 0.0), 100.0, 8, 3)
    ends = c.controls()[:, 0]
    assert np.allclose(np.hypot(ends[:, 0], ends[:, 1]), 100.0, atol=1e-9)
    mids = eval_many(c.controls(), np.linspace(0, 1, 21)).reshape(-1, 2)
    assert np.all(np.abs(np.hypot(mids[:, 0], mids[:, 1]) - 100.0) <= 0.005 * 100.0)
    assert c.max_endpoint_gap() < 1e-9


def test_circle_rejects_bad_arguments():
    with pytest.raises(ValueError):
        make_circle_contour((0, 0), 10, 2)
    with pytest.raises(ValueError):
        make_circle_contour((0, 0), 0.0, 8)


def test_bad_point_arrays_rejected():
    with pytest.raises(ValueError):
        FreeFormContour(np.zeros((7, 2)), 3)
    with pytest.raises(ValueError):
        FreeFormContour(np.full((6, 2), np.nan), 3)


@given(circles)
def test_continuity_and_index_after_construction(c):
    assert c.max_endpoint_gap() < 1e-9
    assert c.index_is_sorted()


def test_boxes_bound_control_points(rng):
    c = wobbly_contour(rng)
    ctrl = c.controls()
    b = c.boxes()
    assert np.array_equal(b[:, :2], ctrl.min(axis=1))
    assert np.array_equal(b[:, 2:], ctrl.max(axis=1))
    assert np.all(b[:, 0] <= b[:, 2]) and np.all(b[:, 1] <= b[:, 3])


def test_index_repair_after_moving_points(rng):
    c = wobbly_contour(rng, n=30)
    c.points += rng.normal(0, 3.0, c.points.shape)
    c.repair_index()
    assert c.index_is_sorted()
    order = sorted(range(c.n_patches), key=lambda j: (*c.boxes()[j], j))
    assert c.sorted_index.tolist() == order


# --- parameterization and sampling --------------------------------------------------

def test_global_parameter_boundaries(rng):
    c = wobbly_contour(rng, n=7)
    assert np.allclose(global_parameter_eval(c, 0.0), c.points[0])
    assert np.allclose(global_parameter_eval(c, 1.0), c.points[0], atol=1e-9)
    for i in range(7):
        assert np.allclose(global_parameter_eval(c, i / 7), c.controls()[i, 0], atol=1e-9)
    local = global_parameter_eval(c, (2 + 0.3) / 7)
    assert np.allclose(local, bezier_float(c.controls()[2], 0.3), atol=1e-9)


def test_global_parameter_continuity(rng):
    c = wobbly_contour(rng, n=9)
    lengths = np.linalg.norm(np.diff(sample_contour(c, 65).reshape(9, -1, 2), axis=1), axis=2).sum(1)
    eps = 1e-6
    for i in range(1, 9):
        t = i / 9
        gap = np.linalg.norm(global_parameter_eval(c, t - eps) - global_parameter_eval(c, t + eps))
        assert gap < 1e-3 * lengths.min()


def test_sample_contour_counts_and_endpoints():
    c = make_circle_contour((50.0, 50.0), 30.0, 8, 3)
    pts = sample_contour(c, 5)
    assert pts.shape == (8 * 4, 2)
    assert np.allclose(pts[::4], c.controls()[:, 0])
    assert np.all(np.abs(np.hypot(pts[:, 0] - 50, pts[:, 1] - 50) - 30) < 0.005 * 30)
    with pytest.raises(ValueError):
        sample_contour(c, 1)


# --- area and orientation -----------------------------------------------------------

def test_signed_area_orientation():
    c = make_circle_contour((0.0, 0.0), 50.0, 8, 3)
    a = signed_area(c)
    assert a > 0
    assert a == pytest.approx(math.pi * 50**2, rel=0.01)
    assert signed_area(c.reversed()) == pytest.approx(-a, rel=1e-12)
    assert signed_area(orient_ccw(c.reversed())) > 0


@given(circles)
def test_reversal_preserves_closure_and_negates_area(c):
    r = c.reversed()
    assert r.max_endpoint_gap() < 1e-9
    assert signed_area(r) == pytest.approx(-signed_area(c), rel=1e-9, abs=1e-9)


# --- rasterization ------------------------------------------------------------------

@pytest.mark.parametrize("r", [20.0, 35.5, 60.0])
def test_rasterized_circle_area(r):
    c = make_circle_contour((100.3, 90.7), r, 8, 3)
    m = rasterize_region(c, 220, 200)
    assert m.sum() == pytest.approx(math.pi * r * r, rel=0.02)


def test_rasterize_agrees_with_independent_polygon_fill(rng):
    c = wobbly_contour(rng, n=10)
    poly = contour_polygon(c)
    ours = rasterize_region(c, 240, 230)
    ref = polygon2mask((230, 240), poly[:, ::-1])
    perimeter = np.linalg.norm(np.diff(np.vstack([poly, poly[:1]]), axis=0), axis=1).sum()
    assert abs(int(ours.sum()) - int(ref.sum())) <= perimeter
    assert (ours ^ ref).sum() <= perimeter


def test_square_region_within_perimeter():
    d = 1
    a = 37.0
    sq = FreeFormContour(np.array([[10.2, 10.2], [10.2 + a, 10.2], [10.2 + a, 10.2 + a], [10.2, 10.2 + a]]), d)
    m = rasterize_region(sq, 80, 80)
    assert abs(m.sum() - a * a) <= 2 * 4 * a


def test_rasterize_outside_and_annulus():
    out = make_circle_contour((-500.0, -500.0), 30.0, 8)
    assert not rasterize_region(out, 50, 50).any()
    big = make_circle_contour((100.0, 100.0), 80.0, 8)
    small = make_circle_contour((100.0, 100.0), 30.0, 8)
    ring = rasterize_region([big, small], 200, 200)
    assert ring.sum() == pytest.approx(math.pi * (80**2 - 30**2), rel=0.02)
    assert not ring[100, 100]


def test_rasterize_rejects_bad_dimensions():
    c = make_circle_contour((50.0, 50.0), 20.0, 8)
    with pytest.raises(ValueError):
        rasterize_region(c, 0, 10)


def test_flat_layout_is_closed_by_construction(rng):
    # shared endpoints are stored once, so every contour closes exactly
    c = FreeFormContour(rng.normal(size=(15, 2)) * 40, 3)
    assert c.max_endpoint_gap() == 0.0
    assert np.array_equal(c.controls()[-1, -1], c.controls()[0, 0])


# --- serialization ------------------------------------------------------------------

@given(circles)
def test_json_round_trip_is_bit_exact(c):
    doc = json.loads(c.to_json())
    assert set(doc) == {"degree", "patches"}
    back = FreeFormContour.from_json(c.to_json())
    assert np.array_equal(back.points, c.points)
    assert back.degree == c.degree


def test_from_patches_rejects_gaps():
    c = make_circle_contour((0.0, 0.0), 10.0, 4)
    ctrl = c.controls()
    ctrl[1, 0] += 1.0
    with pytest.raises(ContourError):
        FreeFormContour.from_patches(ctrl)


def test_continuity_after_split(rng):
    c = make_circle_contour((200.0, 200.0), 150.0, 6)
    s = split_pass(c, build_interpolation_map(3), 40.0)
    assert s.n_patches > c.n_patches
    assert s.max_endpoint_gap() < 1e-9
    assert s.index_is_sorted()
