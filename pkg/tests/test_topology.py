import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ffcontour.bezier import eval_many
from ffcontour.freeform import FreeFormContour, make_circle_contour, signed_area
from ffcontour.topology import (
    IntersectionCandidate,
    TopologyError,
    box_inter,
    crossing_params,
    curves_cross,
    find_candidates,
    flip,
    intersecting_pairs,
    polygons_intersect,
    resolve_topology,
)

from oracles import (
    box_filter_oracle,
    boxes_overlap_2d,
    parametric_contour_points,
    polylines_cross,
    sampled_curves_cross,
)


def figure_eight(n=16, d=3, scale=100.0, c=(200.0, 200.0)):
    fn = lambda u: (c[0] + scale * math.sin(2 * math.pi * u), c[1] + 0.6 * scale * math.sin(4 * math.pi * u))
    return FreeFormContour(parametric_contour_points(fn, n, d), d)


def random_contour(rng, n=20, d=3, noise=30.0):
    t = np.linspace(0, 2 * np.pi, n * d, endpoint=False)
    r = 150 + rng.normal(0, noise, t.size)
    return FreeFormContour(np.stack([300 + r * np.cos(t), 300 + r * np.sin(t)], 1), d)


def brute_force_pairs(contour):
    ctrl = contour.controls()
    n = contour.n_patches
    return {
        (i, j)
        for i in range(n)
        for j in range(i + 2, n)
        if not (i == 0 and j == n - 1) and polylines_cross(ctrl[i], ctrl[j])
    }


# --- box filter ------------------------------------------------------------------------

def test_box_inter_examples():
    b = [0.0, 0.0, 1.0, 1.0]
    assert box_inter(b, b)
    assert not box_inter(b, [2.0, 0.0, 3.0, 1.0])
    assert not box_inter([2.0, 0.0, 3.0, 1.0], b)
    assert box_inter(b, [1.0, 1.0, 2.0, 2.0])  # shared corner
    assert not box_inter(b, [1.0, 1.5, 2.0, 2.0])  # touching edge lines, y apart
    assert box_inter(b, [0.5, 5.0, 2.0, 6.0])  # x overlap alone passes the filter


box = st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6)).map(
    lambda v: [float(min(v[0], v[2])), float(min(v[1], v[3])), float(max(v[0], v[2])), float(max(v[1], v[3]))]
)


@given(box, box)
def test_box_inter_matches_interval_oracle(b1, b2):
    assert box_inter(b1, b2) == box_filter_oracle(b1, b2)
    assert box_inter(b1, b2) == box_inter(b2, b1)
    if boxes_overlap_2d(b1, b2):
        assert box_inter(b1, b2)


# --- polygon test ----------------------------------------------------------------------

def test_polygon_examples():
    x1 = np.array([[0.0, 0.0], [2.0, 2.0]])
    x2 = np.array([[0.0, 2.0], [2.0, 0.0]])
    assert polygons_intersect(x1, x2)
    a = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0], [3.0, 1.0]])
    assert not polygons_intersect(a, a + [0.0, 0.2])  # boxes overlap, polygons do not
    assert box_inter([0, 0, 3, 1], [0, 0.2, 3, 1.2])
    touch = np.array([[1.0, 1.0], [2.0, 3.0]])
    assert not polygons_intersect(x1, touch)  # shared endpoint is not a proper crossing


def test_degenerate_chords_fall_back():
    loop = np.array([[0.0, 0.0], [2.0, 2.0], [0.0, 2.0], [0.0, 0.0]])  # closed polygon, zero chord
    bar = np.array([[-1.0, 1.0], [3.0, 1.0]])
    assert polygons_intersect(loop, bar) == polylines_cross(loop, bar)
    assert polygons_intersect(loop, loop[::-1] + [0.5, 0.0]) == polylines_cross(loop, loop[::-1] + [0.5, 0.0])


patch_pair = st.integers(1, 5).flatmap(
    lambda d: st.tuples(
        arrays(np.float64, (d + 1, 2), elements=st.integers(-8, 8).map(float)),
        arrays(np.float64, (d + 1, 2), elements=st.integers(-8, 8).map(float)),
    )
)


@given(patch_pair)
def test_polygon_test_matches_brute_force(pair):
    a, b = pair
    res = polygons_intersect(a, b)
    assert res == polylines_cross(a, b)
    if res:
        ba = [*a.min(0), *a.max(0)]
        bb = [*b.min(0), *b.max(0)]
        assert box_inter(ba, bb)


def test_curve_crossings_imply_box_overlap(rng):
    hits = 0
    for _ in range(1000):
        a, b = rng.normal(size=(4, 2)) * 10, rng.normal(size=(4, 2)) * 10
        pa = eval_many(a[None], np.linspace(0, 1, 200))[0]
        pb = eval_many(b[None], np.linspace(0, 1, 200))[0]
        if sampled_curves_cross(pa, pb):
            hits += 1
            assert box_inter([*a.min(0), *a.max(0)], [*b.min(0), *b.max(0)])
    assert hits > 50


# --- crossing confirmation ---------------------------------------------------------------

def test_crossing_params_locates_crossing():
    a = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
    b = np.array([[2.2, -1.0], [2.2, -1.0 + 1.7 / 3], [2.2, -1.0 + 3.4 / 3], [2.2, 0.7]])
    s, t = crossing_params(a, b, 4)
    assert s == pytest.approx(2.2 / 3, abs=1 / 32) and t == pytest.approx(1 / 1.7, abs=1 / 32)
    assert crossing_params(a, b, 0) is not None
    with pytest.raises(ValueError):
        crossing_params(a, b, -1)


def test_confirmation_rejects_polygon_only_crossing():
    # strongly bent patches whose control polygons cross while the curves stay apart
    a = np.array([[0.0, 0.0], [10.0, 40.0], [20.0, 40.0], [30.0, 0.0]])
    b = np.array([[0.0, 38.5], [10.0, 28.5], [20.0, 28.5], [30.0, 38.5]])
    ca = eval_many(a[None], np.linspace(0, 1, 400))[0]
    cb = eval_many(b[None], np.linspace(0, 1, 400))[0]
    assert polygons_intersect(a, b)
    assert not sampled_curves_cross(ca, cb)
    assert not curves_cross(a, b, 6)
    assert intersecting_pairs_for(a, b, 0) and not intersecting_pairs_for(a, b, 3)


def intersecting_pairs_for(a, b, depth):
    # embed the two patches in a closed contour so the detection pipeline sees them
    d = 3
    link1 = np.array([a[-1], a[-1] + [10, -20], b[0] + [-10, 40], b[0]])
    pts = np.vstack([a[:d], link1[:d], b[::-1][:d], np.array([b[0], b[0] + [-5, -30], a[0] + [-5, -10]])])
    return intersecting_pairs(FreeFormContour(pts, d), depth)


# --- candidates -----------------------------------------------------------------------

def test_circle_has_no_candidates():
    c = make_circle_contour((100.0, 100.0), 80.0, 8)
    assert find_candidates(c) == []
    assert intersecting_pairs(c) == []


def test_candidates_superset_of_crossings(rng):
    for _ in range(15):
        c = random_contour(rng, n=int(rng.integers(6, 40)), noise=60.0)
        cands = {(x.patch_i, x.patch_j) for x in find_candidates(c)}
        truth = brute_force_pairs(c)
        assert truth <= cands
        assert {(x.patch_i, x.patch_j) for x in intersecting_pairs(c)} == truth
        for i, j in cands:
            assert 2 <= j - i <= c.n_patches - 2


def test_pinched_contour_candidate():
    c = figure_eight()
    truth = brute_force_pairs(c)
    assert truth
    assert truth <= {(x.patch_i, x.patch_j) for x in find_candidates(c)}


def test_candidate_validation():
    with pytest.raises(ValueError):
        IntersectionCandidate(3, 3)


# --- flip -------------------------------------------------------------------------------

def _multiset(ctrls):
    return Counter(tuple(p) for c in ctrls for p in c.tolist())


def test_figure_eight_splits_in_two():
    c = figure_eight()
    cand = intersecting_pairs(c)[0]
    parts = flip(c, cand)
    assert len(parts) == 2
    assert sum(p.n_patches for p in parts.all()) == c.n_patches
    for p in parts.all():
        assert p.max_endpoint_gap() < 1e-9
        assert p.index_is_sorted()
    assert abs(signed_area(parts.outer)) >= abs(signed_area(parts.inner[0]))
    # the reorder flip only permutes control points
    before = c.controls()
    new_i = parts.outer.controls()[0]
    new_j = parts.inner[0].controls()[0]
    i, j = cand.patch_i, cand.patch_j
    old = [before[m] for m in range(len(before)) if m not in (i, j)] + [before[i], before[j]]
    new = [q for p in parts.all() for q in p.controls()]
    assert _multiset(old) == _multiset(new)
    assert not polygons_intersect(new_i, new_j)


def test_flip_rejects_neighbours():
    c = figure_eight()
    with pytest.raises(ValueError):
        flip(c, IntersectionCandidate(2, 3))
    with pytest.raises(ValueError):
        flip(c, IntersectionCandidate(0, c.n_patches - 1))


def test_resampled_flip_passes_through_crossing():
    c = figure_eight(n=16)
    cand = intersecting_pairs(c, confirm_depth=3)[0]
    ctrl = c.controls()
    at = crossing_params(ctrl[cand.patch_i], ctrl[cand.patch_j], 3)
    parts = flip(c, cand, at)
    assert sum(p.n_patches for p in parts.all()) == c.n_patches
    for p in parts.all():
        assert p.max_endpoint_gap() < 1e-9
    # both lobes of the eight survive with opposite orientation
    areas = sorted(signed_area(p) for p in parts.all())
    assert areas[0] < 0 < areas[1]


def test_resolve_clean_contour_is_unchanged():
    c = make_circle_contour((100.0, 100.0), 50.0, 12)
    cs = resolve_topology(c)
    assert len(cs) == 1 and cs.outer is c


@pytest.mark.parametrize("confirm,resample", [(0, False), (3, True)])
def test_resolve_random_contours_leaves_no_crossings(confirm, resample):
    rng = np.random.default_rng(7)
    for _ in range(25):
        c = random_contour(rng, n=int(rng.integers(8, 40)), noise=70.0)
        cs = resolve_topology(c, confirm_depth=confirm, resample=resample)
        assert sum(p.n_patches for p in cs.all()) == c.n_patches
        areas = [abs(signed_area(p)) for p in cs.all()]
        assert areas[0] == max(areas)
        for p in cs.all():
            assert p.max_endpoint_gap() < 1e-9
            assert intersecting_pairs(p, confirm) == []
            if confirm == 0:
                assert brute_force_pairs(p) == set()


def test_resolve_two_loops_around_holes():
    # a contour that wraps around two holes through thin corridors
    fn = lambda u: (
        300 + 200 * math.cos(2 * math.pi * u) * (1 - 0.9 * math.cos(4 * math.pi * u) ** 8),
        300 + 120 * math.sin(2 * math.pi * u),
    )
    c = FreeFormContour(parametric_contour_points(fn, 40), 3)
    cs = resolve_topology(c)
    assert len(cs) >= 1
    eight = figure_eight(n=24)
    assert len(resolve_topology(eight)) == 2


def test_flip_cap_raises():
    with pytest.raises(TopologyError):
        resolve_topology(figure_eight(), max_flips=0)
