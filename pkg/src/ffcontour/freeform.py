"""Closed piecewise-Bezier contours ("free forms").

A contour of ``N`` patches of degree ``d`` is stored as the flat list of its
``N*d`` distinct control points: patch ``j`` owns ``points[j*d : j*d+d+1]``
(indices taken cyclically), so consecutive patches share an endpoint and the
last patch closes onto ``points[0]`` by construction.
"""

from __future__ import annotations

import json
import math
from functools import cmp_to_key
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .bezier import BezierPatch, build_interpolation_map, eval_many
from .instrument import count

RASTER_SAMPLES = 64


class ContourError(RuntimeError):
    """Structural invariant violation (open contour, stale index, ...)."""


class BoundingBox(NamedTuple):
    x_min: float
    y_min: float
    x_max: float
    y_max: float


class FreeFormContour:
    """Closed contour of ``N`` degree-``d`` patches with a sorted box index.

    The contour is a single-owner mutable value: the evolution loop updates
    ``points`` in place and then calls :meth:`repair_index`.
    """

    def __init__(self, points, degree: int, sorted_index=None):
        pts = np.array(points, dtype=np.float64)
        if degree < 1:
            raise ValueError("degree must be >= 1")
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0 or pts.shape[0] % degree:
            raise ValueError(f"need N*{degree} control points of shape (k, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("control points must be finite")
        self.degree = int(degree)
        self.points = pts
        if sorted_index is None:
            self.sorted_index = np.arange(self.n_patches, dtype=np.int64)
            self.rebuild_index()
        else:
            self.sorted_index = np.array(sorted_index, dtype=np.int64)

    # -- structure ---------------------------------------------------------

    @property
    def n_patches(self) -> int:
        return self.points.shape[0] // self.degree

    def __len__(self) -> int:
        return self.n_patches

    def _patch_idx(self) -> np.ndarray:
        n, d = self.n_patches, self.degree
        return (np.arange(n)[:, None] * d + np.arange(d + 1)[None, :]) % (n * d)

    def controls(self) -> np.ndarray:
        """All control polygons stacked as ``(N, d+1, 2)`` (a copy)."""
        return self.points[self._patch_idx()]

    def patch(self, j: int) -> BezierPatch:
        n, d = self.n_patches, self.degree
        idx = (np.arange(d + 1) + (j % n) * d) % (n * d)
        return BezierPatch(self.points[idx])

    def patches(self) -> list[BezierPatch]:
        return [BezierPatch(c) for c in self.controls()]

    def copy(self) -> "FreeFormContour":
        return FreeFormContour(self.points.copy(), self.degree, self.sorted_index.copy())

    def boxes(self) -> np.ndarray:
        """Control-point bounding boxes ``(N, 4)`` as ``[x_min, y_min, x_max, y_max]``."""
        c = self.controls()
        return np.concatenate([c.min(axis=1), c.max(axis=1)], axis=1)

    def box(self, j: int) -> BoundingBox:
        return BoundingBox(*self.boxes()[j])

    def max_endpoint_gap(self) -> float:
        """Largest distance between a patch end and the next patch start."""
        c = self.controls()
        return float(np.abs(c[:, -1] - np.roll(c[:, 0], -1, axis=0)).max())

    # -- lexicographic box index ------------------------------------------

    def rebuild_index(self) -> int:
        """Full lexicographic sort of the patch boxes; returns comparisons made."""
        boxes = self.boxes().tolist()
        ncmp = 0

        def cmp(a, b):
            nonlocal ncmp
            ncmp += 1
            ka, kb = (*boxes[a], a), (*boxes[b], b)
            return (ka > kb) - (ka < kb)

        order = sorted(range(self.n_patches), key=cmp_to_key(cmp))
        self.sorted_index = np.array(order, dtype=np.int64)
        count("sort_comparisons", ncmp)
        return ncmp

    def repair_index(self) -> int:
        """Insertion-sort repair of a nearly sorted index; returns comparisons."""
        if self.sorted_index.shape[0] != self.n_patches:
            raise ContourError("sorted index length differs from patch count")
        order = np.ascontiguousarray(self.sorted_index, dtype=np.int64)
        ncmp = kernels.insertion_repair(np.ascontiguousarray(self.boxes()), order)
        self.sorted_index = order
        count("repair_comparisons", ncmp)
        return ncmp

    def index_is_sorted(self) -> bool:
        idx = self.sorted_index
        n = self.n_patches
        if idx.shape[0] != n or not np.array_equal(np.sort(idx), np.arange(n)):
            return False
        boxes = self.boxes().tolist()
        keys = [(*boxes[j], j) for j in idx.tolist()]
        return all(a < b for a, b in zip(keys, keys[1:]))

    # -- evaluation --------------------------------------------------------

    def evaluate(self, t: float) -> np.ndarray:
        return global_parameter_eval(self, t)

    def reversed(self) -> "FreeFormContour":
        """Same curve traversed backwards (patch order and each patch reversed)."""
        return FreeFormContour(np.roll(self.points[::-1], 1, axis=0), self.degree)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {"degree": self.degree, "patches": self.controls().tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_patches(cls, patches: Sequence, degree: int | None = None, tol: float = 1e-9):
        """Build from explicit control polygons whose shared endpoints repeat."""
        ctrl = np.array([np.asarray(getattr(p, "control", p), dtype=np.float64) for p in patches])
        if ctrl.ndim != 3 or ctrl.shape[2] != 2 or ctrl.shape[0] == 0:
            raise ValueError("patches must be a non-empty list of (d+1, 2) polygons")
        d = ctrl.shape[1] - 1 if degree is None else degree
        if ctrl.shape[1] != d + 1:
            raise ValueError("all patches must have degree d")
        gap = np.abs(ctrl[:, -1] - np.roll(ctrl[:, 0], -1, axis=0)).max()
        if gap > tol:
            raise ContourError(f"patches do not form a closed chain (gap {gap:g})")
        return cls(ctrl[:, :d].reshape(-1, 2), d)

    @classmethod
    def from_dict(cls, doc: dict) -> "FreeFormContour":
        return cls.from_patches(doc["patches"], int(doc["degree"]))

    @classmethod
    def from_json(cls, text: str) -> "FreeFormContour":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"FreeFormContour(N={self.n_patches}, d={self.degree})"


def make_circle_contour(center, radius: float, n_patches: int, d: int = 3) -> FreeFormContour:
    """Contour through ``d+1`` equally spaced circle points per patch (CCW)."""
    if n_patches < 3:
        raise ValueError("a circle contour needs at least 3 patches")
    if not radius > 0:
        raise ValueError("radius must be positive")
    imap = build_interpolation_map(d)
    cx, cy = float(center[0]), float(center[1])
    points = np.empty((n_patches * d, 2))
    for j in range(n_patches):
        theta = 2.0 * math.pi * (j + np.asarray(imap.nodes)) / n_patches
        samples = np.stack([cx + radius * np.cos(theta), cy + radius * np.sin(theta)], axis=1)
        count("interpolations")
        ctrl = imap.v_inv @ samples
        points[j * d] = samples[0]
        points[j * d + 1 : j * d + d] = ctrl[1:d]
    return FreeFormContour(points, d)


def global_parameter_eval(contour: FreeFormContour, t: float) -> np.ndarray:
    """Point at global parameter ``t``: patch ``i`` covers ``[i/N, (i+1)/N]``."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"parameter t={t} outside [0, 1]")
    n = contour.n_patches
    i = min(int(math.floor(n * t)), n - 1)
    local = min(max(n * t - i, 0.0), 1.0)
    return eval_many(contour.patch(i).control[None], [local])[0, 0]


def sample_contour(contour: FreeFormContour, samples_per_patch: int) -> np.ndarray:
    """``N*(s-1)`` points in contour order; shared patch endpoints appear once."""
    if samples_per_patch < 2:
        raise ValueError("samples_per_patch must be >= 2")
    ts = np.linspace(0.0, 1.0, samples_per_patch)[:-1]
    return eval_many(contour.controls(), ts).reshape(-1, 2)


def shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def signed_area(contour: FreeFormContour, samples_per_patch: int = RASTER_SAMPLES) -> float:
    """Shoelace area of the dense polygonization; positive for CCW in (x, y)."""
    return shoelace(sample_contour(contour, samples_per_patch + 1))


def orient_ccw(contour: FreeFormContour) -> FreeFormContour:
    """Return the contour itself if CCW, else its reversal."""
    return contour if signed_area(contour) >= 0 else contour.reversed()


def _fill_polygons(polys: Iterable[np.ndarray], width: int, height: int) -> np.ndarray:
    """Even-odd scanline fill at integer pixel centres; on-boundary centres are inside."""
    rows_l, xs_l = [], []
    for poly in polys:
        p = np.asarray(poly, dtype=np.float64)
        q = np.roll(p, -1, axis=0)
        keep = p[:, 1] != q[:, 1]
        p, q = p[keep], q[keep]
        ylo = np.minimum(p[:, 1], q[:, 1])
        yhi = np.maximum(p[:, 1], q[:, 1])
        rlo = np.maximum(np.ceil(ylo), 0).astype(np.int64)
        rhi = np.minimum(np.ceil(yhi) - 1, height - 1).astype(np.int64)
        n = np.maximum(rhi - rlo + 1, 0)
        if n.sum() == 0:
            continue
        e = np.repeat(np.arange(p.shape[0]), n)
        offs = np.arange(n.sum()) - np.repeat(np.cumsum(n) - n, n)
        r = rlo[e] + offs
        p0, p1 = p[e], q[e]
        x = p0[:, 0] + (r - p0[:, 1]) * (p1[:, 0] - p0[:, 0]) / (p1[:, 1] - p0[:, 1])
        rows_l.append(r)
        xs_l.append(x)
    mask = np.zeros((height, width), dtype=bool)
    if not rows_l:
        return mask
    rows = np.concatenate(rows_l)
    xs = np.concatenate(xs_l)
    o = np.lexsort((xs, rows))
    rows, xs = rows[o], xs[o]
    # crossings pair up within each row once sorted
    xa, xb, rr = xs[0::2], xs[1::2], rows[0::2]
    c0 = np.maximum(np.ceil(xa), 0).astype(np.int64)
    c1 = np.minimum(np.floor(xb), width - 1).astype(np.int64)
    ok = c1 >= c0
    diff = np.zeros((height, width + 1), dtype=np.int32)
    np.add.at(diff, (rr[ok], c0[ok]), 1)
    np.add.at(diff, (rr[ok], c1[ok] + 1), -1)
    mask[:] = np.cumsum(diff, axis=1)[:, :width] > 0
    return mask


def contour_polygon(contour: FreeFormContour, samples_per_patch: int = RASTER_SAMPLES) -> np.ndarray:
    return sample_contour(contour, samples_per_patch + 1)


def rasterize_region(contours, width: int, height: int,
                     samples_per_patch: int = RASTER_SAMPLES) -> np.ndarray:
    """Boolean ``(height, width)`` mask of the region enclosed by one or more contours.

    Several contours are combined with the even-odd rule, so a contour nested
    in another punches a hole.
    """
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    if isinstance(contours, FreeFormContour):
        contours = [contours]
    polys = []
    for c in contours:
        if c.max_endpoint_gap() > 1e-9:
            raise ContourError("cannot rasterize an open contour")
        polys.append(contour_polygon(c, samples_per_patch))
    return _fill_polygons(polys, width, height)
