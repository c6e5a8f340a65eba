"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and bit-identical results; ``ffcontour.kernels`` picks one at import time.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# Shewchuk's static error bound for the 2x2 orientation determinant.
_EPS = 2.0 ** -53
ORIENT_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS


def eval_patches(ctrl: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """De Casteljau evaluation of many patches at many parameters.

    ``ctrl`` has shape (n, d+1, 2), ``ts`` shape (k,). Returns (n, k, 2).
    """
    ctrl = np.asarray(ctrl, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    n, m, _ = ctrl.shape
    work = np.broadcast_to(ctrl[:, None, :, :], (n, ts.size, m, 2)).copy()
    t = ts[None, :, None, None]
    u = 1.0 - t
    for r in range(1, m):
        work[:, :, : m - r] = u * work[:, :, : m - r] + t * work[:, :, 1 : m - r + 1]
    return work[:, :, 0]


def bilinear(img: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Sample ``img`` at (x, y) points with bilinear weights; coords are clamped."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    x = np.clip(np.asarray(pts[:, 0], dtype=np.float64), 0.0, w - 1.0)
    y = np.clip(np.asarray(pts[:, 1], dtype=np.float64), 0.0, h - 1.0)
    x0 = np.minimum(np.floor(x).astype(np.intp), max(w - 2, 0))
    y0 = np.minimum(np.floor(y).astype(np.intp), max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    top = (1.0 - fx) * img[y0, x0] + fx * img[y0, x1]
    bot = (1.0 - fx) * img[y1, x0] + fx * img[y1, x1]
    return (1.0 - fy) * top + fy * bot


def box_inter(b1, b2) -> bool:
    """Box filter on [x_min, y_min, x_max, y_max] boxes, four rejection rules."""
    x1, y1, x2, y2 = b1[0], b1[1], b1[2], b1[3]
    x3, y3, x4, y4 = b2[0], b2[1], b2[2], b2[3]
    if x2 < x3:
        return False
    if x2 == x3 and (y2 < y3 or y4 < y1):
        return False
    if x4 < x1:
        return False
    if x4 == x1 and (y4 < y1 or y2 < y3):
        return False
    return True


def _box_less(boxes: np.ndarray, a: int, b: int) -> bool:
    ba = boxes[a]
    bb = boxes[b]
    for c in range(4):
        if ba[c] < bb[c]:
            return True
        if ba[c] > bb[c]:
            return False
    return a < b


def insertion_repair(boxes: np.ndarray, order: np.ndarray) -> int:
    """Insertion-sort ``order`` in place by lexicographic box key; returns comparisons."""
    comparisons = 0
    n = order.shape[0]
    for p in range(1, n):
        cur = int(order[p])
        q = p - 1
        while q >= 0:
            comparisons += 1
            if _box_less(boxes, cur, int(order[q])):
                order[q + 1] = order[q]
                q -= 1
            else:
                break
        order[q + 1] = cur
    return comparisons


def sweep_candidates(boxes: np.ndarray, order: np.ndarray) -> tuple[np.ndarray, int]:
    """Sweep the x-sorted boxes and return non-adjacent overlapping pairs.

    Pairs come back as rows (i, j) with i < j, sorted. The second value is the
    number of box tests performed.
    """
    n = order.shape[0]
    active: list[int] = []
    found: list[tuple[int, int]] = []
    tests = 0
    for p in range(n):
        b = int(order[p])
        bx_min = boxes[b, 0]
        active = [a for a in active if boxes[a, 2] >= bx_min]
        for a in active:
            tests += 1
            if not box_inter(boxes[a], boxes[b]):
                continue
            if boxes[a, 3] < boxes[b, 1] or boxes[b, 3] < boxes[a, 1]:
                continue
            diff = abs(a - b)
            if diff == 1 or diff == n - 1:
                continue
            found.append((a, b) if a < b else (b, a))
        active.append(b)
    found.sort()
    pairs = np.array(found, dtype=np.int64).reshape(-1, 2)
    return pairs, tests


def orient_exact(ax, ay, bx, by, cx, cy) -> int:
    """Exact sign of the orientation determinant using rational arithmetic."""
    ax, ay, bx, by, cx, cy = (Fraction(float(v)) for v in (ax, ay, bx, by, cx, cy))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orient2d(ax, ay, bx, by, cx, cy) -> int:
    """Sign of the orientation of (a, b, c); float filter with exact fallback."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    errbound = ORIENT_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return orient_exact(ax, ay, bx, by, cx, cy)


def segments_cross(p, q, r, s) -> bool:
    """True iff segments pq and rs cross at a single interior point of both."""
    o1 = orient2d(p[0], p[1], q[0], q[1], r[0], r[1])
    if o1 == 0:
        return False
    o2 = orient2d(p[0], p[1], q[0], q[1], s[0], s[1])
    if o2 == 0 or o1 == o2:
        return False
    o3 = orient2d(r[0], r[1], s[0], s[1], p[0], p[1])
    if o3 == 0:
        return False
    o4 = orient2d(r[0], r[1], s[0], s[1], q[0], q[1])
    return o4 != 0 and o3 != o4


def polygons_intersect(a: np.ndarray, b: np.ndarray) -> bool:
    """Proper intersection test between two control polygons.

    Segments are swept along the chord of ``a`` (or of ``b`` when ``a`` is
    closed); only pairs whose projections on that line overlap are tested.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = a.shape[0] - 1
    nb = b.shape[0] - 1
    lx = a[na, 0] - a[0, 0]
    ly = a[na, 1] - a[0, 1]
    if lx == 0.0 and ly == 0.0:
        lx = b[nb, 0] - b[0, 0]
        ly = b[nb, 1] - b[0, 1]
    sweep = not (lx == 0.0 and ly == 0.0)
    if sweep:
        pa = a[:, 0] * lx + a[:, 1] * ly
        pb = b[:, 0] * lx + b[:, 1] * ly
        scale = max(float(np.abs(pa).max()), float(np.abs(pb).max()), 1.0)
        tol = 1e-9 * scale
    for s in range(na):
        if sweep:
            lo_a = min(pa[s], pa[s + 1])
            hi_a = max(pa[s], pa[s + 1])
        for t in range(nb):
            if sweep:
                lo_b = min(pb[t], pb[t + 1])
                hi_b = max(pb[t], pb[t + 1])
                if hi_a + tol < lo_b or hi_b + tol < lo_a:
                    continue
            if segments_cross(a[s], a[s + 1], b[t], b[t + 1]):
                return True
    return False


def pairs_intersect(ctrl: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    """Vector of ``polygons_intersect`` results for candidate rows of ``pairs``."""
    out = np.zeros(pairs.shape[0], dtype=bool)
    for r in range(pairs.shape[0]):
        out[r] = polygons_intersect(ctrl[pairs[r, 0]], ctrl[pairs[r, 1]])
    return out


def _halves(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = c.shape[0] - 1
    left = np.empty_like(c)
    right = np.empty_like(c)
    left[0], right[d] = c[0], c[d]
    pts = c
    for r in range(1, d + 1):
        pts = 0.5 * (pts[:-1] + pts[1:])
        left[r] = pts[0]
        right[d - r] = pts[-1]
    return left, right


def _overlap(a: np.ndarray, b: np.ndarray) -> bool:
    return (a[:, 0].min() <= b[:, 0].max() and b[:, 0].min() <= a[:, 0].max()
            and a[:, 1].min() <= b[:, 1].max() and b[:, 1].min() <= a[:, 1].max())


def crossing_params(a: np.ndarray, b: np.ndarray, depth: int) -> tuple[bool, float, float]:
    """First crossing of the polygons after ``depth`` midpoint subdivisions.

    Depth-first over sub-patch pairs in (left, left), (left, right),
    (right, left), (right, right) order; returns ``(found, s, t)`` with the
    centres of the crossing sub-intervals.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    stack = [(a, 0.0, b, 0.0, depth)]
    while stack:
        pa, sa, pb, sb, lvl = stack.pop()
        if not _overlap(pa, pb):
            continue
        if lvl == 0:
            if polygons_intersect(pa, pb):
                half = 0.5 ** (depth + 1)
                return True, sa + half, sb + half
            continue
        w = 0.5 ** (depth - lvl + 1)
        ha, hb = _halves(pa), _halves(pb)
        for ka in (1, 0):
            for kb in (1, 0):
                stack.append((ha[ka], sa + ka * w, hb[kb], sb + kb * w, lvl - 1))
    return False, 0.0, 0.0


def pairs_crossing(ctrl: np.ndarray, pairs: np.ndarray, depth: int
                   ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``crossing_params`` for candidate rows of ``pairs``: (hit, s, t) arrays."""
    n = pairs.shape[0]
    hit = np.zeros(n, dtype=bool)
    s = np.zeros(n)
    t = np.zeros(n)
    for r in range(n):
        hit[r], s[r], t[r] = crossing_params(ctrl[pairs[r, 0]], ctrl[pairs[r, 1]], depth)
    return hit, s, t
