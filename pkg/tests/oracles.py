"""Independent reference computations used by the tests.

Everything here is written from first principles with exact rationals or
plain loops, sharing no code with the package.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np


def bezier_exact(ctrl, t) -> tuple[Fraction, Fraction]:
    """Bernstein-sum evaluation in exact rational arithmetic."""
    d = len(ctrl) - 1
    t = Fraction(float(t))
    u = 1 - t
    x = y = Fraction(0)
    for i, (px, py) in enumerate(ctrl):
        w = comb(d, i) * t**i * u ** (d - i)
        x += w * Fraction(float(px))
        y += w * Fraction(float(py))
    return x, y


def bezier_float(ctrl, t) -> np.ndarray:
    x, y = bezier_exact(ctrl, t)
    return np.array([float(x), float(y)])


def subdivide_half(ctrl) -> tuple[np.ndarray, np.ndarray]:
    """Corner-cutting subdivision at t = 1/2 in exact arithmetic."""
    pts = [(Fraction(float(x)), Fraction(float(y))) for x, y in ctrl]
    left, right = [pts[0]], [pts[-1]]
    while len(pts) > 1:
        pts = [((a[0] + b[0]) / 2, (a[1] + b[1]) / 2) for a, b in zip(pts, pts[1:])]
        left.append(pts[0])
        right.append(pts[-1])
    to = lambda seq: np.array([[float(x), float(y)] for x, y in seq])
    return to(left), to(right[::-1])


def _orient(a, b, c) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(float(v)) for v in (*a, *b, *c))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def segments_properly_cross(p, q, r, s) -> bool:
    o1, o2 = _orient(p, q, r), _orient(p, q, s)
    o3, o4 = _orient(r, s, p), _orient(r, s, q)
    return o1 * o2 < 0 and o3 * o4 < 0


def polylines_cross(a, b) -> bool:
    """All-pairs proper crossing test between two open polylines."""
    return any(
        segments_properly_cross(a[s], a[s + 1], b[t], b[t + 1])
        for s in range(len(a) - 1)
        for t in range(len(b) - 1)
    )


def closed_interval_overlap(lo1, hi1, lo2, hi2) -> bool:
    return not (hi1 < lo2 or hi2 < lo1)


def box_filter_oracle(b1, b2) -> bool:
    """Interval semantics of the box filter: the x-intervals must meet, and
    when one box ends exactly where the other starts, the y-intervals must
    meet too. Boxes whose x-intervals overlap with positive length pass."""
    x1, y1, x2, y2 = b1
    x3, y3, x4, y4 = b2
    if not closed_interval_overlap(x1, x2, x3, x4):
        return False
    if x2 == x3 or x4 == x1:
        return closed_interval_overlap(y1, y2, y3, y4)
    return True


def boxes_overlap_2d(b1, b2) -> bool:
    return closed_interval_overlap(b1[0], b1[2], b2[0], b2[2]) and closed_interval_overlap(
        b1[1], b1[3], b2[1], b2[3]
    )


def iou(a: np.ndarray, b: np.ndarray) -> float:
    union = np.logical_or(a, b).sum()
    return float(np.logical_and(a, b).sum() / union) if union else 1.0


def exact_area(ctrl_stack) -> float:
    """Signed enclosed area of closed Bezier chains via Green's theorem.

    The integrand x*y' - y*x' of a degree-d patch is a polynomial of degree
    2d-1, so d-point Gauss-Legendre quadrature integrates it exactly.
    """
    ctrl_stack = np.asarray(ctrl_stack, dtype=np.float64)
    d = ctrl_stack.shape[1] - 1
    xs, ws = np.polynomial.legendre.leggauss(max(d, 1) + 1)
    ts, ws = 0.5 * (xs + 1.0), 0.5 * ws
    total = 0.0
    for ctrl in ctrl_stack:
        for t, w in zip(ts, ws):
            p = bezier_float(ctrl, t)
            dp = d * bezier_float(np.diff(ctrl, axis=0), t) if d > 0 else np.zeros(2)
            total += w * (p[0] * dp[1] - p[1] * dp[0])
    return 0.5 * total


def parametric_contour_points(fn, n_patches: int, d: int = 3) -> np.ndarray:
    """Flat ``N*d`` control-point list interpolating a closed curve ``fn(u)``,
    ``u`` in [0, 1), with d+1 uniformly spaced samples per patch."""
    nodes = np.linspace(0.0, 1.0, d + 1)
    v = np.array([[comb(d, i) * t**i * (1 - t) ** (d - i) for i in range(d + 1)] for t in nodes])
    pts = []
    for j in range(n_patches):
        samples = np.array([fn(((j + t) / n_patches) % 1.0) for t in nodes])
        ctrl = np.linalg.solve(v, samples)
        ctrl[0], ctrl[-1] = samples[0], samples[-1]
        pts.append(ctrl[:d])
    return np.concatenate(pts)


def sampled_curves_cross(pa: np.ndarray, pb: np.ndarray) -> bool:
    """Float crossing test between two dense polylines (vectorized)."""
    p, q = pa[:-1, None, :], pa[1:, None, :]
    r, s = pb[None, :-1, :], pb[None, 1:, :]

    def orient(a, b, c):
        return np.sign((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))

    return bool(np.any((orient(p, q, r) * orient(p, q, s) < 0) & (orient(r, s, p) * orient(r, s, q) < 0)))
