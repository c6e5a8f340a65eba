# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_kernels_py``.

Arithmetic is written in the same order as the Python versions and built
with ``-ffp-contract=off`` so both backends agree bit for bit.
"""

import numpy as np
from libc.math cimport floor, fabs

from ._kernels_py import orient_exact

cdef double ORIENT_ERRBOUND = (3.0 + 16.0 * 2.0 ** -53) * 2.0 ** -53


def eval_patches(ctrl, ts):
    cdef const double[:, :, ::1] c = np.ascontiguousarray(ctrl, dtype=np.float64)
    cdef const double[::1] tv = np.ascontiguousarray(ts, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = c.shape[0], m = c.shape[1], k = tv.shape[0]
    out = np.empty((n, k, 2), dtype=np.float64)
    cdef double[:, :, ::1] o = out
    cdef double[:, ::1] work = np.empty((m, 2), dtype=np.float64)
    cdef Py_ssize_t i, j, r, q
    cdef double t, u
    for i in range(n):
        for j in range(k):
            t = tv[j]
            u = 1.0 - t
            for q in range(m):
                work[q, 0] = c[i, q, 0]
                work[q, 1] = c[i, q, 1]
            for r in range(1, m):
                for q in range(m - r):
                    work[q, 0] = u * work[q, 0] + t * work[q + 1, 0]
                    work[q, 1] = u * work[q, 1] + t * work[q + 1, 1]
            o[i, j, 0] = work[0, 0]
            o[i, j, 1] = work[0, 1]
    return out


def bilinear(img, pts):
    cdef const double[:, ::1] im = np.ascontiguousarray(img, dtype=np.float64)
    cdef const double[:, ::1] p = np.ascontiguousarray(pts, dtype=np.float64)
    cdef Py_ssize_t h = im.shape[0], w = im.shape[1], n = p.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double x, y, fx, fy, top, bot
    cdef Py_ssize_t x0, y0, x1, y1
    cdef Py_ssize_t xcap = w - 2 if w >= 2 else 0
    cdef Py_ssize_t ycap = h - 2 if h >= 2 else 0
    for i in range(n):
        x = p[i, 0]
        y = p[i, 1]
        if x < 0.0:
            x = 0.0
        elif x > w - 1.0:
            x = w - 1.0
        if y < 0.0:
            y = 0.0
        elif y > h - 1.0:
            y = h - 1.0
        x0 = <Py_ssize_t>floor(x)
        y0 = <Py_ssize_t>floor(y)
        if x0 > xcap:
            x0 = xcap
        if y0 > ycap:
            y0 = ycap
        x1 = x0 + 1 if x0 + 1 < w else w - 1
        y1 = y0 + 1 if y0 + 1 < h else h - 1
        fx = x - x0
        fy = y - y0
        top = (1.0 - fx) * im[y0, x0] + fx * im[y0, x1]
        bot = (1.0 - fx) * im[y1, x0] + fx * im[y1, x1]
        o[i] = (1.0 - fy) * top + fy * bot
    return out


cdef inline bint _box_inter(const double[:, ::1] b, Py_ssize_t i, Py_ssize_t j) nogil:
    cdef double x1 = b[i, 0], y1 = b[i, 1], x2 = b[i, 2], y2 = b[i, 3]
    cdef double x3 = b[j, 0], y3 = b[j, 1], x4 = b[j, 2], y4 = b[j, 3]
    if x2 < x3:
        return False
    if x2 == x3 and (y2 < y3 or y4 < y1):
        return False
    if x4 < x1:
        return False
    if x4 == x1 and (y4 < y1 or y2 < y3):
        return False
    return True


def box_inter(b1, b2):
    cdef const double[:, ::1] b = np.ascontiguousarray(np.vstack([b1, b2]), dtype=np.float64)
    return bool(_box_inter(b, 0, 1))


cdef inline bint _box_less(const double[:, ::1] b, Py_ssize_t a, Py_ssize_t c) nogil:
    cdef Py_ssize_t q
    for q in range(4):
        if b[a, q] < b[c, q]:
            return True
        if b[a, q] > b[c, q]:
            return False
    return a < c


def insertion_repair(boxes, order):
    cdef const double[:, ::1] b = np.ascontiguousarray(boxes, dtype=np.float64)
    cdef long long[::1] o = order
    cdef Py_ssize_t n = o.shape[0], p, q
    cdef long long cur
    cdef long long comparisons = 0
    for p in range(1, n):
        cur = o[p]
        q = p - 1
        while q >= 0:
            comparisons += 1
            if _box_less(b, cur, o[q]):
                o[q + 1] = o[q]
                q -= 1
            else:
                break
        o[q + 1] = cur
    return int(comparisons)


def sweep_candidates(boxes, order):
    cdef const double[:, ::1] b = np.ascontiguousarray(boxes, dtype=np.float64)
    cdef const long long[::1] o = np.ascontiguousarray(order, dtype=np.int64)
    cdef Py_ssize_t n = o.shape[0], p, q, na, keep
    cdef long long[::1] active = np.empty(max(n, 1), dtype=np.int64)
    cdef long long a, c, diff
    cdef long long tests = 0
    cdef double bx_min
    found = []
    na = 0
    for p in range(n):
        c = o[p]
        bx_min = b[c, 0]
        keep = 0
        for q in range(na):
            if b[active[q], 2] >= bx_min:
                active[keep] = active[q]
                keep += 1
        na = keep
        for q in range(na):
            a = active[q]
            tests += 1
            if not _box_inter(b, a, c):
                continue
            if b[a, 3] < b[c, 1] or b[c, 3] < b[a, 1]:
                continue
            diff = a - c if a > c else c - a
            if diff == 1 or diff == n - 1:
                continue
            if a < c:
                found.append((a, c))
            else:
                found.append((c, a))
        active[na] = c
        na += 1
    found.sort()
    pairs = np.array(found, dtype=np.int64).reshape(-1, 2)
    return pairs, int(tests)


cdef int _orient(double ax, double ay, double bx, double by, double cx, double cy):
    cdef double detleft = (ax - cx) * (by - cy)
    cdef double detright = (ay - cy) * (bx - cx)
    cdef double det = detleft - detright
    cdef double errbound = ORIENT_ERRBOUND * (fabs(detleft) + fabs(detright))
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return orient_exact(ax, ay, bx, by, cx, cy)


def orient2d(ax, ay, bx, by, cx, cy):
    return _orient(ax, ay, bx, by, cx, cy)


cdef bint _cross(double px, double py, double qx, double qy,
                 double rx, double ry, double sx, double sy):
    cdef int o1 = _orient(px, py, qx, qy, rx, ry)
    if o1 == 0:
        return False
    cdef int o2 = _orient(px, py, qx, qy, sx, sy)
    if o2 == 0 or o1 == o2:
        return False
    cdef int o3 = _orient(rx, ry, sx, sy, px, py)
    if o3 == 0:
        return False
    cdef int o4 = _orient(rx, ry, sx, sy, qx, qy)
    return o4 != 0 and o3 != o4


def segments_cross(p, q, r, s):
    return bool(_cross(p[0], p[1], q[0], q[1], r[0], r[1], s[0], s[1]))


cdef bint _polys(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t na = a.shape[0] - 1, nb = b.shape[0] - 1, s, t, q
    cdef double lx = a[na, 0] - a[0, 0]
    cdef double ly = a[na, 1] - a[0, 1]
    cdef bint sweep
    cdef double scale = 1.0, tol = 0.0, v, lo_a = 0.0, hi_a = 0.0, lo_b, hi_b, pa0, pa1, pb0, pb1
    if lx == 0.0 and ly == 0.0:
        lx = b[nb, 0] - b[0, 0]
        ly = b[nb, 1] - b[0, 1]
    sweep = not (lx == 0.0 and ly == 0.0)
    if sweep:
        for q in range(na + 1):
            v = fabs(a[q, 0] * lx + a[q, 1] * ly)
            if v > scale:
                scale = v
        for q in range(nb + 1):
            v = fabs(b[q, 0] * lx + b[q, 1] * ly)
            if v > scale:
                scale = v
        tol = 1e-9 * scale
    for s in range(na):
        if sweep:
            pa0 = a[s, 0] * lx + a[s, 1] * ly
            pa1 = a[s + 1, 0] * lx + a[s + 1, 1] * ly
            lo_a = pa0 if pa0 < pa1 else pa1
            hi_a = pa1 if pa0 < pa1 else pa0
        for t in range(nb):
            if sweep:
                pb0 = b[t, 0] * lx + b[t, 1] * ly
                pb1 = b[t + 1, 0] * lx + b[t + 1, 1] * ly
                lo_b = pb0 if pb0 < pb1 else pb1
                hi_b = pb1 if pb0 < pb1 else pb0
                if hi_a + tol < lo_b or hi_b + tol < lo_a:
                    continue
            if _cross(a[s, 0], a[s, 1], a[s + 1, 0], a[s + 1, 1],
                      b[t, 0], b[t, 1], b[t + 1, 0], b[t + 1, 1]):
                return True
    return False


def polygons_intersect(a, b):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    return bool(_polys(av, bv))


def pairs_intersect(ctrl, pairs):
    cdef const double[:, :, ::1] c = np.ascontiguousarray(ctrl, dtype=np.float64)
    cdef const long long[:, ::1] pr = np.ascontiguousarray(pairs, dtype=np.int64).reshape(-1, 2)
    cdef Py_ssize_t r, n = pr.shape[0]
    out = np.zeros(n, dtype=bool)
    cdef unsigned char[::1] o = out.view(np.uint8)
    for r in range(n):
        o[r] = _polys(c[pr[r, 0]], c[pr[r, 1]])
    return out


cdef inline bint _overlap(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t q, m = a.shape[0]
    cdef double ax0 = a[0, 0], ax1 = a[0, 0], ay0 = a[0, 1], ay1 = a[0, 1]
    cdef double bx0 = b[0, 0], bx1 = b[0, 0], by0 = b[0, 1], by1 = b[0, 1]
    for q in range(1, m):
        ax0 = a[q, 0] if a[q, 0] < ax0 else ax0
        ax1 = a[q, 0] if a[q, 0] > ax1 else ax1
        ay0 = a[q, 1] if a[q, 1] < ay0 else ay0
        ay1 = a[q, 1] if a[q, 1] > ay1 else ay1
        bx0 = b[q, 0] if b[q, 0] < bx0 else bx0
        bx1 = b[q, 0] if b[q, 0] > bx1 else bx1
        by0 = b[q, 1] if b[q, 1] < by0 else by0
        by1 = b[q, 1] if b[q, 1] > by1 else by1
    return ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1


cdef void _halves(const double[:, ::1] c, double[:, ::1] left, double[:, ::1] right,
                  double[:, ::1] work):
    cdef Py_ssize_t d = c.shape[0] - 1, r, q
    for q in range(d + 1):
        work[q, 0] = c[q, 0]
        work[q, 1] = c[q, 1]
    left[0, 0] = c[0, 0]
    left[0, 1] = c[0, 1]
    right[d, 0] = c[d, 0]
    right[d, 1] = c[d, 1]
    for r in range(1, d + 1):
        for q in range(d + 1 - r):
            work[q, 0] = 0.5 * (work[q, 0] + work[q + 1, 0])
            work[q, 1] = 0.5 * (work[q, 1] + work[q + 1, 1])
        left[r, 0] = work[0, 0]
        left[r, 1] = work[0, 1]
        right[d - r, 0] = work[d - r, 0]
        right[d - r, 1] = work[d - r, 1]


cdef tuple _crossing(const double[:, ::1] a, const double[:, ::1] b, int depth):
    cdef Py_ssize_t m = a.shape[0], cap = 3 * depth + 1, top, ka, kb, slot
    # stack of polygon pairs; every level pushes at most 4 entries
    cdef double[:, :, ::1] spa = np.empty((cap + 1, m, 2))
    cdef double[:, :, ::1] spb = np.empty((cap + 1, m, 2))
    cdef double[::1] ssa = np.empty(cap + 1)
    cdef double[::1] ssb = np.empty(cap + 1)
    cdef long[::1] slv = np.empty(cap + 1, dtype=np.int_)
    cdef double[:, :, ::1] ha = np.empty((2, m, 2))
    cdef double[:, :, ::1] hb = np.empty((2, m, 2))
    cdef double[:, ::1] work = np.empty((m, 2))
    cdef double sa, sb, w, half
    cdef long lvl
    spa[0, :, :] = a
    spb[0, :, :] = b
    ssa[0] = 0.0
    ssb[0] = 0.0
    slv[0] = depth
    top = 1
    while top > 0:
        top -= 1
        sa = ssa[top]
        sb = ssb[top]
        lvl = slv[top]
        if not _overlap(spa[top], spb[top]):
            continue
        if lvl == 0:
            if _polys(spa[top], spb[top]):
                half = 0.5 ** (depth + 1)
                return True, sa + half, sb + half
            continue
        w = 0.5 ** (depth - lvl + 1)
        _halves(spa[top], ha[0], ha[1], work)
        _halves(spb[top], hb[0], hb[1], work)
        for ka in (1, 0):
            for kb in (1, 0):
                slot = top
                spa[slot, :, :] = ha[ka]
                spb[slot, :, :] = hb[kb]
                ssa[slot] = sa + ka * w
                ssb[slot] = sb + kb * w
                slv[slot] = lvl - 1
                top += 1
    return False, 0.0, 0.0


def crossing_params(a, b, depth):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    return _crossing(av, bv, depth)


def pairs_crossing(ctrl, pairs, depth):
    cdef const double[:, :, ::1] c = np.ascontiguousarray(ctrl, dtype=np.float64)
    cdef const long long[:, ::1] pr = np.ascontiguousarray(pairs, dtype=np.int64).reshape(-1, 2)
    cdef Py_ssize_t r, n = pr.shape[0]
    hit = np.zeros(n, dtype=bool)
    s = np.zeros(n)
    t = np.zeros(n)
    for r in range(n):
        hit[r], s[r], t[r] = _crossing(c[pr[r, 0]], c[pr[r, 1]], depth)
    return hit, s, t
