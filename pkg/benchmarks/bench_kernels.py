"""Compare the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeats R] [--n N]

Each kernel runs on the same random inputs under both backends; the table
reports the median wall time per call and the speed-up. Results are checked
for equality so a benchmark run doubles as a backend consistency check.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from ffcontour import _kernels_py, kernels

try:
    from ffcontour import _ckernels
except ImportError:
    _ckernels = None


def _random_contour_ctrl(rng: np.random.Generator, n: int, d: int = 3) -> np.ndarray:
    # a wobbly circle, so neighbouring boxes overlap like they do in practice
    t = np.linspace(0.0, 2 * np.pi, n * d, endpoint=False)
    r = 300.0 + 40.0 * np.sin(7 * t) + rng.normal(0.0, 3.0, t.size)
    pts = np.stack([400 + r * np.cos(t), 400 + r * np.sin(t)], axis=1)
    idx = (np.arange(n)[:, None] * d + np.arange(d + 1)[None, :]) % (n * d)
    return pts[idx]


def _boxes(ctrl: np.ndarray) -> np.ndarray:
    return np.concatenate([ctrl.min(axis=1), ctrl.max(axis=1)], axis=1)


def cases(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    ctrl = _random_contour_ctrl(rng, n)
    ts = np.linspace(0.0, 1.0, 4)
    img = rng.random((600, 800))
    pts = rng.random((4 * n, 2)) * [799, 599]
    boxes = _boxes(ctrl)
    shuffled = rng.permutation(n).astype(np.int64)
    sw = np.lexsort(boxes.T[::-1]).astype(np.int64)
    pairs = rng.integers(0, n, size=(n, 2)).astype(np.int64)
    pairs = pairs[np.abs(pairs[:, 0] - pairs[:, 1]) > 1]
    loose = ctrl + rng.normal(0.0, 25.0, ctrl.shape)
    yield "eval_patches", lambda m: m.eval_patches(ctrl, ts)
    yield "bilinear", lambda m: m.bilinear(img, pts)
    yield "insertion_repair (shuffled)", lambda m: m.insertion_repair(boxes, shuffled.copy())
    yield "insertion_repair (sorted)", lambda m: m.insertion_repair(boxes, sw.copy())
    yield "sweep_candidates", lambda m: m.sweep_candidates(boxes, sw)
    yield "pairs_intersect", lambda m: m.pairs_intersect(loose, pairs)
    yield "pairs_crossing (depth 3)", lambda m: m.pairs_crossing(loose, pairs, 3)


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def _time(fn, repeats: int) -> float:
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--n", type=int, default=1000, help="patches per synthetic contour")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; only the python backend is available")
    print(f"active backend at import: {kernels.BACKEND}")
    print(f"{'kernel':30s} {'python ms':>11s} {'compiled ms':>12s} {'speed-up':>9s}  equal")
    for name, call in cases(args.n):
        tp = _time(lambda: call(_kernels_py), args.repeats) * 1e3
        if _ckernels is None:
            print(f"{name:30s} {tp:11.3f} {'-':>12s} {'-':>9s}  -")
            continue
        tc = _time(lambda: call(_ckernels), args.repeats) * 1e3
        eq = _same(call(_kernels_py), call(_ckernels))
        print(f"{name:30s} {tp:11.3f} {tc:12.3f} {tp / tc:8.1f}x  {eq}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
