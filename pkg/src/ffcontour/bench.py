"""Benchmark harness: point counts, iterations and convergence time per scene,
plus the N versus 2N scaling probe for flip-free iterations.

Wall times are medians over repeated sequential runs; operation counts come
from :mod:`ffcontour.instrument` and are deterministic.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import asdict, dataclass, replace

import numpy as np

from .bezier import build_interpolation_map
from .config import Config
from .evolve import evolve_step, initial_state, run
from .forces import EvolutionParams, build_force_field
from .freeform import make_circle_contour
from .instrument import counting
from .synth import benchmark_scene

CSV_COLUMNS = ("method", "image", "initial_points", "final_points", "components", "iterations", "time_ms")

# counters that make up the cost of one deformation iteration
COST_KEYS = ("evaluations", "interpolations", "displacement_queries", "box_tests",
             "polygon_tests", "repair_comparisons", "sort_comparisons")


@dataclass(frozen=True)
class BenchRow:
    method: str
    image: str
    initial_points: int
    final_points: int
    components: int
    iterations: int
    time_ms: float


def run_scene(kind: str, cfg: Config = Config(), width: int = 800, height: int = 600) -> BenchRow:
    """One timed segmentation of a synthetic benchmark scene.

    Points are the junction nodes of the contour, i.e. the patch count.
    The clock covers the evolution only, not the force-field build.
    """
    scene = benchmark_scene(kind, width, height)
    fld = build_force_field(scene.image, cfg.sigma, cfg.p, cfg.gain, cfg.canny())
    contour = make_circle_contour(scene.seed, scene.seed_radius, cfg.bench_patches, cfg.degree)
    t0 = time.perf_counter()
    state = run(contour, fld, cfg.evolution())
    ms = (time.perf_counter() - t0) * 1e3
    return BenchRow("FF", kind, cfg.bench_patches, state.n_patches, len(state.components), state.iteration, ms)


def run_suite(kinds=("simple", "complex"), cfg: Config = Config()) -> list[BenchRow]:
    """Median over ``cfg.repeats`` runs for every scene kind."""
    rows = []
    for kind in kinds:
        runs = [run_scene(kind, cfg) for _ in range(max(1, cfg.repeats))]
        first = runs[0]
        rows.append(replace(first, time_ms=statistics.median(r.time_ms for r in runs)))
    return rows


def write_csv(rows, fh) -> None:
    """Write rows to an open text stream or to a path."""
    if isinstance(fh, (str, bytes)) or hasattr(fh, "__fspath__"):
        with open(fh, "w", newline="", encoding="utf-8") as out:
            return write_csv(rows, out)
    w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        d = asdict(r)
        d["time_ms"] = f"{d['time_ms']:.3f}"
        w.writerow(d)


@dataclass(frozen=True)
class ScalingResult:
    n: int
    ops_n: int
    ops_2n: int
    time_n_ms: float
    time_2n_ms: float

    @property
    def op_ratio(self) -> float:
        return self.ops_2n / self.ops_n

    @property
    def time_ratio(self) -> float:
        return self.time_2n_ms / self.time_n_ms


def _flip_free_iterations(n_patches: int, iters: int, size: int) -> tuple[int, float]:
    """Counted operations and seconds for ``iters`` iterations of an expanding
    circle on a blank image (no edges, no splits, no crossings)."""
    img = np.zeros((size, size))
    fld = build_force_field(img)
    params = EvolutionParams(refine=False, max_iters=iters)
    c = (size - 1) / 2.0
    state = initial_state(make_circle_contour((c, c), 0.3 * size, n_patches))
    imap = build_interpolation_map(state.components.outer.degree)
    with counting() as ops:
        t0 = time.perf_counter()
        for _ in range(iters):
            state = evolve_step(state, fld, imap, params)
        dt = time.perf_counter() - t0
    if state.flips:
        raise RuntimeError("scaling probe fixture produced a flip")
    return sum(ops[k] for k in COST_KEYS), dt


def scaling_probe(n: int = 1000, iters: int = 5, repeats: int = 5, size: int = 1200) -> ScalingResult:
    """Cost of flip-free iterations with ``n`` and ``2n`` patches."""
    ops_n, _ = _flip_free_iterations(n, iters, size)
    ops_2n, _ = _flip_free_iterations(2 * n, iters, size)
    tn = statistics.median(_flip_free_iterations(n, iters, size)[1] for _ in range(repeats))
    t2n = statistics.median(_flip_free_iterations(2 * n, iters, size)[1] for _ in range(repeats))
    return ScalingResult(n, ops_n, ops_2n, tn * 1e3, t2n * 1e3)
