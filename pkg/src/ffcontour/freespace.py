"""Free-space extraction from an image pair with false-obstacle rejection.

A contour grown from a circle around the sensor footprint fills the ground
region; each enclosed component is then checked with matched interest points
and an altitude oracle. A component is merged back into free space when every
matched point inside it lies below ``eps_alt``; it is kept as an obstacle when
at least one point reaches ``eps_alt`` or when nothing inside it matched.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.ndimage import binary_dilation, gaussian_filter, maximum_filter
from scipy.spatial import cKDTree

from .evolve import EvolutionState, run
from .forces import EvolutionParams, build_force_field, check_gray
from .freeform import FreeFormContour, make_circle_contour, rasterize_region

Decision = Literal["keep", "merge"]


@dataclass(frozen=True, eq=False)
class ImagePair:
    prev: np.ndarray
    curr: np.ndarray

    def __post_init__(self):
        prev, curr = check_gray(self.prev), check_gray(self.curr)
        if prev.shape != curr.shape:
            raise ValueError(f"image sizes differ: {prev.shape} vs {curr.shape}")
        object.__setattr__(self, "prev", prev)
        object.__setattr__(self, "curr", curr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.curr.shape


@dataclass(frozen=True)
class InterestPoint:
    x: float
    y: float
    response: float

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Match:
    prev: InterestPoint
    curr: InterestPoint
    score: float


# --- interest points and matching ---------------------------------------------

def harris_response(img: np.ndarray, k: float = 0.06, sigma_i: float = 1.5) -> np.ndarray:
    """``det(M) - k trace(M)^2`` of the Gaussian-weighted structure tensor."""
    img = np.asarray(img, dtype=np.float64)
    gy, gx = np.gradient(img)
    sxx = gaussian_filter(gx * gx, sigma_i, mode="nearest")
    syy = gaussian_filter(gy * gy, sigma_i, mode="nearest")
    sxy = gaussian_filter(gx * gy, sigma_i, mode="nearest")
    return sxx * syy - sxy * sxy - k * (sxx + syy) ** 2


def harris_points(img, region: np.ndarray | None = None, k: float = 0.06,
                  threshold_rel: float = 0.01, sigma_i: float = 1.5) -> list[InterestPoint]:
    """Harris corners inside ``region`` (3x3 non-maximum suppression).

    A pixel qualifies when its response is the maximum of its 3x3
    neighbourhood, positive, and at least ``threshold_rel`` times the largest
    response inside the region. Points are returned in row-major order.
    """
    img = check_gray(img)
    if region is None:
        region = np.ones(img.shape, dtype=bool)
    region = np.asarray(region, dtype=bool)
    if region.shape != img.shape:
        raise ValueError("region and image sizes differ")
    if not region.any():
        raise ValueError("empty region")
    r = harris_response(img, k, sigma_i)
    top = r[region].max()
    if not top > 1e-12:
        return []
    peaks = (r == maximum_filter(r, size=3, mode="nearest")) & (r >= threshold_rel * top) & region
    ys, xs = np.nonzero(peaks)
    return [InterestPoint(float(x), float(y), float(r[y, x])) for y, x in zip(ys, xs)]


def _windows(img: np.ndarray, pts: Sequence[InterestPoint], w: int) -> tuple[np.ndarray, np.ndarray]:
    """Zero-mean unit-norm window vectors and the indices of points that had one."""
    h, wd = img.shape
    vecs, idx = [], []
    for n, p in enumerate(pts):
        x, y = int(round(p.x)), int(round(p.y))
        if x - w < 0 or y - w < 0 or x + w >= wd or y + w >= h:
            continue
        v = img[y - w : y + w + 1, x - w : x + w + 1].ravel() - img[y - w : y + w + 1, x - w : x + w + 1].mean()
        norm = np.linalg.norm(v)
        if norm < 1e-9:
            continue
        vecs.append(v / norm)
        idx.append(n)
    size = (2 * w + 1) ** 2
    return (np.array(vecs) if vecs else np.empty((0, size))), np.array(idx, dtype=np.int64)


def match_points(pair: ImagePair, pts_prev: Sequence[InterestPoint], pts_curr: Sequence[InterestPoint],
                 window: int = 3, max_disp: float = 30.0, threshold: float = 0.8) -> list[Match]:
    """Mutual-best normalized cross-correlation matches.

    Windows are ``(2*window+1)`` pixels square; candidates farther apart than
    ``max_disp`` or scoring below ``threshold`` are ignored. Ties go to the
    closer candidate.
    """
    vp, ip = _windows(pair.prev, pts_prev, window)
    vc, ic = _windows(pair.curr, pts_curr, window)
    if len(ip) == 0 or len(ic) == 0:
        return []
    pp = np.array([pts_prev[i].position for i in ip])
    pc = np.array([pts_curr[i].position for i in ic])
    dist = np.hypot(pp[:, None, 0] - pc[None, :, 0], pp[:, None, 1] - pc[None, :, 1])
    score = vp @ vc.T
    score = np.where((dist <= max_disp) & (score >= threshold), score, -np.inf)
    # rank by score, then by distance for ties
    key = np.round(score, 12) - 1e-9 * dist
    best_c = np.argmax(key, axis=1)
    best_p = np.argmax(key, axis=0)
    out = []
    for a, b in enumerate(best_c):
        if np.isfinite(score[a, b]) and best_p[b] == a:
            out.append(Match(pts_prev[ip[a]], pts_curr[ic[b]], float(score[a, b])))
    return out


# --- altitude oracles ------------------------------------------------------------

AltitudeOracle = Callable[[Match], float]


@dataclass(frozen=True, eq=False)
class RasterAltitude:
    """Altitude read from a raster at the current-image position of a match."""

    raster: np.ndarray

    def __call__(self, m: Match) -> float:
        h, w = self.raster.shape
        x = min(max(int(round(m.curr.x)), 0), w - 1)
        y = min(max(int(round(m.curr.y)), 0), h - 1)
        return float(self.raster[y, x])


@dataclass(frozen=True, eq=False)
class TableAltitude:
    """Nearest-neighbour lookup in a table of ``(x, y, altitude)`` rows."""

    xy: np.ndarray
    altitude: np.ndarray
    _tree: cKDTree = field(init=False, repr=False)

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=np.float64).reshape(-1, 2)
        alt = np.asarray(self.altitude, dtype=np.float64).ravel()
        if xy.shape[0] == 0 or xy.shape[0] != alt.shape[0]:
            raise ValueError("altitude table needs one altitude per (x, y) row")
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "altitude", alt)
        object.__setattr__(self, "_tree", cKDTree(xy))

    def __call__(self, m: Match) -> float:
        _, i = self._tree.query([m.curr.x, m.curr.y])
        return float(self.altitude[i])

    @classmethod
    def from_csv(cls, path) -> "TableAltitude":
        """Read a CSV with header ``x,y,altitude_m``."""
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"x", "y", "altitude_m"} <= set(reader.fieldnames):
                raise ValueError(f"{path}: expected columns x,y,altitude_m")
            rows = [(float(r["x"]), float(r["y"]), float(r["altitude_m"])) for r in reader]
        if not rows:
            raise ValueError(f"{path}: empty altitude table")
        arr = np.array(rows)
        return cls(arr[:, :2], arr[:, 2])


# --- classification and pipeline -----------------------------------------------

@dataclass(frozen=True)
class MatchParams:
    harris_k: float = 0.06
    harris_threshold: float = 0.01
    harris_sigma: float = 1.5
    window: int = 3
    max_disp: float = 30.0
    ncc_threshold: float = 0.8
    assign_margin: int = 3  # px grown around a component when collecting its points


@dataclass(frozen=True)
class ComponentReport:
    id: int
    classified: Decision
    matched_points: int
    max_altitude: float | None


def component_matches(comp: FreeFormContour, pair: ImagePair,
                      mp: MatchParams = MatchParams()) -> list[Match]:
    """Matches whose current-image point falls in the component's region.

    Interest points are searched in the component's bounding box dilated by
    ``max_disp`` in both images. Membership uses the rasterized mask (pixels
    on the boundary count as inside) grown by ``assign_margin`` pixels, since
    a contour halts a little before the edge it wraps and the corners that
    carry the interest points sit right on that edge.
    """
    h, w = pair.shape
    inside = rasterize_region(comp, w, h)
    if not inside.any():
        return []
    if mp.assign_margin > 0:
        inside = binary_dilation(inside, iterations=mp.assign_margin)
    ys, xs = np.nonzero(inside)
    pad = int(np.ceil(mp.max_disp))
    zone = np.zeros((h, w), dtype=bool)
    zone[max(ys.min() - pad, 0) : ys.max() + pad + 1, max(xs.min() - pad, 0) : xs.max() + pad + 1] = True
    kw = dict(k=mp.harris_k, threshold_rel=mp.harris_threshold, sigma_i=mp.harris_sigma)
    pts_prev = harris_points(pair.prev, zone, **kw)
    pts_curr = harris_points(pair.curr, zone, **kw)
    matches = match_points(pair, pts_prev, pts_curr, mp.window, mp.max_disp, mp.ncc_threshold)
    return [m for m in matches if inside[int(round(m.curr.y)), int(round(m.curr.x))]]


def decide(altitudes: Sequence[float], eps_alt: float) -> Decision:
    """Keep when any altitude reaches ``eps_alt`` or when there is nothing to judge."""
    if len(altitudes) == 0:
        return "keep"
    return "keep" if max(altitudes) >= eps_alt else "merge"


def classify_component(comp: FreeFormContour, pair: ImagePair, oracle: AltitudeOracle,
                       eps_alt: float = 0.05, mp: MatchParams = MatchParams(),
                       matches: list[Match] | None = None) -> ComponentReport:
    if matches is None:
        matches = component_matches(comp, pair, mp)
    alts = [oracle(m) for m in matches]
    return ComponentReport(-1, decide(alts, eps_alt), len(matches), max(alts) if alts else None)


@dataclass
class FreeSpaceResult:
    outer: FreeFormContour
    retained_obstacles: list[FreeFormContour]
    merged_components: list[FreeFormContour]
    free_space_mask: np.ndarray
    reports: list[ComponentReport]
    converged: bool
    iterations: int

    def report(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "free_pixels": int(self.free_space_mask.sum()),
            "components": [
                {"id": r.id, "classified": r.classified, "matched_points": r.matched_points,
                 "max_altitude": r.max_altitude}
                for r in self.reports
            ],
        }

    def write_report(self, path) -> None:
        Path(path).write_text(json.dumps(self.report(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def free_space_mask(outer: FreeFormContour, obstacles: Sequence[FreeFormContour],
                    width: int, height: int) -> np.ndarray:
    """Region of ``outer`` minus the union of the obstacle regions."""
    mask = rasterize_region(outer, width, height)
    for c in obstacles:
        mask &= ~rasterize_region(c, width, height)
    return mask


def segment_free_space(pair: ImagePair, center, radius: float, oracle: AltitudeOracle,
                       eps_alt: float = 0.05, evo: EvolutionParams | None = None,
                       n_patches: int = 8, degree: int = 3, sigma: float = 2.0, p: int = 2,
                       gain: float = 20.0, canny: tuple[float, float] | None = None,
                       mp: MatchParams = MatchParams(), state: EvolutionState | None = None
                       ) -> FreeSpaceResult:
    """Grow a contour on the current image and sort its inner components.

    ``center``/``radius`` place the initial circle over the sensor footprint.
    A precomputed evolution ``state`` may be passed to skip the evolution.
    """
    h, w = pair.shape
    if state is None:
        fld = build_force_field(pair.curr, sigma=sigma, p=p, gain=gain, canny=canny)
        state = run(make_circle_contour(center, radius, n_patches, degree), fld, evo)
    outer = state.components.outer
    kept, merged, reports = [], [], []
    for k, comp in enumerate(state.components.inner):
        r = classify_component(comp, pair, oracle, eps_alt, mp)
        reports.append(ComponentReport(k, r.classified, r.matched_points, r.max_altitude))
        (kept if r.classified == "keep" else merged).append(comp)
    mask = free_space_mask(outer, kept, w, h)
    return FreeSpaceResult(outer, kept, merged, mask, reports, state.converged, state.iteration)
