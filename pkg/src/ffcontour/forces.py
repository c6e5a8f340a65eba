"""Image forces: Gaussian-smoothed edge map, diffusion map and balloon moves.

``f_edge = (gain * |grad(G_sigma * I)|) ** p`` and ``f_diff = 1 / (1 + f_edge)``.
Intensities are in [0, 1]; ``gain`` rescales gradients before the power law
so that the ``edge_stop`` threshold on ``f_diff`` sits close to real edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d

from . import kernels
from .bezier import BezierPatch, eval_derivative
from .instrument import count

DEFAULT_SIGMA = 2.0
DEFAULT_P = 2
DEFAULT_GAIN = 20.0


@dataclass(frozen=True)
class EvolutionParams:
    """Knobs of the balloon evolution and its convergence test."""

    step: float = 1.0
    edge_stop: float = 0.15
    samples_per_patch: int | None = None  # None means d+1 (the interpolation nodes)
    move_eps: float = 0.1
    steady_fraction: float = 0.98
    max_iters: int = 2000
    split_eps: float = 40.0
    merge_eps: float | None = None
    refine: bool = True
    topology: bool = True
    min_component_area: float = 25.0
    confirm_depth: int = 3  # subdivision rounds confirming a polygon crossing before a flip
    resample_flips: bool = True  # rebuild junction patches through the crossing
    max_patches: int = 20000  # runaway guard; exceeding it stops the run unconverged

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not 0.0 < self.edge_stop < 1.0:
            raise ValueError("edge_stop must lie in (0, 1)")
        if not 0.0 < self.steady_fraction <= 1.0:
            raise ValueError("steady_fraction must lie in (0, 1]")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if not self.split_eps > 0:
            raise ValueError("split_eps must be positive")
        if self.confirm_depth < 0:
            raise ValueError("confirm_depth must be >= 0")
        if self.max_patches < 3:
            raise ValueError("max_patches must be >= 3")


@dataclass(frozen=True, eq=False)
class ForceField:
    f_edge: np.ndarray
    f_diff: np.ndarray
    grad_edge: np.ndarray  # (h, w, 2) as (d/dx, d/dy)
    sigma: float
    p: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.f_diff.shape

    @property
    def width(self) -> int:
        return self.f_diff.shape[1]

    @property
    def height(self) -> int:
        return self.f_diff.shape[0]


def check_gray(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("expected a non-empty 2-D grayscale image")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("intensities must lie in [0, 1]")
    return arr


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = max(1, int(math.ceil(3.0 * sigma)))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable normalized Gaussian blur with edge replication."""
    k = gaussian_kernel(sigma)
    if min(img.shape) < k.size:
        raise ValueError(f"image {img.shape} smaller than the {k.size}-tap kernel")
    out = convolve1d(img, k, axis=0, mode="nearest")
    return convolve1d(out, k, axis=1, mode="nearest")


def gradient(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central differences (one-sided on the border) as (d/dx, d/dy)."""
    gy, gx = np.gradient(img)
    return gx, gy


def build_force_field(img, sigma: float = DEFAULT_SIGMA, p: int = DEFAULT_P,
                      gain: float = DEFAULT_GAIN, canny: tuple[float, float] | None = None
                      ) -> ForceField:
    """Edge map and diffusion map of ``img``.

    With ``canny=(low, high)`` the edge magnitude is kept only on the pixels a
    Canny detector (hysteresis thresholds on the smoothed gradient) marks as
    edges, everything else is treated as homogeneous.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if int(p) != p or p < 1:
        raise ValueError("p must be an integer >= 1")
    img = check_gray(img)
    smooth = gaussian_blur(img, sigma)
    gx, gy = gradient(smooth)
    mag = np.hypot(gx, gy)
    if canny is not None:
        from skimage.feature import canny as _canny

        low, high = canny
        edges = _canny(img, sigma=sigma, low_threshold=low, high_threshold=high)
        mag = np.where(edges, mag, 0.0)
    f_edge = (gain * mag) ** int(p)
    f_diff = 1.0 / (1.0 + f_edge)
    ex, ey = gradient(f_edge)
    return ForceField(f_edge, f_diff, np.stack([ex, ey], axis=-1), float(sigma), int(p))


def rotate_normal(tangent: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Tangent(s) turned by -90 degrees for orientation +1 (CCW), +90 for -1."""
    tangent = np.asarray(tangent, dtype=np.float64)
    n = np.stack([tangent[..., 1], -tangent[..., 0]], axis=-1)
    return n if orientation >= 0 else -n


def outward_normal(patch: BezierPatch, t: float, orientation: int = 1) -> np.ndarray:
    """Unit normal pointing away from the region a CCW contour encloses.

    Raises ``ValueError`` where the tangent vanishes.
    """
    tan = eval_derivative(patch, t)
    norm = math.hypot(tan[0], tan[1])
    if norm < 1e-12:
        raise ValueError("normal undefined: zero tangent")
    return rotate_normal(tan / norm, orientation)


def displacements(field: ForceField, pts: np.ndarray, normals: np.ndarray,
                  params: EvolutionParams) -> tuple[np.ndarray, np.ndarray]:
    """Balloon moves for many points; returns ``(deltas, frozen)``.

    A point moves by ``step * f_diff * normal`` while ``f_diff > edge_stop``.
    Points on an edge, on the image border or outside the image are frozen
    with zero delta.
    """
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    normals = np.asarray(normals, dtype=np.float64).reshape(-1, 2)
    h, w = field.shape
    count("displacement_queries", pts.shape[0])
    fd = kernels.bilinear(field.f_diff, pts)
    border = (pts[:, 0] <= 0.0) | (pts[:, 0] >= w - 1.0) | (pts[:, 1] <= 0.0) | (pts[:, 1] >= h - 1.0)
    frozen = border | (fd <= params.edge_stop)
    deltas = params.step * fd[:, None] * normals
    deltas[frozen] = 0.0
    return deltas, frozen


def displacement_at(field: ForceField, pt, outward: np.ndarray,
                    params: EvolutionParams) -> tuple[np.ndarray, bool]:
    """Single-point form of :func:`displacements`; returns ``(delta, frozen)``."""
    d, f = displacements(field, np.asarray(pt, dtype=np.float64)[None], np.asarray(outward)[None], params)
    return d[0], bool(f[0])
