"""Bezier patches: evaluation, interpolation through samples and deformation.

Control polygons are ``(d+1, 2)`` float arrays. The interpolation matrix of a
subdivision ``0 = t_0 < ... < t_d = 1`` holds the Bernstein basis evaluated
at the nodes; its inverse maps ``d+1`` curve samples to control points and
is built once per ``(d, nodes)`` pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .instrument import count


@dataclass(frozen=True, eq=False)
class BezierPatch:
    """Immutable control polygon ``P_0..P_d`` of a planar Bezier curve."""

    control: np.ndarray

    def __post_init__(self):
        arr = np.array(self.control, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
            raise ValueError(f"control polygon must have shape (d+1, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("control points must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "control", arr)

    @property
    def degree(self) -> int:
        return self.control.shape[0] - 1

    def __len__(self) -> int:
        return self.control.shape[0]

    def __eq__(self, other):
        if not isinstance(other, BezierPatch):
            return NotImplemented
        return np.array_equal(self.control, other.control)

    def reversed(self) -> "BezierPatch":
        return BezierPatch(self.control[::-1])


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"parameter t={t} outside [0, 1]")
    return t


def bernstein(d: int, i: int, t: float) -> float:
    """Bernstein basis polynomial ``C(d, i) t^i (1-t)^(d-i)``."""
    if d < 0 or not 0 <= i <= d:
        raise ValueError(f"basis index i={i} outside [0, {d}]")
    t = _check_t(t)
    return math.comb(d, i) * t**i * (1.0 - t) ** (d - i)


def eval_de_casteljau(patch: BezierPatch, t: float) -> np.ndarray:
    """Point of ``patch`` at parameter ``t`` by repeated linear interpolation."""
    t = _check_t(t)
    count("evaluations")
    return kernels.eval_patches(patch.control[None], np.array([t]))[0, 0]


def eval_bernstein(patch: BezierPatch, t: float) -> np.ndarray:
    """Point of ``patch`` at ``t`` as the Bernstein-weighted sum of control points."""
    t = _check_t(t)
    d = patch.degree
    w = np.array([bernstein(d, i, t) for i in range(d + 1)])
    return w @ patch.control


def eval_many(ctrl: np.ndarray, ts: Sequence[float]) -> np.ndarray:
    """Evaluate stacked control polygons ``(n, d+1, 2)`` at ``ts``; returns ``(n, k, 2)``."""
    ctrl = np.asarray(ctrl, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    count("evaluations", ctrl.shape[0] * ts.size)
    return kernels.eval_patches(ctrl, ts)


def hodograph(ctrl: np.ndarray) -> np.ndarray:
    """Control points ``d (P_{i+1} - P_i)`` of the derivative curve(s).

    Works on a single polygon ``(d+1, 2)`` or a stack ``(n, d+1, 2)``. A
    degree-0 input yields a single zero control point.
    """
    ctrl = np.asarray(ctrl, dtype=np.float64)
    d = ctrl.shape[-2] - 1
    if d == 0:
        return np.zeros_like(ctrl)
    return d * (ctrl[..., 1:, :] - ctrl[..., :-1, :])


def eval_derivative(patch: BezierPatch, t: float) -> np.ndarray:
    """Tangent vector ``dB/dt``; the zero vector for a degree-0 patch."""
    t = _check_t(t)
    if patch.degree == 0:
        return np.zeros(2)
    count("evaluations")
    return kernels.eval_patches(hodograph(patch.control)[None], np.array([t]))[0, 0]


def uniform_nodes(d: int) -> tuple[float, ...]:
    """The subdivision ``t_i = i / d``."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return tuple(i / d for i in range(d + 1))


def check_nodes(d: int, nodes: Sequence[float]) -> tuple[float, ...]:
    nodes = tuple(float(t) for t in nodes)
    if len(nodes) != d + 1:
        raise ValueError(f"need {d + 1} nodes for degree {d}, got {len(nodes)}")
    if nodes[0] != 0.0 or nodes[-1] != 1.0:
        raise ValueError("subdivision must start at 0 and end at 1")
    if any(b <= a for a, b in zip(nodes, nodes[1:])):
        raise ValueError("subdivision must be strictly increasing")
    return nodes


@dataclass(frozen=True, eq=False)
class InterpolationMap:
    """Bernstein collocation matrix ``v`` of a subdivision and its inverse."""

    degree: int
    nodes: tuple[float, ...]
    v: np.ndarray
    v_inv: np.ndarray


def collocation_matrix(d: int, nodes: Sequence[float]) -> np.ndarray:
    """Row ``k`` holds ``b_{d,i}(t_k)`` for ``i = 0..d``."""
    return np.array([[bernstein(d, i, t) for i in range(d + 1)] for t in nodes])


@lru_cache(maxsize=None)
def _cached_map(d: int, nodes: tuple[float, ...]) -> InterpolationMap:
    count("interpolation_map_builds")
    v = collocation_matrix(d, nodes)
    # Bernstein-Vandermonde conditioning degrades quickly with d; d <= 8 is fine.
    if np.linalg.cond(v) > 1e12:
        raise np.linalg.LinAlgError(f"collocation matrix for d={d} is numerically singular")
    v_inv = np.linalg.inv(v)
    v.flags.writeable = False
    v_inv.flags.writeable = False
    return InterpolationMap(d, nodes, v, v_inv)


def build_interpolation_map(d: int, nodes: Sequence[float] | None = None) -> InterpolationMap:
    """Return the (cached) interpolation map of degree ``d``; uniform nodes by default."""
    nodes = uniform_nodes(d) if nodes is None else check_nodes(d, nodes)
    return _cached_map(int(d), nodes)


def _as_points(samples, n: int, what: str) -> np.ndarray:
    arr = np.asarray(samples, dtype=np.float64)
    if arr.shape != (n, 2):
        raise ValueError(f"expected {n} {what} of shape ({n}, 2), got {arr.shape}")
    return arr


def interpolate(imap: InterpolationMap, samples) -> BezierPatch:
    """Patch passing through ``samples[i]`` at ``t_i`` (control = V^-1 M)."""
    m = _as_points(samples, imap.degree + 1, "samples")
    count("interpolations")
    return BezierPatch(imap.v_inv @ m)


def deform(imap: InterpolationMap, patch: BezierPatch, deltas) -> BezierPatch:
    """Move the curve's node samples by ``deltas``: control += V^-1 dM."""
    dm = _as_points(deltas, imap.degree + 1, "deltas")
    if patch.degree != imap.degree:
        raise ValueError("patch degree does not match the interpolation map")
    count("interpolations")
    return BezierPatch(patch.control + imap.v_inv @ dm)


def deform_many(imap: InterpolationMap, ctrl: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Batch :func:`deform` on stacked polygons; returns the new ``(n, d+1, 2)`` stack."""
    count("interpolations", ctrl.shape[0])
    return ctrl + np.einsum("ij,njk->nik", imap.v_inv, deltas)
