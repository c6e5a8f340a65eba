"""Patch-count control: split over-stretched patches, optionally merge tiny ones."""

from __future__ import annotations

import numpy as np

from .bezier import BezierPatch, InterpolationMap, eval_de_casteljau, eval_many, interpolate
from .freeform import FreeFormContour
from .instrument import count


def split_patch(patch: BezierPatch, imap: InterpolationMap) -> tuple[BezierPatch, BezierPatch]:
    """Halve a patch by resampling it at ``2d+1`` points and re-interpolating.

    The first half interpolates the samples at ``t_i / 2``, the second those
    at ``(1 + t_i) / 2``; the middle sample is shared.
    """
    if patch.degree != imap.degree:
        raise ValueError("patch degree does not match the interpolation map")
    nodes = np.asarray(imap.nodes)
    params = np.concatenate([nodes / 2.0, (1.0 + nodes[1:]) / 2.0])
    samples = np.array([eval_de_casteljau(patch, t) for t in params])
    d = imap.degree
    first = interpolate(imap, samples[: d + 1])
    second = interpolate(imap, samples[d:])
    # pin the shared/outer endpoints to the exact samples
    a = np.array(first.control)
    b = np.array(second.control)
    a[0], a[-1] = patch.control[0], samples[d]
    b[0], b[-1] = samples[d], patch.control[-1]
    count("splits")
    return BezierPatch(a), BezierPatch(b)


def control_diameters(ctrl: np.ndarray) -> np.ndarray:
    """Largest pairwise control-point distance of each stacked polygon."""
    diff = ctrl[:, :, None, :] - ctrl[:, None, :, :]
    return np.sqrt((diff ** 2).sum(-1)).max(axis=(1, 2))


def _rebuild(contour: FreeFormContour, new_ctrl: list[np.ndarray], origin: list[list[int]]) -> FreeFormContour:
    """New contour from per-patch polygons; ``origin[j]`` lists the new indices of old patch j."""
    d = contour.degree
    points = np.concatenate([c[:d] for c in new_ctrl], axis=0)
    order = [k for j in contour.sorted_index for k in origin[j]]
    out = FreeFormContour(points, d, sorted_index=np.array(order, dtype=np.int64))
    out.repair_index()
    return out


def split_pass(contour: FreeFormContour, imap: InterpolationMap, epsilon: float) -> FreeFormContour:
    """Split every patch whose control-point diameter exceeds ``epsilon`` (once)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    ctrl = contour.controls()
    big = control_diameters(ctrl) > epsilon
    if not big.any():
        return contour
    new_ctrl: list[np.ndarray] = []
    origin: list[list[int]] = []
    for j in range(ctrl.shape[0]):
        if big[j]:
            a, b = split_patch(BezierPatch(ctrl[j]), imap)
            origin.append([len(new_ctrl), len(new_ctrl) + 1])
            new_ctrl += [a.control, b.control]
        else:
            origin.append([len(new_ctrl)])
            new_ctrl.append(ctrl[j])
    return _rebuild(contour, new_ctrl, origin)


def merge_pass(contour: FreeFormContour, imap: InterpolationMap, epsilon_min: float) -> FreeFormContour:
    """Replace adjacent pairs of patches both smaller than ``epsilon_min`` by one patch.

    The replacement interpolates ``d+1`` samples taken uniformly over the
    union's parameter range, so the pair's outer endpoints are kept. Pairs are
    taken greedily from patch 0 and the contour never drops below 4 patches.
    """
    n = contour.n_patches
    if n <= 4:
        return contour
    ctrl = contour.controls()
    small = control_diameters(ctrl) < epsilon_min
    d = imap.degree
    nodes = np.asarray(imap.nodes)
    new_ctrl: list[np.ndarray] = []
    origin: list[list[int]] = [[] for _ in range(n)]
    remaining = n
    j = 0
    while j < n:
        if j + 1 < n and small[j] and small[j + 1] and remaining > 4:
            u = 2.0 * nodes
            first = eval_many(ctrl[j][None], u[u <= 1.0])[0]
            second = eval_many(ctrl[j + 1][None], u[u > 1.0] - 1.0)[0]
            merged = np.array(interpolate(imap, np.concatenate([first, second])).control)
            merged[0], merged[-1] = ctrl[j][0], ctrl[j + 1][-1]
            origin[j] = [len(new_ctrl)]
            new_ctrl.append(merged)
            count("merges")
            remaining -= 1
            j += 2
        else:
            origin[j] = [len(new_ctrl)]
            new_ctrl.append(ctrl[j])
            j += 1
    if remaining == n:
        return contour
    # merged partners vanish from the index
    return _rebuild(contour, new_ctrl, origin)
