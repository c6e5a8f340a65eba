"""Deterministic synthetic scenes with known ground truth.

Toy shapes are white (1.0) on black (0.0); the ground-truth mask marks the
white region, i.e. what a contour started inside the shape should fill.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SHAPES = ("disk", "blob", "blob-with-holes", "two-holes", "dumbbell")


@dataclass(frozen=True)
class Scene:
    image: np.ndarray
    truth: np.ndarray
    seed: tuple[float, float]  # a safe starting point inside the free region
    seed_radius: float


def _grid(h: int, w: int):
    yy, xx = np.mgrid[0:h, 0:w]
    return xx.astype(np.float64), yy.astype(np.float64)


def _disk(xx, yy, cx, cy, r):
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r


def toy_shape(shape: str, size: int = 256) -> Scene:
    """Binary toy image of ``shape`` on a ``size`` x ``size`` canvas."""
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}; choose from {', '.join(SHAPES)}")
    s = float(size)
    xx, yy = _grid(size, size)
    c = (s - 1) / 2.0
    seed_r = 0.05 * s
    if shape == "disk":
        truth = _disk(xx, yy, c, c, 0.4 * s)
    elif shape in ("blob", "blob-with-holes"):
        theta = np.arctan2(yy - c, xx - c)
        r = np.hypot(xx - c, yy - c)
        truth = r <= 0.36 * s * (1.0 + 0.18 * np.cos(3 * theta) + 0.08 * np.sin(5 * theta))
        if shape == "blob-with-holes":
            truth &= ~_disk(xx, yy, c + 0.2 * s, c, 0.06 * s)
    elif shape == "two-holes":
        truth = _disk(xx, yy, c, c, 0.45 * s)
        truth &= ~_disk(xx, yy, c - 0.225 * s, c, 0.075 * s)
        truth &= ~_disk(xx, yy, c + 0.225 * s, c, 0.075 * s)
    else:  # dumbbell
        truth = _disk(xx, yy, c - 0.25 * s, c, 0.2 * s) | _disk(xx, yy, c + 0.25 * s, c, 0.2 * s)
        truth |= (np.abs(yy - c) <= 0.06 * s) & (np.abs(xx - c) <= 0.3 * s)
        seed_r = 0.04 * s
        return Scene(truth.astype(np.float64), truth, (c - 0.25 * s, c), seed_r)
    return Scene(truth.astype(np.float64), truth, (c, c), seed_r)


def euler_number(mask: np.ndarray) -> int:
    """Components minus holes (8-connected foreground, 4-connected background)."""
    from scipy import ndimage

    fg = ndimage.label(mask, structure=np.ones((3, 3)))[1]
    padded = np.pad(~mask, 1, constant_values=True)
    bg = ndimage.label(padded)[1]
    return fg - (bg - 1)


def benchmark_scene(kind: str, width: int = 800, height: int = 600) -> Scene:
    """'simple': one free region with a smooth irregular boundary; 'complex': the
    same with three obstacles standing in the free space."""
    xx, yy = _grid(height, width)
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    theta = np.arctan2(yy - cy, xx - cx)
    r = np.hypot((xx - cx) / width, (yy - cy) / height)
    truth = r <= 0.42 * (1.0 + 0.12 * np.cos(2 * theta) + 0.06 * np.sin(3 * theta + 0.5))
    if kind == "complex":
        for ox, oy, rad in ((0.22, 0.0, 0.045), (-0.2, 0.12, 0.04), (0.02, -0.24, 0.035)):
            truth &= ~_disk(xx, yy, cx + ox * width, cy + oy * height, rad * width)
    elif kind != "simple":
        raise ValueError(f"unknown benchmark scene {kind!r}")
    img = np.where(truth, 0.9, 0.1)
    return Scene(img, truth, (cx, cy), 0.05 * min(width, height))


@dataclass(frozen=True)
class FreeSpaceScene:
    prev: np.ndarray
    curr: np.ndarray
    altitude: np.ndarray  # metres above ground, current-image coordinates
    free_truth: np.ndarray  # ground pixels not covered by a true obstacle
    line_mask: np.ndarray
    box_mask: np.ndarray
    seed: tuple[float, float]
    seed_radius: float


def _texture(h: int, w: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    cells = rng.random((h // 4 + 2, w // 4 + 2))
    return np.kron(cells, np.ones((4, 4)))[:h, :w]


def freespace_scene(width: int = 320, height: int = 240, box_height: float = 0.3,
                    shift: tuple[int, int] = (0, 0)) -> FreeSpaceScene:
    """Ground ellipse holding a flat painted line and a textured box.

    The previous image is the current one translated by ``-shift`` (integer
    pixels), i.e. scene content moved by ``shift`` between the two frames.
    """
    xx, yy = _grid(height, width)
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    ground = ((xx - cx) / (0.46 * width)) ** 2 + ((yy - cy) / (0.46 * height)) ** 2 <= 1.0
    line = (np.abs(xx - (cx - 0.22 * width)) <= 0.09 * width) & (np.abs(yy - (cy - 0.18 * height)) <= 4)
    box = (np.abs(xx - (cx + 0.2 * width)) <= 0.07 * width) & (np.abs(yy - (cy + 0.12 * height)) <= 0.07 * width)
    img = np.where(ground, 0.1, 0.95)
    img = np.where(line, 0.95, img)
    img = np.where(box, 0.85 + 0.15 * _texture(height, width, 7), img)
    altitude = np.where(box, box_height, 0.0)
    free = ground & ~box
    sx, sy = int(shift[0]), int(shift[1])
    prev = np.roll(img, (-sy, -sx), axis=(0, 1))
    return FreeSpaceScene(prev, img, altitude, free, line, box, (cx, cy), 0.04 * height)
