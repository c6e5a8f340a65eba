"""Image I/O (PGM/PNG), mask export, overlays and the debug force-field dump."""

from __future__ import annotations

import base64
import io
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .freeform import FreeFormContour, sample_contour

FIELD_MAGIC = b"FFDF"


class DecodeError(ValueError):
    pass


def load_gray(path) -> np.ndarray:
    """Read an 8-bit PGM (P5) or PNG as float intensities in [0, 1]."""
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("I;16", "I;16B", "I"):
                arr = np.asarray(im, dtype=np.float64) / 65535.0
            else:
                arr = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
    except (OSError, SyntaxError) as exc:
        raise DecodeError(f"cannot decode image {path}: {exc}") from exc
    return arr


def to_uint8(img: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(img, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def save_gray(img: np.ndarray, path) -> None:
    """Write intensities in [0, 1] as 8-bit PNG, or PGM when the suffix is .pgm."""
    fmt = "PPM" if str(path).lower().endswith((".pgm", ".pnm")) else "PNG"
    Image.fromarray(to_uint8(img), mode="L").save(path, format=fmt)


def save_mask(mask: np.ndarray, path) -> None:
    """8-bit PNG, 255 inside and 0 outside."""
    Image.fromarray(np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8), mode="L").save(path, format="PNG")


def load_mask(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("L")) > 127


def _png_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def _path_data(contour: FreeFormContour) -> list[str]:
    """One SVG path string per patch; cubic patches map to native ``C`` segments."""
    out = []
    if contour.degree == 3:
        for c in contour.controls():
            (x0, y0), (x1, y1), (x2, y2), (x3, y3) = c.tolist()
            out.append(f"M {x0:.3f} {y0:.3f} C {x1:.3f} {y1:.3f} {x2:.3f} {y2:.3f} {x3:.3f} {y3:.3f}")
    else:
        from .bezier import eval_many

        dense = eval_many(contour.controls(), np.linspace(0.0, 1.0, 33))
        for poly in dense:
            pts = " ".join(f"{x:.3f} {y:.3f}" for x, y in poly)
            out.append(f"M {pts.split(' ', 2)[0]} {pts.split(' ', 2)[1]} L {pts}")
    return out


COLORS = ("#ff0000", "#00c000", "#0080ff", "#ff9900", "#cc00cc")


def render_svg(img: np.ndarray, components, path=None) -> str:
    """SVG with the image embedded and one ``<path>`` per patch."""
    h, w = np.asarray(img).shape[:2]
    b64 = base64.b64encode(_png_bytes(to_uint8(img))).decode("ascii")
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<image width="{w}" height="{h}" xlink:href="data:image/png;base64,{b64}"/>',
    ]
    for k, comp in enumerate(components):
        color = COLORS[0] if k == 0 else COLORS[1 + (k - 1) % (len(COLORS) - 1)]
        lines.append(f'<g id="component-{k}" fill="none" stroke="{color}" stroke-width="1.5">')
        lines += [f'<path d="{d}"/>' for d in _path_data(comp)]
        lines.append("</g>")
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def overlay_rgb(img: np.ndarray, components, samples_per_patch: int = 64) -> np.ndarray:
    """RGB copy of ``img`` with contour samples drawn in red (inner ones in green/blue/...)."""
    g = to_uint8(img)
    rgb = np.stack([g, g, g], axis=-1)
    h, w = g.shape
    for k, comp in enumerate(components):
        hexc = COLORS[0] if k == 0 else COLORS[1 + (k - 1) % (len(COLORS) - 1)]
        color = [int(hexc[i : i + 2], 16) for i in (1, 3, 5)]
        pts = sample_contour(comp, samples_per_patch)
        # densify so consecutive samples are < 1 px apart
        nxt = np.roll(pts, -1, axis=0)
        steps = int(np.ceil(np.hypot(*(nxt - pts).T).max())) + 1 if len(pts) else 1
        u = np.linspace(0.0, 1.0, steps, endpoint=False)[:, None, None]
        dense = (pts[None] * (1 - u) + nxt[None] * u).reshape(-1, 2)
        x = np.rint(dense[:, 0]).astype(int)
        y = np.rint(dense[:, 1]).astype(int)
        ok = (x >= 0) & (x < w) & (y >= 0) & (y < h)
        rgb[y[ok], x[ok]] = color
    return rgb


def render_overlay(img: np.ndarray, components, svg_path=None, png_path=None) -> tuple[str, np.ndarray]:
    """Write the SVG and/or PNG overlay; returns (svg text, RGB array)."""
    components = list(components)
    svg = render_svg(img, components, svg_path)
    rgb = overlay_rgb(img, components)
    if png_path is not None:
        Image.fromarray(rgb).save(png_path, format="PNG")
    return svg, rgb


def dump_force_field(fld, path) -> None:
    """Raw float32 dump: magic, uint32 width, height, then f_edge and f_diff rows."""
    h, w = fld.shape
    with open(path, "wb") as fh:
        fh.write(FIELD_MAGIC + struct.pack("<II", w, h))
        fh.write(np.ascontiguousarray(fld.f_edge, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(fld.f_diff, dtype="<f4").tobytes())


def read_force_field_dump(path) -> tuple[np.ndarray, np.ndarray]:
    data = Path(path).read_bytes()
    if data[:4] != FIELD_MAGIC:
        raise DecodeError("not a force-field dump")
    w, h = struct.unpack("<II", data[4:12])
    arr = np.frombuffer(data[12:], dtype="<f4")
    if arr.size != 2 * w * h:
        raise DecodeError("truncated force-field dump")
    return arr[: w * h].reshape(h, w), arr[w * h :].reshape(h, w)
