"""Command-line front end: ``ffcontour synth|segment|freespace|bench``.

Exit codes: 0 success, 1 the evolution did not converge, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .config import Config, ConfigError, apply_overrides, dump_config, load_config
from .evolve import EvolutionState, run
from .forces import build_force_field
from .freeform import ContourError, make_circle_contour, rasterize_region
from .freespace import ImagePair, RasterAltitude, TableAltitude, segment_free_space
from .imaging import DecodeError, dump_force_field, load_gray, render_overlay, save_gray, save_mask
from .synth import SHAPES, freespace_scene, toy_shape

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_INPUT = 0, 1, 2

log = logging.getLogger("ffcontour")


class InputError(Exception):
    pass


def _config(args) -> Config:
    cfg = load_config(args.config) if getattr(args, "config", None) else Config()
    return apply_overrides(cfg, getattr(args, "set", None) or [])


def _load(path) -> np.ndarray:
    if not Path(path).is_file():
        raise InputError(f"no such file: {path}")
    return load_gray(path)


def contours_document(state: EvolutionState) -> str:
    """Deterministic JSON of the final components (outer first)."""
    doc = {
        "converged": state.converged,
        "iterations": state.iteration,
        "components": [dict(c.to_dict(), role="outer" if k == 0 else "inner")
                       for k, c in enumerate(state.components.all())],
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


# --- subcommands -----------------------------------------------------------------

def cmd_synth(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.shape == "freespace-pair":
        sc = freespace_scene()
        save_gray(sc.curr, out)
        save_gray(sc.prev, out.with_name(out.stem + "_prev.png"))
        save_mask(sc.free_truth, out.with_name(out.stem + "_truth.png"))
        ys, xs = np.mgrid[0 : sc.altitude.shape[0], 0 : sc.altitude.shape[1]]
        rows = np.stack([xs.ravel(), ys.ravel(), sc.altitude.ravel()], axis=1)
        with open(out.with_name(out.stem + "_altitude.csv"), "w", encoding="utf-8") as fh:
            fh.write("x,y,altitude_m\n")
            fh.writelines(f"{int(x)},{int(y)},{a:g}\n" for x, y, a in rows)
        return EXIT_OK
    sc = toy_shape(args.shape, args.size)
    save_gray(sc.image, out)
    save_mask(sc.truth, Path(args.truth) if args.truth else out.with_name(out.stem + "_truth.png"))
    return EXIT_OK


def _snapshotter(img, out_dir: Path, every: int):
    if every <= 0:
        return None
    snap_dir = out_dir / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)

    def emit(state: EvolutionState) -> None:
        if state.iteration % every:
            return
        stem = snap_dir / f"iter_{state.iteration:05d}"
        stem.with_suffix(".json").write_text(contours_document(state), encoding="utf-8")
        render_overlay(img, state.components.all(), png_path=stem.with_suffix(".png"))

    return emit


def cmd_segment(args) -> int:
    cfg = _config(args)
    img = _load(args.image)
    h, w = img.shape
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fld = build_force_field(img, cfg.sigma, cfg.p, cfg.gain, cfg.canny())
    if args.dump_field:
        dump_force_field(fld, args.dump_field)
    center, radius = cfg.seed(w, h)
    contour = make_circle_contour(center, radius, cfg.n_patches, cfg.degree)
    every = args.snapshot_every if args.snapshot_every is not None else cfg.snapshot_every
    state = run(contour, fld, cfg.evolution(), on_iteration=_snapshotter(img, out, every))
    comps = state.components.all()
    save_mask(rasterize_region(comps, w, h), out / "mask.png")
    render_overlay(img, comps, svg_path=out / "overlay.svg", png_path=out / "overlay.png")
    (out / "contour.json").write_text(contours_document(state), encoding="utf-8")
    report = {
        "converged": state.converged,
        "iterations": state.iteration,
        "initial_points": cfg.n_patches,
        "final_points": state.n_patches,
        "components": len(comps),
        "flips": state.flips,
        "frozen_fraction": state.frozen_fraction,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK if state.converged else EXIT_NOT_CONVERGED


def _oracle(path):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    if p.suffix == ".npy":
        return RasterAltitude(np.load(p))
    return TableAltitude.from_csv(p)


def cmd_freespace(args) -> int:
    cfg = _config(args)
    pair = ImagePair(_load(args.prev), _load(args.curr))
    oracle = _oracle(args.altitudes)
    h, w = pair.shape
    center, radius = cfg.seed(w, h)
    res = segment_free_space(pair, center, radius, oracle, cfg.eps_alt, cfg.evolution(),
                             cfg.n_patches, cfg.degree, cfg.sigma, cfg.p, cfg.gain, cfg.canny(),
                             cfg.matching())
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_mask(res.free_space_mask, out / "free_space.png")
    res.write_report(out / "report.json")
    render_overlay(pair.curr, [res.outer, *res.retained_obstacles], svg_path=out / "overlay.svg",
                   png_path=out / "overlay.png")
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_bench(args) -> int:
    cfg = _config(args)
    if args.repeats is not None:
        cfg = apply_overrides(cfg, [("repeats", args.repeats)])
    kinds = [k.strip() for k in args.suite.split(",") if k.strip()]
    for k in kinds:
        if k not in ("simple", "complex"):
            raise InputError(f"unknown suite scene {k!r}; choose simple and/or complex")
    rows = bench.run_suite(kinds, cfg)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            bench.write_csv(rows, fh)
    else:
        bench.write_csv(rows, sys.stdout)
    if args.scaling:
        r = bench.scaling_probe(args.scaling_n)
        print(f"scaling N={r.n}: op ratio {r.op_ratio:.3f}, time ratio {r.time_ratio:.3f} "
              f"({r.time_n_ms:.1f} ms vs {r.time_2n_ms:.1f} ms)")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file (see --print-config)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ffcontour", description=__doc__.splitlines()[0])
    ap.add_argument("--print-config", action="store_true", help="print every config key with its default and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("synth", help="write a synthetic test image and its ground-truth mask")
    p.add_argument("shape", choices=(*SHAPES, "freespace-pair"))
    p.add_argument("--size", type=int, default=256, help="canvas side in pixels (toy shapes)")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--truth", help="ground-truth mask path (default <out>_truth.png)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("segment", help="grow a contour on one image")
    p.add_argument("image", help="PGM or PNG grayscale image")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dump-field", metavar="PATH", help="write the raw f_edge/f_diff dump")
    p.add_argument("--snapshot-every", type=int, metavar="K", help="contour JSON + overlay PNG every K iterations")
    _add_config_args(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("freespace", help="free-space mask from an image pair with false-obstacle rejection")
    p.add_argument("prev", help="previous image")
    p.add_argument("curr", help="current image")
    p.add_argument("--altitudes", required=True, help="CSV x,y,altitude_m or an .npy altitude raster")
    p.add_argument("--out-dir", required=True)
    _add_config_args(p)
    p.set_defaults(func=cmd_freespace)

    p = sub.add_parser("bench", help="benchmark the synthetic 800x600 scenes")
    p.add_argument("--suite", default="simple,complex", help="comma-separated scene kinds")
    p.add_argument("--repeats", type=int, help="runs per scene (median reported)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--scaling", action="store_true", help="also run the N vs 2N flip-free probe")
    p.add_argument("--scaling-n", type=int, default=1000)
    _add_config_args(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.print_config:
        sys.stdout.write(dump_config())
        return EXIT_OK
    if args.command is None:
        ap.print_help()
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ConfigError, DecodeError, ContourError, ValueError, OSError) as exc:
        print(f"ffcontour: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
