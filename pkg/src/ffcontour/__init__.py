"""Free-form active contours: closed piecewise Bezier curves grown over an
image, with exact patch splitting, topology changes by patch flips, and
free-space extraction with false-obstacle rejection."""

from .bezier import (
    BezierPatch,
    InterpolationMap,
    build_interpolation_map,
    deform,
    eval_bernstein,
    eval_de_casteljau,
    eval_derivative,
    interpolate,
)
from .config import Config, ConfigError, load_config
from .evolve import EvolutionState, evolve_step, run
from .forces import EvolutionParams, ForceField, build_force_field, displacement_at
from .freeform import (
    ContourError,
    FreeFormContour,
    make_circle_contour,
    rasterize_region,
    sample_contour,
    signed_area,
)
from .freespace import (
    ImagePair,
    MatchParams,
    RasterAltitude,
    TableAltitude,
    classify_component,
    segment_free_space,
)
from .imaging import DecodeError, load_gray, render_overlay, save_mask
from .kernels import available_backends, use_backend
from .refine import merge_pass, split_pass, split_patch
from .topology import ComponentSet, box_inter, flip, polygons_intersect, resolve_topology

__version__ = "0.1.0"

__all__ = [
    "BezierPatch", "InterpolationMap", "build_interpolation_map", "deform", "eval_bernstein",
    "eval_de_casteljau", "eval_derivative", "interpolate", "Config", "ConfigError", "load_config",
    "EvolutionState", "evolve_step", "run", "EvolutionParams", "ForceField", "build_force_field",
    "displacement_at", "ContourError", "FreeFormContour", "make_circle_contour", "rasterize_region",
    "sample_contour", "signed_area", "ImagePair", "MatchParams", "RasterAltitude", "TableAltitude",
    "classify_component", "segment_free_space", "DecodeError", "load_gray", "render_overlay",
    "save_mask", "available_backends", "use_backend", "merge_pass", "split_pass", "split_patch",
    "ComponentSet", "box_inter", "flip", "polygons_intersect", "resolve_topology",
]
