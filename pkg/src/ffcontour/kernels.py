"""Backend selection for the hot kernels.

The compiled extension (``_ckernels``) is used when it was built; otherwise
the numpy fallback is used. Set ``FFCONTOUR_KERNELS=python`` to force the
fallback. Callers must go through this module's attributes (``kernels.fn``)
so that :func:`use_backend` takes effect everywhere.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

KERNEL_NAMES = (
    "eval_patches",
    "bilinear",
    "box_inter",
    "insertion_repair",
    "sweep_candidates",
    "orient2d",
    "segments_cross",
    "polygons_intersect",
    "pairs_intersect",
    "crossing_params",
    "pairs_crossing",
)

BACKEND = "python"


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _ckernels is not None else [])


def use_backend(name: str) -> str:
    """Bind the kernel functions of ``name`` ('compiled', 'python' or 'auto')."""
    global BACKEND
    if name == "auto":
        name = "compiled" if _ckernels is not None else "python"
    if name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        mod = _ckernels
    elif name == "python":
        mod = _kernels_py
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    g = globals()
    for fn in KERNEL_NAMES:
        g[fn] = getattr(mod, fn)
    BACKEND = name
    return name


use_backend(os.environ.get("FFCONTOUR_KERNELS", "auto"))
