"""The deformation loop: split, flip, sample, move nodes, deform patches."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .bezier import InterpolationMap, build_interpolation_map, eval_many, hodograph
from .forces import EvolutionParams, ForceField, displacements, rotate_normal
from .freeform import FreeFormContour, orient_ccw, signed_area
from .instrument import count
from .refine import merge_pass, split_pass
from .topology import ComponentSet, resolve_topology

log = logging.getLogger(__name__)


@dataclass
class EvolutionState:
    components: ComponentSet
    iteration: int = 0
    frozen_fraction: float = 0.0
    least_frozen: float = 0.0  # smallest per-component frozen fraction
    frozen: list[np.ndarray] = field(default_factory=list)  # per component, per patch
    orientation: int = 1
    max_move: float = math.inf
    quiet_iters: int = 0
    converged: bool = False
    flips: int = 0
    dropped: int = 0

    @property
    def n_patches(self) -> int:
        return self.components.n_patches


def initial_state(contour: FreeFormContour) -> EvolutionState:
    """Start state with the contour normalized to CCW orientation."""
    c = orient_ccw(contour).copy()
    c.rebuild_index()
    return EvolutionState(ComponentSet(c, []))


def _keep_inner(c: FreeFormContour, orientation: int, min_area: float) -> bool:
    # Pieces turning the same way as the start contour bound doubly swept
    # regions (fold artefacts); holes turn the other way.
    a = signed_area(c) * orientation
    return a < 0 and -a >= min_area


def _restructure(state: EvolutionState, imap: InterpolationMap, params: EvolutionParams
                 ) -> tuple[ComponentSet, int, int]:
    comps = [c.copy() for c in state.components.all()]
    if params.refine:
        comps = [split_pass(c, imap, params.split_eps) for c in comps]
        if params.merge_eps:
            comps = [merge_pass(c, imap, params.merge_eps) for c in comps]
    if not params.topology:
        return ComponentSet(comps[0], comps[1:]), 0, 0
    flips = 0
    resolved = []
    for c in comps:
        cs = resolve_topology(c, confirm_depth=params.confirm_depth, resample=params.resample_flips)
        flips += len(cs) - 1
        resolved.append(cs)
    outer = resolved[0].outer
    pieces = resolved[0].inner + [p for cs in resolved[1:] for p in cs.all()]
    inner = [p for p in pieces if _keep_inner(p, state.orientation, params.min_component_area)]
    return ComponentSet(outer, inner), flips, len(pieces) - len(inner)


def _deform_component(c: FreeFormContour, fld: ForceField, imap: InterpolationMap,
                      params: EvolutionParams, orientation: int) -> tuple[np.ndarray, float]:
    """Move one component in place; returns (per-node frozen flags, largest move)."""
    n, d = c.n_patches, c.degree
    ctrl = c.controls()
    nodes = eval_many(ctrl, imap.nodes)
    tan = eval_many(hodograph(ctrl), imap.nodes)
    norm = np.hypot(tan[..., 0], tan[..., 1])
    valid = norm > 1e-12
    unit = np.where(valid[..., None], tan / np.where(valid, norm, 1.0)[..., None], 0.0)
    normals = rotate_normal(unit, orientation)
    deltas, frozen = displacements(fld, nodes.reshape(-1, 2), normals.reshape(-1, 2), params)
    deltas = deltas.reshape(n, d + 1, 2)
    frozen = frozen.reshape(n, d + 1)
    deltas[~valid] = 0.0

    # a shared node gets the mean of the moves its two patches ask for
    w_end = valid[:, -1].astype(float)
    w_start = np.roll(valid[:, 0], -1).astype(float)
    shared = (deltas[:, -1] * w_end[:, None] + np.roll(deltas[:, 0], -1, axis=0) * w_start[:, None])
    shared /= np.maximum(w_end + w_start, 1.0)[:, None]
    deltas[:, -1] = shared
    deltas[:, 0] = np.roll(shared, 1, axis=0)

    # keep the nodes inside the image
    h, w = fld.shape
    target = nodes + deltas
    target[..., 0] = np.clip(target[..., 0], 0.0, w - 1.0)
    target[..., 1] = np.clip(target[..., 1], 0.0, h - 1.0)
    deltas = target - nodes

    count("interpolations", n)
    dp = np.einsum("ij,njk->nik", imap.v_inv, deltas)
    pts = c.points.reshape(n, d, 2)
    pts[:, 0] += deltas[:, 0]
    pts[:, 1:] += dp[:, 1:d]
    c.repair_index()
    move = float(np.hypot(deltas[..., 0], deltas[..., 1]).max()) if n else 0.0
    return frozen, move


def evolve_step(state: EvolutionState, fld: ForceField, imap: InterpolationMap,
                params: EvolutionParams) -> EvolutionState:
    """One outer iteration: split pass, topology pass, then node moves and deformation."""
    comps, flips, dropped = _restructure(state, imap, params)
    frozen_patches = []
    n_frozen = n_nodes = 0
    max_move = 0.0
    least = 1.0
    for c in comps.all():
        frozen, move = _deform_component(c, fld, imap, params, state.orientation)
        frozen_patches.append(frozen.all(axis=1))
        # each node once: the last one of a patch is the first of the next
        n_frozen += int(frozen[:, :-1].sum())
        n_nodes += frozen[:, :-1].size
        least = min(least, float(frozen[:, :-1].mean()) if frozen.size else 1.0)
        max_move = max(max_move, move)
    count("iterations")
    return replace(
        state,
        components=comps,
        iteration=state.iteration + 1,
        frozen=frozen_patches,
        frozen_fraction=n_frozen / n_nodes if n_nodes else 1.0,
        least_frozen=least,
        max_move=max_move,
        quiet_iters=state.quiet_iters + 1 if max_move < params.move_eps else 0,
        flips=state.flips + flips,
        dropped=state.dropped + dropped,
    )


def run(contour: FreeFormContour, fld: ForceField, params: EvolutionParams | None = None,
        on_iteration: Callable[[EvolutionState], None] | None = None) -> EvolutionState:
    """Evolve until almost every node is frozen or nothing moves any more.

    Stops when ``frozen_fraction >= steady_fraction`` holds for every
    component on its own (a small loop still shrinking in a flat region must
    not be hidden by a large settled one), or when no node moved
    more than ``move_eps`` for 3 consecutive iterations, or after
    ``max_iters`` iterations (then ``converged`` stays False). A run whose
    patch count exceeds ``max_patches`` is also stopped unconverged.
    """
    params = params or EvolutionParams()
    if params.samples_per_patch not in (None, contour.degree + 1):
        raise ValueError("deformation samples exactly the d+1 interpolation nodes of each patch")
    imap = build_interpolation_map(contour.degree)
    state = initial_state(contour)
    while state.iteration < params.max_iters:
        state = evolve_step(state, fld, imap, params)
        if on_iteration is not None:
            on_iteration(state)
        if state.least_frozen >= params.steady_fraction or state.quiet_iters >= 3:
            state.converged = True
            break
        if state.n_patches > params.max_patches:
            log.warning("evolution stopped: %d patches exceed max_patches=%d",
                        state.n_patches, params.max_patches)
            return state
    if not state.converged:
        log.warning("evolution stopped at max_iters=%d without converging", params.max_iters)
    return state
