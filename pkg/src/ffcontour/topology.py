"""Self-intersection detection and the flip operator.

Detection is two-staged: the sorted bounding boxes are swept in ``x`` to get
non-successive candidate pairs, then the control polygons of each candidate
are tested for a proper crossing. A crossing pair is flipped: the first half
of each control polygon is glued to the second half of the other, which cuts
the contour into two closed components.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bezier import BezierPatch, build_interpolation_map, eval_many
from .freeform import ContourError, FreeFormContour, signed_area
from .instrument import count


class TopologyError(ContourError):
    pass


@dataclass(frozen=True, order=True)
class IntersectionCandidate:
    patch_i: int
    patch_j: int

    def __post_init__(self):
        if not self.patch_i < self.patch_j:
            raise ValueError("candidate needs patch_i < patch_j")


@dataclass
class ComponentSet:
    outer: FreeFormContour
    inner: list[FreeFormContour] = field(default_factory=list)

    def all(self) -> list[FreeFormContour]:
        return [self.outer, *self.inner]

    def __len__(self) -> int:
        return 1 + len(self.inner)

    @property
    def n_patches(self) -> int:
        return sum(c.n_patches for c in self.all())


def box_inter(b1, b2) -> bool:
    """Box filter; boxes are ``[x_min, y_min, x_max, y_max]``.

    Rejects only on the x-axis (with a y test when the x-ranges merely
    touch), which is what the x-sorted sweep needs; the sweep adds the plain
    y-overlap test afterwards.
    """
    return bool(kernels.box_inter(np.asarray(b1, dtype=np.float64), np.asarray(b2, dtype=np.float64)))


def _control(p) -> np.ndarray:
    return np.asarray(getattr(p, "control", p), dtype=np.float64)


def polygons_intersect(a, b) -> bool:
    """True iff a segment of ``a``'s control polygon properly crosses one of ``b``'s."""
    count("polygon_tests")
    return bool(kernels.polygons_intersect(_control(a), _control(b)))


def _check_index(contour: FreeFormContour) -> None:
    if not contour.index_is_sorted():
        raise ContourError("stale sorted_index: repair or rebuild it before sweeping")


def _candidate_pairs(contour: FreeFormContour) -> np.ndarray:
    _check_index(contour)
    pairs, tests = kernels.sweep_candidates(np.ascontiguousarray(contour.boxes()),
                                            np.ascontiguousarray(contour.sorted_index))
    count("box_tests", tests)
    return pairs


def find_candidates(contour: FreeFormContour) -> list[IntersectionCandidate]:
    """Non-successive patch pairs whose boxes overlap, in ``(i, j)`` order."""
    return [IntersectionCandidate(int(i), int(j)) for i, j in _candidate_pairs(contour)]


def crossing_params(a, b, depth: int) -> tuple[float, float] | None:
    """Locate a crossing after ``depth`` rounds of midpoint subdivision.

    Returns the centres ``(s, t)`` of the first pair of sub-intervals of
    ``a`` and ``b`` whose control polygons cross, or None. ``depth=0`` is the
    plain polygon test and answers ``(0.5, 0.5)``. Deeper rounds hug the
    curves more tightly, so strongly bent patches whose polygons overlap
    while the curves stay apart are no longer reported.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    found, s, t = kernels.crossing_params(_control(a), _control(b), int(depth))
    return (s, t) if found else None


def curves_cross(a, b, depth: int) -> bool:
    """Whether :func:`crossing_params` finds a crossing at ``depth``."""
    return crossing_params(a, b, depth) is not None


def intersecting_pairs(contour: FreeFormContour, confirm_depth: int = 0) -> list[IntersectionCandidate]:
    """Candidates whose control polygons really cross.

    With ``confirm_depth > 0`` each hit is re-checked with :func:`curves_cross`.
    """
    pairs = _candidate_pairs(contour)
    if pairs.shape[0] == 0:
        return []
    count("polygon_tests", pairs.shape[0])
    ctrl = np.ascontiguousarray(contour.controls())
    hit = kernels.pairs_intersect(ctrl, pairs)
    if confirm_depth > 0 and hit.any():
        hit[hit] = kernels.pairs_crossing(ctrl, pairs[hit], int(confirm_depth))[0]
    return [IntersectionCandidate(int(i), int(j)) for i, j in pairs[hit]]


def _junction(first: np.ndarray, s: float, second: np.ndarray, t: float) -> np.ndarray:
    """Patch interpolating ``first`` on ``[0, s]`` followed by ``second`` on ``[t, 1]``."""
    d = first.shape[0] - 1
    imap = build_interpolation_map(d)
    samples = np.empty((d + 1, 2))
    for m, u in enumerate(imap.nodes):
        if u <= 0.5:
            samples[m] = eval_many(first[None], [2.0 * u * s])[0, 0]
        else:
            samples[m] = eval_many(second[None], [t + (2.0 * u - 1.0) * (1.0 - t)])[0, 0]
    samples[0], samples[-1] = first[0], second[-1]
    count("interpolations")
    ctrl = imap.v_inv @ samples
    ctrl[0], ctrl[-1] = first[0], second[-1]
    return ctrl


def flip(contour: FreeFormContour, cand: IntersectionCandidate,
         at: tuple[float, float] | None = None) -> ComponentSet:
    """Reconnect crossing patches ``i < j`` and split the contour in two.

    With ``k = d // 2``, the new patches are ``[P_0..P_k of i, P_k+1..P_d of j]``,
    which closes the chain ``j+1 .. i-1``, and ``[P_0..P_k of j, P_k+1..P_d of i]``,
    which closes the chain ``i+1 .. j-1``. Control points are only reordered,
    so the patch count is conserved. The component with the larger absolute
    area is returned as ``outer``; both get a fresh box index.

    When the crossing parameters ``at = (s, t)`` on patches ``i`` and ``j``
    are given, each new patch instead interpolates the curve it replaces:
    ``i`` up to ``s`` then ``j`` from ``t`` on, and ``j`` up to ``t`` then
    ``i`` from ``s`` on. The end points, and so closure, are the same.
    """
    n, d = contour.n_patches, contour.degree
    i, j = cand.patch_i, cand.patch_j
    if not 0 <= i < j < n:
        raise ValueError(f"candidate {cand} out of range for {n} patches")
    if j - i == 1 or j - i == n - 1:
        raise ValueError("successive patches cannot be flipped")
    c = contour.controls()
    if at is None:
        k = d // 2
        gi = np.concatenate([c[i][: k + 1], c[j][k + 1 :]])
        gj = np.concatenate([c[j][: k + 1], c[i][k + 1 :]])
    else:
        s, t = at
        gi = _junction(c[i], s, c[j], t)
        gj = _junction(c[j], t, c[i], s)
    chain_a = [gi] + [c[m] for m in range(j + 1, n)] + [c[m] for m in range(0, i)]
    chain_b = [gj] + [c[m] for m in range(i + 1, j)]
    a = FreeFormContour(np.concatenate([p[:d] for p in chain_a]), d)
    b = FreeFormContour(np.concatenate([p[:d] for p in chain_b]), d)
    count("flips")
    if abs(signed_area(b)) > abs(signed_area(a)):
        a, b = b, a
    return ComponentSet(a, [b])


def resolve_topology(contour: FreeFormContour, max_flips: int | None = None,
                     confirm_depth: int = 0, resample: bool = False) -> ComponentSet:
    """Flip until no component has crossing non-successive control polygons.

    Every flip strictly shrinks the component it acts on, so at most ``N``
    flips can happen; ``max_flips`` (default ``N``) guards that bound.
    ``confirm_depth`` is passed on to :func:`intersecting_pairs`; with
    ``resample`` the flips rebuild the two junction patches through the
    located crossing instead of reordering control points.
    """
    cap = contour.n_patches if max_flips is None else max_flips
    work = [contour]
    done: list[FreeFormContour] = []
    flips = 0
    while work:
        comp = work.pop()
        hits = intersecting_pairs(comp, confirm_depth)
        if not hits:
            done.append(comp)
            continue
        flips += 1
        if flips > cap:
            raise TopologyError(
                f"more than {cap} flips while resolving a {contour.n_patches}-patch contour; "
                f"{len(work) + 1} components still pending, first crossing {hits[0]}"
            )
        at = None
        if resample:
            ctrl = comp.controls()
            at = crossing_params(ctrl[hits[0].patch_i], ctrl[hits[0].patch_j], confirm_depth)
        parts = flip(comp, hits[0], at)
        work.extend([parts.inner[0], parts.outer])
    if len(done) == 1:
        return ComponentSet(done[0], [])
    areas = [abs(signed_area(c)) for c in done]
    k = int(np.argmax(areas))
    return ComponentSet(done[k], done[:k] + done[k + 1 :])
