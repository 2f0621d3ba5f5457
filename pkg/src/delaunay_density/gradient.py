"""Gradients of the Delaunay interpolant.

The interpolant is affine on each simplex, so its gradient there is a single
vector.  It is recovered from the right-singular vectors of the centered
lifted-vertex matrix: the graph of an affine function over a nondegenerate
simplex spans a d-dimensional flat in R^{d+1}, whose downward normal,
rescaled to last coordinate -1, carries the gradient in its first d entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    DegenerateSimplex,
    DegenerateWalk,
    PointSet,
    WalkStatus,
    walk_to_containing_simplex,
)

__all__ = ["GradientResult", "simplex_gradient", "interpolant_gradient"]

# A unit normal with |last coordinate| at or below this is treated as a
# vertical flat, which cannot arise from function values over an affinely
# independent simplex; it signals corrupted input upstream.
_VERTICAL_TOL = 1e-12


@dataclass(frozen=True)
class GradientResult:
    gradient: np.ndarray | None
    status: WalkStatus


def simplex_gradient(vertices, values) -> np.ndarray:
    """Gradient of the affine function through (vertex, value) pairs.

    Stacks rows (s_l, f(s_l)), subtracts the column means so the lifted
    barycenter sits at the origin, and reads the flat's normal off the last
    right singular vector.
    """
    verts = np.asarray(vertices, dtype=float)
    vals = np.asarray(values, dtype=float)
    if verts.ndim != 2 or verts.shape[0] != verts.shape[1] + 1:
        raise ValueError("need d+1 vertices in R^d")
    if vals.shape != (verts.shape[0],):
        raise ValueError("need one value per vertex")
    lifted = np.hstack([verts, vals[:, None]])
    lifted = lifted - lifted.mean(axis=0)
    _, _, vt = np.linalg.svd(lifted)
    normal = vt[-1]
    if abs(normal[-1]) < _VERTICAL_TOL:
        raise DegenerateSimplex("lifted simplex is vertical")
    return -normal[:-1] / normal[-1]


def interpolant_gradient(ps: PointSet, q) -> GradientResult:
    """Gradient of the interpolant at q via point location.

    Queries outside the convex hull yield status EXTRAPOLATION with no
    gradient.  On facets the gradient of whichever simplex the walk lands in
    is reported; the interpolant has no unique gradient there.
    """
    res = walk_to_containing_simplex(ps, q)
    if res.status is WalkStatus.EXTRAPOLATION:
        return GradientResult(gradient=None, status=res.status)
    if res.status is WalkStatus.DEGENERATE:
        raise DegenerateWalk("point location did not terminate")
    idx = list(res.simplex.vertex_indices)
    grad = simplex_gradient(ps.points[idx], ps.values[idx])
    return GradientResult(gradient=grad, status=res.status)
