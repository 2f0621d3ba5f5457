"""Delaunay piecewise-linear interpolation by on-demand simplex construction.

Works directly on the point cloud in any dimension: the simplex containing a
query is found by growing a seed simplex at the nearest sample and walking
across facets, so the full triangulation is never materialized.  All
predicates are tolerance based; inputs in general position are assumed (random
scattered data has a unique triangulation with probability 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "GeometryError",
    "DegenerateInput",
    "DegenerateSimplex",
    "DegenerateFacet",
    "DegenerateWalk",
    "DuplicatePoints",
    "GeometryTolerances",
    "WalkStatus",
    "Simplex",
    "Circumball",
    "WalkResult",
    "PointSet",
    "nearest_vertex",
    "build_seed_simplex",
    "barycentric_coordinates",
    "complete_facet",
    "walk_to_containing_simplex",
    "interpolate",
    "circumball",
    "verify_empty_circumball",
]


class GeometryError(Exception):
    """Base class for geometric failures."""


class DegenerateInput(GeometryError):
    """The point set cannot support the requested operation (too few points
    or all points confined to a lower-dimensional flat)."""


class DegenerateSimplex(GeometryError):
    """Simplex vertices are affinely dependent beyond tolerance."""


class DegenerateFacet(GeometryError):
    """Facet vertices are rank deficient beyond tolerance."""


class DegenerateWalk(GeometryError):
    """The facet walk exceeded its flip budget without locating the query."""


class DuplicatePoints(GeometryError):
    """Two input points coincide within tolerance."""


@dataclass(frozen=True)
class GeometryTolerances:
    """Numerical slack used by the geometric predicates.

    weight_tol: barycentric weights in [-weight_tol, 0) count as on-facet.
    vol_tol: relative volume below which a simplex is degenerate.
    dup_tol: duplicate threshold, relative to the point-cloud diameter.
    max_flips_factor: walk flip budget is max_flips_factor * n.
    """

    weight_tol: float = 1e-8
    vol_tol: float = 1e-12
    dup_tol: float = 1e-12
    max_flips_factor: int = 10

    def __post_init__(self) -> None:
        for name in ("weight_tol", "vol_tol", "dup_tol", "max_flips_factor"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


class WalkStatus(Enum):
    INTERIOR = "interior"
    EXTRAPOLATION = "extrapolation"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Simplex:
    """d+1 distinct vertex indices into a PointSet, in construction order."""

    vertex_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.vertex_indices)) != len(self.vertex_indices):
            raise ValueError("simplex vertices must be distinct")


@dataclass(frozen=True)
class Circumball:
    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class WalkResult:
    """Outcome of point location.

    For INTERIOR results the weights are clamped nonnegative and renormalized.
    For EXTRAPOLATION and DEGENERATE the simplex and weights are the last ones
    visited and carry no containment guarantee.
    """

    simplex: Simplex
    weights: np.ndarray
    status: WalkStatus


class PointSet:
    """Immutable scattered samples (x_j, f(x_j)) in R^d.

    Rejects duplicate points at construction (within dup_tol relative to the
    bounding-box diagonal, a cheap stand-in for the cloud diameter).  Caches a
    KD-tree and per-vertex seed simplices; both caches are pure accelerators
    and never change returned values.
    """

    def __init__(
        self,
        points,
        values,
        tolerances: GeometryTolerances | None = None,
    ) -> None:
        pts = np.array(points, dtype=float)
        vals = np.array(values, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        if pts.shape[0] == 0:
            raise ValueError("points must be nonempty")
        if vals.shape != (pts.shape[0],):
            raise ValueError("values must have one scalar per point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        self._tol = tolerances if tolerances is not None else GeometryTolerances()
        pts.setflags(write=False)
        vals.setflags(write=False)
        self._points = pts
        self._values = vals
        self._tree = cKDTree(pts) if len(pts) > 1 else None
        self._seed_cache: dict[int, Simplex] = {}
        if len(pts) > 1:
            diam = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
            pairs = self._tree.query_pairs(self._tol.dup_tol * diam)
            if diam == 0.0 or pairs:
                raise DuplicatePoints(
                    "point set contains coincident points within tolerance"
                )

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def tolerances(self) -> GeometryTolerances:
        return self._tol

    def __len__(self) -> int:
        return self._points.shape[0]


def _check_query(ps: PointSet, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (ps.dim,):
        raise ValueError(f"query must have dimension {ps.dim}, got shape {q.shape}")
    return q


def nearest_vertex(ps: PointSet, q) -> int:
    """Index of the sample closest to q; distance ties go to the smallest index."""
    q = _check_query(ps, q)
    if len(ps) == 1:
        return 0
    dmin, _ = ps._tree.query(q)
    # Gather everything within the minimal distance (plus slack) and re-measure,
    # so exact ties resolve by index rather than by tree traversal order.
    cand = ps._tree.query_ball_point(q, dmin * (1.0 + 1e-12) + 1e-300)
    dists = np.linalg.norm(ps.points[cand] - q, axis=1)
    best = min(zip(dists, cand))
    return int(best[1])


def _face_circumball(vertices: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and radius of the smallest ball through a face's vertices.

    The center is constrained to the face's affine hull; for a full d-simplex
    this is the ordinary circumball.
    """
    v0 = vertices[0]
    E = vertices[1:] - v0
    if E.shape[0] == 0:
        return v0.copy(), 0.0
    G = E @ E.T
    g = np.diag(G).copy()
    try:
        t = np.linalg.solve(2.0 * G, g)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSimplex("circumball system is singular") from exc
    offset = E.T @ t
    return v0 + offset, float(np.linalg.norm(offset))


def _indices(s) -> list[int]:
    """Vertex indices from a Simplex or any plain index sequence."""
    if isinstance(s, Simplex):
        return list(s.vertex_indices)
    return list(s)


def circumball(ps: PointSet, s) -> Circumball:
    """Circumball of a simplex, verified equidistant to all vertices."""
    verts = ps.points[_indices(s)]
    center, radius = _face_circumball(verts)
    dists = np.linalg.norm(verts - center, axis=1)
    if np.max(np.abs(dists - radius)) > 1e-8 * (radius + 1e-300):
        raise DegenerateSimplex("circumball does not touch all vertices")
    return Circumball(center=center, radius=radius)


def verify_empty_circumball(ps: PointSet, s) -> bool:
    """True iff no other sample lies strictly inside the open circumball.

    Strictly inside means distance < radius * (1 - 1e-10); points on the
    sphere (cocircular ties) do not violate emptiness.
    """
    ball = circumball(ps, s)
    d2 = np.einsum("ij,ij->i", ps.points - ball.center, ps.points - ball.center)
    cutoff = (ball.radius * (1.0 - 1e-10)) ** 2
    inside = d2 < cutoff
    inside[_indices(s)] = False
    return not bool(inside.any())


def _min_circumradius_completion(
    ps: PointSet, selected: list[int]
) -> int | None:
    """Among points affinely independent of the current face, the index whose
    addition minimizes the face circumradius.  None if no candidate exists."""
    P = ps.points
    v0 = P[selected[0]]
    E = P[selected[1:]] - v0
    A = P - v0
    pp = np.einsum("ij,ij->i", A, A)
    if E.shape[0] == 0:
        # Growing from a single vertex: the closest distinct point wins.
        pp[selected] = np.inf
        j = int(np.argmin(pp))
        return None if not np.isfinite(pp[j]) else j
    G = E @ E.T
    g = np.diag(G).copy()
    try:
        w = np.linalg.solve(G, g)
        H = A @ E.T
        U = np.linalg.solve(G, H.T).T
    except np.linalg.LinAlgError as exc:
        raise DegenerateSimplex("seed face is rank deficient") from exc
    # s is the squared distance from each candidate to the face's linear span;
    # it doubles as the affine-independence filter.
    s = pp - np.einsum("ij,ij->i", H, U)
    valid = s > ps.tolerances.vol_tol * np.maximum(pp, g.max())
    valid[selected] = False
    if not valid.any():
        return None
    t2 = (pp - H @ w) / np.where(valid, 2.0 * s, 1.0)
    t1_dot_g = 0.5 * (g @ w) - (U @ g) * t2
    r2 = np.where(valid, 0.5 * (t1_dot_g + t2 * pp), np.inf)
    return int(np.argmin(r2))


def build_seed_simplex(ps: PointSet, q) -> Simplex:
    """A Delaunay simplex incident to the sample nearest q.

    Grown by minimum-circumradius completion from the nearest vertex and its
    nearest neighbor; the result is scanned for circumball emptiness.  The
    simplex depends on q only through the nearest vertex, so results are
    cached per vertex.
    """
    q = _check_query(ps, q)
    d = ps.dim
    if len(ps) < d + 1:
        raise DegenerateInput(f"need at least {d + 1} points, have {len(ps)}")
    v0 = nearest_vertex(ps, q)
    cached = ps._seed_cache.get(v0)
    if cached is not None:
        return cached
    selected = [v0]
    while len(selected) < d + 1:
        nxt = _min_circumradius_completion(ps, selected)
        if nxt is None:
            raise DegenerateInput("points lie in a lower-dimensional flat")
        selected.append(nxt)
    simplex = Simplex(tuple(selected))
    if not verify_empty_circumball(ps, simplex):
        raise DegenerateInput("seed simplex circumball is not empty")
    ps._seed_cache[v0] = simplex
    return simplex


def _edge_matrix(ps: PointSet, s: Simplex) -> np.ndarray:
    idx = list(s.vertex_indices)
    return ps.points[idx[1:]] - ps.points[idx[0]]


def barycentric_coordinates(ps: PointSet, s, q) -> np.ndarray:
    """Weights w with sum(w) = 1 and sum(w_i * s_i) = q, by direct solve of the
    (d+1) x (d+1) affine system."""
    q = _check_query(ps, q)
    verts = ps.points[_indices(s)]
    d = ps.dim
    E = verts[1:] - verts[0]
    scale = np.abs(E).max() if E.size else 1.0
    vol = abs(np.linalg.det(E)) / math.factorial(d)
    if not np.isfinite(vol) or vol <= ps.tolerances.vol_tol * scale**d:
        raise DegenerateSimplex("simplex volume below tolerance")
    M = np.vstack([np.ones(d + 1), verts.T])
    rhs = np.concatenate([[1.0], q])
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSimplex("barycentric system is singular") from exc


def _facet_normal(ps: PointSet, facet: tuple[int, ...]) -> np.ndarray:
    """Unit normal of the facet's affine hull (orientation unspecified)."""
    P = ps.points
    f0 = P[facet[0]]
    E = P[list(facet[1:])] - f0
    if E.shape[0] == 0:
        return np.ones(1)
    _, sv, Vt = np.linalg.svd(E)
    if sv[-1] <= ps.tolerances.vol_tol * sv[0]:
        raise DegenerateFacet("facet is rank deficient")
    return Vt[-1]


def complete_facet(ps: PointSet, facet: tuple[int, ...], away_from: int):
    """Vertex completing the Delaunay simplex on the far side of a facet.

    Among samples strictly opposite `away_from`, picks the one whose completed
    simplex has the empty circumball; this is the candidate minimizing the
    signed circumcenter offset along the outward facet normal.  Returns None
    when no sample lies on that side (the facet is on the convex hull).
    """
    P = ps.points
    f0 = P[facet[0]]
    normal = _facet_normal(ps, facet)
    h_away = float((P[away_from] - f0) @ normal)
    if h_away == 0.0:
        raise DegenerateFacet("away_from vertex lies in the facet hyperplane")
    if h_away > 0.0:
        normal = -normal
    h = (P - f0) @ normal
    h[list(facet)] = 0.0
    h[away_from] = 0.0
    cand = np.nonzero(h > 0.0)[0]
    if cand.size == 0:
        return None
    center, radius = _face_circumball(P[list(facet)])
    B = P[cand] - center
    # normal is orthogonal to (center - f0), so h equals B @ normal exactly
    # in real arithmetic; reusing h keeps the denominator strictly positive.
    offset = (np.einsum("ij,ij->i", B, B) - radius * radius) / (2.0 * h[cand])
    return int(cand[np.argmin(offset)])


def walk_to_containing_simplex(ps: PointSet, q) -> WalkResult:
    """Locate q by facet flips from a seed simplex at the nearest vertex.

    Flips across the facet opposite the most negative barycentric weight.
    Weights in [-weight_tol, 0) are treated as on-facet: clamped to zero and
    renormalized.  A flip with no opposite sample means q is outside the
    convex hull (EXTRAPOLATION); exceeding the flip budget reports DEGENERATE.
    """
    q = _check_query(ps, q)
    if len(ps) < ps.dim + 1:
        raise DegenerateInput(f"need at least {ps.dim + 1} points, have {len(ps)}")
    tol = ps.tolerances
    simplex = build_seed_simplex(ps, q)
    max_flips = tol.max_flips_factor * len(ps)
    flips = 0
    while True:
        w = barycentric_coordinates(ps, simplex, q)
        if w.min() >= -tol.weight_tol:
            w = np.where(w < 0.0, 0.0, w)
            w = w / w.sum()
            return WalkResult(simplex=simplex, weights=w, status=WalkStatus.INTERIOR)
        j = int(np.argmin(w))
        idx = simplex.vertex_indices
        facet = idx[:j] + idx[j + 1 :]
        nxt = complete_facet(ps, facet, idx[j])
        if nxt is None:
            return WalkResult(
                simplex=simplex, weights=w, status=WalkStatus.EXTRAPOLATION
            )
        simplex = Simplex(facet + (nxt,))
        flips += 1
        if flips > max_flips:
            return WalkResult(
                simplex=simplex, weights=w, status=WalkStatus.DEGENERATE
            )


def interpolate(ps: PointSet, q) -> float:
    """Piecewise-linear interpolant value at q.

    Returns nan when q falls outside the convex hull of the samples; a walk
    failure raises DegenerateWalk instead of being folded into nan.
    """
    res = walk_to_containing_simplex(ps, q)
    if res.status is WalkStatus.EXTRAPOLATION:
        return math.nan
    if res.status is WalkStatus.DEGENERATE:
        raise DegenerateWalk("point location did not terminate")
    return float(res.weights @ ps.values[list(res.simplex.vertex_indices)])
