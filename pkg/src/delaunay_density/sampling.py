"""Sample generation, query lattices, and static-dataset ingestion.

Random draws go through numpy's default_rng (PCG64), whose stream is
documented and platform independent, so a seed fully determines a run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "EmptyAfterDedup",
    "DegenerateInterval",
    "BoundingBox",
    "QuerySet",
    "StaticDataset",
    "sample_uniform",
    "build_lattice",
    "box_from_qpdf",
    "dedup_cluster",
    "percentile_lattice",
    "shuffled_index",
    "load_static_csv",
]


class EmptyAfterDedup(Exception):
    """Fewer than d+1 rows survived near-duplicate clustering."""


class DegenerateInterval(Exception):
    """A percentile interval collapsed to a single value."""


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box; L is the mean side length."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ValueError("lower and upper must be matching vectors")
        if not np.all(hi > lo):
            raise ValueError("upper must exceed lower in every coordinate")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def mean_side(self) -> float:
        return float(np.mean(self.upper - self.lower))


@dataclass(frozen=True)
class QuerySet:
    """Fixed evaluation points, with a note on how they were built."""

    points: np.ndarray
    provenance: dict = field(default_factory=lambda: {"kind": "explicit"})

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("queries must be a nonempty (m, d) array")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class StaticDataset:
    """Deduplicated (input, value) rows from a fixed dataset."""

    points: np.ndarray
    values: np.ndarray
    delta: float
    input_columns: tuple[str, ...] | None = None
    value_column: str | None = None

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def bounding_box(self) -> BoundingBox:
        return BoundingBox(self.points.min(axis=0), self.points.max(axis=0))


def sample_uniform(box: BoundingBox, count: int, rng: np.random.Generator) -> np.ndarray:
    """count independent uniform draws from the box, consuming rng."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    return rng.uniform(box.lower, box.upper, size=(count, box.dim))


def build_lattice(center, side: float, p: int) -> QuerySet:
    """p^d axis-aligned grid spanning a cube of the given side, corners included.

    p = 1 degenerates to the center point alone.
    """
    center = np.asarray(center, dtype=float)
    if p < 1:
        raise ValueError("p must be at least 1")
    if p == 1:
        axes = [np.array([c]) for c in center]
    else:
        axes = [np.linspace(c - side / 2.0, c + side / 2.0, p) for c in center]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    prov = {"kind": "lattice", "points_per_dim": p, "side": float(side),
            "center": center.tolist()}
    return QuerySet(points=pts, provenance=prov)


def box_from_qpdf(query_extent: float, qpdf: float, center) -> BoundingBox:
    """Cube whose side makes the query extent the fraction qpdf of it."""
    if not 0.0 < qpdf < 1.0:
        raise ValueError("qpdf must lie in (0, 1)")
    center = np.asarray(center, dtype=float)
    half = 0.5 * query_extent / qpdf
    return BoundingBox(center - half, center + half)


def dedup_cluster(points, values, delta: float, min_survivors: int | None = None) -> StaticDataset:
    """Collapse near-duplicate inputs by single-linkage clustering at delta.

    Each cluster is replaced by the mean of its inputs and the mean of its
    values; clustering is repeated until no pair sits within delta, since the
    replacement means can themselves collide.  Output order follows the first
    occurrence of each cluster.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    pts = np.asarray(points, dtype=float)
    vals = np.asarray(values, dtype=float)
    if pts.ndim != 2 or vals.shape != (pts.shape[0],):
        raise ValueError("need (m, d) inputs and m values")
    while True:
        pairs = cKDTree(pts).query_pairs(delta) if len(pts) > 1 else set()
        if not pairs:
            break
        parent = list(range(len(pts)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        roots: dict[int, list[int]] = {}
        for i in range(len(pts)):
            roots.setdefault(find(i), []).append(i)
        order = sorted(roots, key=lambda r: roots[r][0])
        pts = np.array([pts[roots[r]].mean(axis=0) for r in order])
        vals = np.array([vals[roots[r]].mean() for r in order])
    if min_survivors is None:
        min_survivors = pts.shape[1] + 1
    if len(pts) < min_survivors:
        raise EmptyAfterDedup(
            f"only {len(pts)} rows survived clustering, need {min_survivors}"
        )
    return StaticDataset(points=pts, values=vals, delta=float(delta))


def percentile_lattice(ds: StaticDataset, p: int, lo_pct: float = 25.0,
                       hi_pct: float = 75.0) -> QuerySet:
    """Lattice spanning the per-coordinate [lo_pct, hi_pct] percentile interval.

    Percentiles use the linear-interpolation convention; interval endpoints
    are included in the lattice.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    los = np.percentile(ds.points, lo_pct, axis=0)
    his = np.percentile(ds.points, hi_pct, axis=0)
    if np.any(his <= los):
        raise DegenerateInterval("a percentile interval has zero width")
    if p == 1:
        axes = [np.array([0.5 * (lo + hi)]) for lo, hi in zip(los, his)]
    else:
        axes = [np.linspace(lo, hi, p) for lo, hi in zip(los, his)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    prov = {"kind": "percentile_lattice", "points_per_dim": p,
            "lo_pct": lo_pct, "hi_pct": hi_pct}
    return QuerySet(points=pts, provenance=prov)


def shuffled_index(n: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded Fisher-Yates permutation of range(n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return rng.permutation(n)


def load_static_csv(path, input_columns, value_column: str):
    """Read (inputs, values) from a headed CSV.

    Selects input columns by name plus one value column; any row that fails
    to parse aborts ingestion with its row number.
    """
    input_columns = list(input_columns)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, header required") from None
        try:
            in_idx = [header.index(c) for c in input_columns]
            val_idx = header.index(value_column)
        except ValueError as exc:
            raise ValueError(f"{path}: missing column: {exc}") from None
        points, values = [], []
        for rownum, row in enumerate(reader, start=2):
            try:
                points.append([float(row[i]) for i in in_idx])
                values.append(float(row[val_idx]))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}: row {rownum}: {exc}") from None
    if not points:
        raise ValueError(f"{path}: no data rows")
    return np.array(points, dtype=float), np.array(values, dtype=float)
