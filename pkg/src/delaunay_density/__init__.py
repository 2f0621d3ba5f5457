"""Density diagnostic for scattered samples via Delaunay interpolation rates.

The package answers one question: is a point cloud dense enough that a
piecewise linear interpolant built on it resolves the sampled function's
features?  It does so without ever building a full triangulation, by walking
to one Delaunay simplex per query and tracking how fast successive refined
interpolants converge.
"""

from .diagnostic import (
    QueryExclusionWarning,
    RateRecord,
    Schedule,
    Snapshot,
    TrialAggregate,
    aggregate,
    avg_sample_spacing,
    grad_rate,
    msd_rate,
    next_sample_total,
    run_dynamic,
    run_static,
)
from .geometry import (
    Circumball,
    DegenerateFacet,
    DegenerateInput,
    DegenerateSimplex,
    DegenerateWalk,
    DuplicatePoints,
    GeometryError,
    GeometryTolerances,
    PointSet,
    Simplex,
    WalkResult,
    WalkStatus,
    barycentric_coordinates,
    build_seed_simplex,
    circumball,
    complete_facet,
    interpolate,
    nearest_vertex,
    verify_empty_circumball,
    walk_to_containing_simplex,
)
from .gradient import GradientResult, interpolant_gradient, simplex_gradient
from .interpolator import DelaunayInterpolator
from .sampling import (
    BoundingBox,
    DegenerateInterval,
    EmptyAfterDedup,
    QuerySet,
    StaticDataset,
    box_from_qpdf,
    build_lattice,
    dedup_cluster,
    load_static_csv,
    percentile_lattice,
    sample_uniform,
    shuffled_index,
)
from .testbed import FUNCTIONS, TestFunction, make_function

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "QueryExclusionWarning",
    "RateRecord",
    "Schedule",
    "Snapshot",
    "TrialAggregate",
    "aggregate",
    "avg_sample_spacing",
    "grad_rate",
    "msd_rate",
    "next_sample_total",
    "run_dynamic",
    "run_static",
    "Circumball",
    "DegenerateFacet",
    "DegenerateInput",
    "DegenerateSimplex",
    "DegenerateWalk",
    "DuplicatePoints",
    "GeometryError",
    "GeometryTolerances",
    "PointSet",
    "Simplex",
    "WalkResult",
    "WalkStatus",
    "barycentric_coordinates",
    "build_seed_simplex",
    "circumball",
    "complete_facet",
    "interpolate",
    "nearest_vertex",
    "verify_empty_circumball",
    "walk_to_containing_simplex",
    "GradientResult",
    "interpolant_gradient",
    "simplex_gradient",
    "DelaunayInterpolator",
    "BoundingBox",
    "DegenerateInterval",
    "EmptyAfterDedup",
    "QuerySet",
    "StaticDataset",
    "box_from_qpdf",
    "build_lattice",
    "dedup_cluster",
    "load_static_csv",
    "percentile_lattice",
    "sample_uniform",
    "shuffled_index",
    "FUNCTIONS",
    "TestFunction",
    "make_function",
]
