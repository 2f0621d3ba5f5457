"""Rate-based density diagnostic.

A trial repeatedly refines a random sample of f, interpolates on a fixed set
of query points, and converts the root-mean-square change between successive
interpolants into a convergence rate:

    r_k = log_b( rms(diff_{k-1}) / rms(diff_k) )

Values near 2 (and gradient rates near 1) mean the sampling resolves the
function's features at the query scale; values near 0 (gradient -1) mean the
samples cannot distinguish f from noise there.  Rates are computed per trial
seed and aggregated across seeds with mean, quartile, and decile statistics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import DegenerateWalk, PointSet, WalkStatus, walk_to_containing_simplex
from .gradient import simplex_gradient
from .sampling import BoundingBox, QuerySet, StaticDataset, sample_uniform, shuffled_index

__all__ = [
    "QueryExclusionWarning",
    "Schedule",
    "Snapshot",
    "RateRecord",
    "TrialAggregate",
    "next_sample_total",
    "avg_sample_spacing",
    "msd_rate",
    "grad_rate",
    "run_dynamic",
    "run_static",
    "aggregate",
]

# Rates are reported as nan ("undefined") when the difference signal is
# numerically zero or too few query points survive exclusion.
_RMS_FLOOR = 1e-14
_MIN_VALID = 10


class QueryExclusionWarning(UserWarning):
    """More than 10% of query points were excluded from a rate."""


@dataclass(frozen=True)
class Schedule:
    """Refinement control: growth factor, initial count, stopping rule."""

    b: float
    n0: int
    max_samples: int | None = None
    max_iterations: int | None = None

    def __post_init__(self) -> None:
        if not 1.0 < self.b <= 2.0:
            raise ValueError("b must lie in (1, 2]")
        if self.n0 < 1:
            raise ValueError("n0 must be positive")
        if self.max_samples is None and self.max_iterations is None:
            raise ValueError("at least one stopping rule is required")


@dataclass(frozen=True)
class Snapshot:
    """Interpolant values and gradients at every query for one iteration.

    Queries outside the hull hold nan (value) and nan rows (gradient).
    """

    k: int
    n_k: int
    values: np.ndarray
    gradients: np.ndarray


@dataclass(frozen=True)
class RateRecord:
    """One iteration's rates; r_msd / r_grad are nan when undefined."""

    k: int
    n_k: int
    samp: float
    r_msd: float
    r_grad: float
    valid_count: int


@dataclass(frozen=True)
class TrialAggregate:
    """Across-seed statistics per iteration, aligned with the n_k schedule."""

    k: np.ndarray
    n_k: np.ndarray
    samp: np.ndarray
    mean_msd: np.ndarray
    q25_msd: np.ndarray
    q75_msd: np.ndarray
    d10_msd: np.ndarray
    d90_msd: np.ndarray
    mean_grad: np.ndarray
    q25_grad: np.ndarray
    q75_grad: np.ndarray
    d10_grad: np.ndarray
    d90_grad: np.ndarray
    defined_count: np.ndarray


def next_sample_total(n: int, b: float, d: int) -> int:
    """New total sample count after one refinement.

    Rounds (b * n^(1/d) - (b - 1))^d half away from zero, and always grows by
    at least one so the schedule cannot stall.  The ratio of successive totals
    approaches b^d from below.
    """
    if n < 1:
        raise ValueError("n must be positive")
    x = (b * n ** (1.0 / d) - (b - 1.0)) ** d
    return max(int(math.floor(x + 0.5)), n + 1)


def avg_sample_spacing(n: int, L: float, d: int) -> float:
    """Average sample spacing L / n^(1/d) for n samples in a box of mean side L."""
    if n < 1 or L <= 0:
        raise ValueError("need n >= 1 and L > 0")
    return L / n ** (1.0 / d)


def _log_ratio(rms_prev: float, rms_cur: float, b: float, scale: float) -> float:
    floor = _RMS_FLOOR * scale
    if rms_prev < floor or rms_cur < floor:
        return math.nan
    return math.log(rms_prev / rms_cur) / math.log(b)


def msd_rate(prev_pair_diffs, cur_pair_diffs, b: float, scale: float = 1.0) -> float:
    """log_b of the RMS ratio of successive difference arrays; nan if undefined.

    Only indices finite in both arrays participate.  Undefined when fewer than
    10 such indices remain or either RMS falls below 1e-14 * scale, where
    scale is the magnitude of the underlying values (1.0 for raw use).
    """
    prev = np.asarray(prev_pair_diffs, dtype=float)
    cur = np.asarray(cur_pair_diffs, dtype=float)
    valid = np.isfinite(prev) & np.isfinite(cur)
    if valid.sum() < _MIN_VALID:
        return math.nan
    rms_prev = float(np.sqrt(np.mean(prev[valid] ** 2)))
    rms_cur = float(np.sqrt(np.mean(cur[valid] ** 2)))
    return _log_ratio(rms_prev, rms_cur, b, scale)


def grad_rate(prev_vec_diffs, cur_vec_diffs, b: float, scale: float = 1.0) -> float:
    """Gradient analogue of msd_rate with the Frobenius norm over valid rows.

    The ratio is insensitive to count normalization because both iterations
    are restricted to the same valid rows.
    """
    prev = np.asarray(prev_vec_diffs, dtype=float)
    cur = np.asarray(cur_vec_diffs, dtype=float)
    valid = np.isfinite(prev).all(axis=1) & np.isfinite(cur).all(axis=1)
    if valid.sum() < _MIN_VALID:
        return math.nan
    norm_prev = float(np.linalg.norm(prev[valid]))
    norm_cur = float(np.linalg.norm(cur[valid]))
    return _log_ratio(norm_prev, norm_cur, b, scale)


def _take_snapshot(k: int, ps: PointSet, queries: QuerySet) -> Snapshot:
    """One walk per query provides both the value and the gradient."""
    m = len(queries)
    d = ps.dim
    values = np.full(m, np.nan)
    gradients = np.full((m, d), np.nan)
    for i, q in enumerate(queries.points):
        res = walk_to_containing_simplex(ps, q)
        if res.status is WalkStatus.EXTRAPOLATION:
            continue
        if res.status is WalkStatus.DEGENERATE:
            raise DegenerateWalk(f"point location failed at query {i}")
        idx = list(res.simplex.vertex_indices)
        values[i] = res.weights @ ps.values[idx]
        gradients[i] = simplex_gradient(ps.points[idx], ps.values[idx])
    return Snapshot(k=k, n_k=len(ps), values=values, gradients=gradients)


def _finite_scale(arrays) -> float:
    """Largest finite magnitude across arrays; 1.0 when there is none."""
    best = 0.0
    for a in arrays:
        finite = a[np.isfinite(a)]
        if finite.size:
            best = max(best, float(np.abs(finite).max()))
    return best if best > 0.0 else 1.0


class _RateTracker:
    """Carries the last two snapshots and diffs, emitting records from k = 2."""

    def __init__(self, b: float, L: float, d: int, n_queries: int) -> None:
        self.b = b
        self.L = L
        self.d = d
        self.m = n_queries
        self._snaps: list[Snapshot] = []
        self._val_diffs: list[np.ndarray] = []
        self._grad_diffs: list[np.ndarray] = []

    def feed(self, snap: Snapshot) -> RateRecord | None:
        self._snaps.append(snap)
        self._snaps = self._snaps[-3:]
        if len(self._snaps) >= 2:
            prev = self._snaps[-2]
            self._val_diffs.append(snap.values - prev.values)
            self._grad_diffs.append(snap.gradients - prev.gradients)
            self._val_diffs = self._val_diffs[-2:]
            self._grad_diffs = self._grad_diffs[-2:]
        if len(self._val_diffs) < 2:
            return None
        prev_vd, cur_vd = self._val_diffs
        prev_gd, cur_gd = self._grad_diffs
        valid = np.isfinite(prev_vd) & np.isfinite(cur_vd)
        valid_count = int(valid.sum())
        if self.m > 0 and (self.m - valid_count) / self.m > 0.10:
            warnings.warn(
                f"iteration {snap.k}: {self.m - valid_count} of {self.m} query "
                "points excluded from the rate (outside the sample hull)",
                QueryExclusionWarning,
                stacklevel=3,
            )
        value_scale = _finite_scale([s.values for s in self._snaps])
        grad_scale = _finite_scale([s.gradients for s in self._snaps])
        return RateRecord(
            k=snap.k,
            n_k=snap.n_k,
            samp=avg_sample_spacing(snap.n_k, self.L, self.d),
            r_msd=msd_rate(prev_vd, cur_vd, self.b, scale=value_scale),
            r_grad=grad_rate(prev_gd, cur_gd, self.b, scale=grad_scale),
            valid_count=valid_count,
        )


def run_dynamic(f, box: BoundingBox, queries: QuerySet, sched: Schedule,
                seed: int) -> list[RateRecord]:
    """One diagnostic trial with freshly drawn samples.

    Starts from n0 uniform draws in the box and grows the sample set by
    next_sample_total each iteration, keeping all earlier samples.  f maps an
    (m, d) array to m values and is evaluated once per point.  Emits one
    RateRecord per iteration from k = 2 until the stopping rule fires.
    """
    d = box.dim
    if queries.points.shape[1] != d:
        raise ValueError("queries and box disagree on dimension")
    if sched.n0 < d + 1:
        raise ValueError(f"n0 must be at least d + 1 = {d + 1}")
    rng = np.random.default_rng(seed)
    X = sample_uniform(box, sched.n0, rng)
    y = np.asarray(f(X), dtype=float)
    tracker = _RateTracker(sched.b, box.mean_side, d, len(queries))
    records: list[RateRecord] = []
    k = 0
    while True:
        ps = PointSet(X, y)
        rec = tracker.feed(_take_snapshot(k, ps, queries))
        if rec is not None:
            records.append(rec)
        if sched.max_iterations is not None and k + 1 >= sched.max_iterations:
            break
        n_next = next_sample_total(len(X), sched.b, d)
        if sched.max_samples is not None and n_next > sched.max_samples:
            break
        fresh = sample_uniform(box, n_next - len(X), rng)
        X = np.vstack([X, fresh])
        y = np.concatenate([y, np.asarray(f(fresh), dtype=float)])
        k += 1
    return records


def run_static(ds: StaticDataset, queries: QuerySet, sched: Schedule,
               seed: int) -> list[RateRecord]:
    """One diagnostic trial over a fixed dataset.

    Consumes the dataset through a seeded shuffled index: the sample set is
    the first n_k entries of the permutation, so the n_k schedule matches the
    dynamic mode until the loop breaks, exactly when the next total would
    exceed the dataset size.  Spacing uses the mean side of the data's
    bounding box.
    """
    d = ds.dim
    if queries.points.shape[1] != d:
        raise ValueError("queries and dataset disagree on dimension")
    if sched.n0 < d + 1:
        raise ValueError(f"n0 must be at least d + 1 = {d + 1}")
    if sched.n0 > len(ds):
        raise ValueError("n0 exceeds the dataset size")
    rng = np.random.default_rng(seed)
    perm = shuffled_index(len(ds), rng)
    X_all = ds.points[perm]
    y_all = ds.values[perm]
    tracker = _RateTracker(sched.b, ds.bounding_box().mean_side, d, len(queries))
    records: list[RateRecord] = []
    n = sched.n0
    k = 0
    while True:
        ps = PointSet(X_all[:n], y_all[:n])
        rec = tracker.feed(_take_snapshot(k, ps, queries))
        if rec is not None:
            records.append(rec)
        if sched.max_iterations is not None and k + 1 >= sched.max_iterations:
            break
        n_next = next_sample_total(n, sched.b, d)
        if n_next > len(ds):
            break
        if sched.max_samples is not None and n_next > sched.max_samples:
            break
        n = n_next
        k += 1
    return records


def aggregate(trials: list[list[RateRecord]]) -> TrialAggregate:
    """Across-trial mean, quartiles, and deciles of both rates per iteration.

    Statistics for each rate pool the trials where that rate is defined;
    defined_count reports the trials where both rates are defined.  All
    trials must share one (k, n_k, samp) schedule.
    """
    if not trials or any(not t for t in trials):
        raise ValueError("need at least one nonempty trial")
    ref = [(r.k, r.n_k, r.samp) for r in trials[0]]
    for i, t in enumerate(trials[1:], start=1):
        if [(r.k, r.n_k, r.samp) for r in t] != ref:
            raise ValueError(f"trial {i} does not share the first trial's schedule")
    n_iter = len(ref)
    msd = np.array([[t[j].r_msd for t in trials] for j in range(n_iter)])
    grad = np.array([[t[j].r_grad for t in trials] for j in range(n_iter)])

    def stats(rows: np.ndarray):
        mean = np.full(n_iter, np.nan)
        qs = np.full((4, n_iter), np.nan)
        for j in range(n_iter):
            vals = rows[j][np.isfinite(rows[j])]
            if vals.size:
                mean[j] = vals.mean()
                qs[:, j] = np.percentile(vals, [25, 75, 10, 90])
        return mean, qs

    mean_msd, qs_msd = stats(msd)
    mean_grad, qs_grad = stats(grad)
    defined = (np.isfinite(msd) & np.isfinite(grad)).sum(axis=1)
    return TrialAggregate(
        k=np.array([r[0] for r in ref]),
        n_k=np.array([r[1] for r in ref]),
        samp=np.array([r[2] for r in ref]),
        mean_msd=mean_msd,
        q25_msd=qs_msd[0],
        q75_msd=qs_msd[1],
        d10_msd=qs_msd[2],
        d90_msd=qs_msd[3],
        mean_grad=mean_grad,
        q25_grad=qs_grad[0],
        q75_grad=qs_grad[1],
        d10_grad=qs_grad[2],
        d90_grad=qs_grad[3],
        defined_count=defined,
    )
