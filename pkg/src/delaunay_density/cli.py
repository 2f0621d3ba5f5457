"""Command-line front end for the density diagnostic.

Subcommands:
  run        execute many seeded trials from a JSON config and/or flags
  aggregate  merge trials.csv files from separate runs and recompute stats
  demo       run a small bundled dynamic config (griewank, d=2)

`run` writes three files into --out: trials.csv (one row per seed and
iteration), aggregate.csv (across-seed statistics per iteration), and
manifest.json (the resolved config plus the package version).  Identical
configs produce byte-identical files regardless of --jobs.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostic import RateRecord, Schedule, aggregate, run_dynamic, run_static
from .geometry import GeometryError
from .sampling import (
    box_from_qpdf,
    build_lattice,
    dedup_cluster,
    load_static_csv,
    percentile_lattice,
)
from .testbed import FUNCTIONS, make_function

__all__ = ["RunConfig", "cmd_run", "cmd_aggregate", "cmd_demo", "main"]

_TRIALS_HEADER = "seed,k,n_k,samp,r_msd,r_grad,valid_count"
_AGG_HEADER = (
    "k,n_k,samp,mean_msd,q25_msd,q75_msd,d10_msd,d90_msd,"
    "mean_grad,q25_grad,q75_grad,d10_grad,d90_grad,defined_count"
)


@dataclass
class RunConfig:
    """Flat run parameters; defaults form the demo configuration.

    Dynamic mode samples `function` over a cube sized so the query lattice
    (side `extent`, `lattice_points` per dimension, centered at the origin)
    covers the fraction `qpdf` of its side.  Static mode consumes `dataset`
    (CSV; `input_columns`, `value_column`, dedup radius `delta`) and queries
    the 25th-75th percentile lattice.  Trials run on `seeds` if given, else
    on base_seed .. base_seed + trials - 1.  nk_floor is advice to the plot
    layer, echoed into the manifest.
    """

    mode: str = "dynamic"
    function: str = "griewank"
    dataset: str | None = None
    input_columns: list[str] | None = None
    value_column: str | None = None
    delta: float | None = None
    dim: int = 2
    lattice_points: int = 20
    extent: float = 20.0
    qpdf: float = 0.8
    b: float = 1.4641
    n0: int = 9
    max_samples: int | None = 40000
    max_iterations: int | None = None
    trials: int = 10
    base_seed: int = 0
    seeds: list[int] | None = None
    jobs: int = 1
    out: str = "."
    nk_floor: int = 500

    def resolved_seeds(self) -> list[int]:
        if self.seeds is not None:
            if not self.seeds:
                raise ValueError("seeds must be nonempty when given")
            return [int(s) for s in self.seeds]
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        return list(range(self.base_seed, self.base_seed + self.trials))

    def schedule(self) -> Schedule:
        return Schedule(b=self.b, n0=self.n0, max_samples=self.max_samples,
                        max_iterations=self.max_iterations)


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def _load_config(path: str | None, overrides: dict) -> RunConfig:
    merged = asdict(RunConfig())
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ValueError(f"{path}: unknown config keys: {sorted(unknown)}")
        merged.update(data)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**merged)
    if cfg.mode not in ("dynamic", "static"):
        raise ValueError(f"mode must be dynamic or static, got {cfg.mode!r}")
    if cfg.mode == "static":
        for key in ("dataset", "input_columns", "value_column", "delta"):
            if getattr(cfg, key) is None:
                raise ValueError(f"static mode requires {key!r}")
    elif cfg.function not in FUNCTIONS:
        raise ValueError(f"unknown function {cfg.function!r}; choose from {FUNCTIONS}")
    if cfg.jobs < 1:
        raise ValueError("jobs must be at least 1")
    return cfg


def _trial_inputs(cfg: RunConfig, seed: int):
    """Everything run_dynamic / run_static needs, rebuilt per trial."""
    sched = cfg.schedule()
    if cfg.mode == "dynamic":
        center = np.zeros(cfg.dim)
        queries = build_lattice(center, cfg.extent, cfg.lattice_points)
        box = box_from_qpdf(cfg.extent, cfg.qpdf, center)
        f = make_function(cfg.function, cfg.dim, seed=seed).fn
        return ("dynamic", f, box, queries, sched)
    points, values = load_static_csv(cfg.dataset, cfg.input_columns, cfg.value_column)
    ds = dedup_cluster(points, values, cfg.delta)
    queries = percentile_lattice(ds, cfg.lattice_points)
    return ("static", ds, queries, sched)


def _run_trial(payload) -> tuple[int, list[RateRecord] | None, str | None]:
    cfg_dict, seed = payload
    cfg = RunConfig(**cfg_dict)
    try:
        inputs = _trial_inputs(cfg, seed)
        if inputs[0] == "dynamic":
            _, f, box, queries, sched = inputs
            recs = run_dynamic(f, box, queries, sched, seed)
        else:
            _, ds, queries, sched = inputs
            recs = run_static(ds, queries, sched, seed)
    except GeometryError as exc:
        return seed, None, str(exc)
    return seed, recs, None


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_trials(path: Path, trials: list[tuple[int, list[RateRecord]]]) -> None:
    lines = [_TRIALS_HEADER]
    for seed, recs in trials:
        for r in recs:
            lines.append(
                f"{seed},{r.k},{r.n_k},{_fmt(r.samp)},"
                f"{_fmt(r.r_msd)},{_fmt(r.r_grad)},{r.valid_count}"
            )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_aggregate(path: Path, agg) -> None:
    lines = [_AGG_HEADER]
    for j in range(len(agg.k)):
        cells = [str(int(agg.k[j])), str(int(agg.n_k[j])), _fmt(agg.samp[j])]
        cells += [_fmt(col[j]) for col in (
            agg.mean_msd, agg.q25_msd, agg.q75_msd, agg.d10_msd, agg.d90_msd,
            agg.mean_grad, agg.q25_grad, agg.q75_grad, agg.d10_grad, agg.d90_grad,
        )]
        cells.append(str(int(agg.defined_count[j])))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_manifest(path: Path, cfg: RunConfig, seeds: list[int]) -> None:
    doc = {"version": __version__, "config": asdict(cfg), "resolved_seeds": seeds}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_run(cfg: RunConfig) -> int:
    try:
        seeds = cfg.resolved_seeds()
        _trial_inputs(cfg, seeds[0])  # surface config/ingestion errors up front
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payloads = [(asdict(cfg), s) for s in seeds]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_trial, payloads))
    else:
        results = [_run_trial(p) for p in payloads]
    kept: list[tuple[int, list[RateRecord]]] = []
    for seed, recs, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            print(f"trial seed {seed} aborted: {err}", file=sys.stderr)
        elif not recs:
            print(f"trial seed {seed} produced no rate records", file=sys.stderr)
        else:
            kept.append((seed, recs))
    if not kept:
        print("error: no trial produced rate records", file=sys.stderr)
        return 1
    agg = aggregate([recs for _, recs in kept])
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_trials(out / "trials.csv", kept)
    _write_aggregate(out / "aggregate.csv", agg)
    _write_manifest(out / "manifest.json", cfg, [s for s, _ in kept])
    print(f"wrote {out / 'trials.csv'}, {out / 'aggregate.csv'}, "
          f"{out / 'manifest.json'} ({len(kept)} trials, {len(agg.k)} iterations)")
    return 0


def _read_trials_csv(path: str) -> list[tuple[int, list[RateRecord]]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != _TRIALS_HEADER:
        raise ValueError(f"{path}: expected header {_TRIALS_HEADER!r}")
    trials: dict[int, list[RateRecord]] = {}
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != 7:
            raise ValueError(f"{path}: malformed row {ln!r}")
        seed = int(cells[0])
        rec = RateRecord(
            k=int(cells[1]), n_k=int(cells[2]), samp=float(cells[3]),
            r_msd=float(cells[4]), r_grad=float(cells[5]),
            valid_count=int(cells[6]),
        )
        trials.setdefault(seed, []).append(rec)
    return list(trials.items())


def cmd_aggregate(paths: list[str], out_dir: str) -> int:
    trials: list[list[RateRecord]] = []
    sources: list[str] = []
    try:
        for path in paths:
            for seed, recs in _read_trials_csv(path):
                trials.append(recs)
                sources.append(f"{path} (seed {seed})")
        ref = [(r.k, r.n_k, r.samp) for r in trials[0]] if trials else []
        for i, t in enumerate(trials):
            if [(r.k, r.n_k, r.samp) for r in t] != ref:
                raise ValueError(
                    f"{sources[i]} does not share the n_k schedule of {sources[0]}")
        agg = aggregate(trials)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_aggregate(out / "aggregate.csv", agg)
    print(f"wrote {out / 'aggregate.csv'} ({len(trials)} trials, {len(agg.k)} iterations)")
    return 0


def cmd_demo(out_dir: str, jobs: int) -> int:
    return cmd_run(RunConfig(out=out_dir, jobs=jobs))


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="delaunay-density",
                                description="Delaunay interpolation density diagnostic")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute seeded trials and write CSVs")
    run.add_argument("--config", help="JSON file with RunConfig keys")
    run.add_argument("--mode", choices=["dynamic", "static"])
    run.add_argument("--function", help=f"one of {', '.join(FUNCTIONS)}")
    run.add_argument("--dataset", help="CSV path for static mode")
    run.add_argument("--dim", type=int)
    run.add_argument("--lattice-points", type=int, dest="lattice_points",
                     help="query points per dimension")
    run.add_argument("--extent", type=float,
                     help="query lattice side length (dynamic mode)")
    run.add_argument("--qpdf", type=float,
                     help="query extent as a fraction of the sampling-box side")
    run.add_argument("--b", type=float, help="per-dimension growth factor")
    run.add_argument("--n0", type=int, help="initial sample count")
    run.add_argument("--max-samples", type=int, dest="max_samples")
    run.add_argument("--trials", type=int)
    run.add_argument("--base-seed", type=int, dest="base_seed")
    run.add_argument("--jobs", type=int)
    run.add_argument("--out", help="output directory")
    run.add_argument("--nk-floor", type=int, dest="nk_floor",
                     help="display floor on n_k, recorded for the plot layer")

    agg = sub.add_parser("aggregate", help="merge trials.csv files")
    agg.add_argument("--input", action="append", required=True, dest="inputs",
                     metavar="TRIALS_CSV")
    agg.add_argument("--out", default=".", help="output directory")

    demo = sub.add_parser("demo", help="small bundled dynamic run (griewank, d=2)")
    demo.add_argument("--out", default="demo_out", help="output directory")
    demo.add_argument("--jobs", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        overrides = {k: v for k, v in vars(args).items()
                     if k not in ("command", "config")}
        try:
            cfg = _load_config(args.config, overrides)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return cmd_run(cfg)
    if args.command == "aggregate":
        return cmd_aggregate(args.inputs, args.out)
    return cmd_demo(args.out, args.jobs)


if __name__ == "__main__":
    sys.exit(main())
