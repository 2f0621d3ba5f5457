#!/usr/bin/env python3
"""Render rate-vs-spacing figures from aggregate.csv files.

Reads one or more aggregate.csv files written by the delaunay-density
CLI and plots the mean rate as a dot series against the average sample
spacing (log axis), with the inter-quartile band drawn darker and the
inter-decile band lighter. Dashed reference lines mark the expected
levels: 2 and 0 for the MSD rate, 1 and -1 for the gradient rate.
Repeated --input flags concatenate several spacing scales onto one
axis, separated by vertical dotted lines where their ranges meet.

This script does no statistics of its own; every band comes straight
from the quantile columns in the CSV.
"""

import argparse
import csv
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

COLUMNS = [
    "k", "n_k", "samp",
    "mean_msd", "q25_msd", "q75_msd", "d10_msd", "d90_msd",
    "mean_grad", "q25_grad", "q75_grad", "d10_grad", "d90_grad",
    "defined_count",
]

# reference levels per rate: recoverable on top, noise below
REFERENCE_LINES = {"msd": (2.0, 0.0), "grad": (1.0, -1.0)}
AXIS_LABELS = {"msd": "MSD rate", "grad": "grad-MSD rate"}


class SchemaError(Exception):
    """An input file does not conform to the aggregate.csv schema."""


@dataclass
class PlotSpec:
    inputs: List[str]
    rate: str = "both"
    out: str = "fig.png"
    nk_floor: int = 0
    descending: bool = False
    xlim: Optional[Tuple[Optional[float], Optional[float]]] = None


def load_aggregate(path: str) -> Dict[str, np.ndarray]:
    """Read one aggregate.csv into a dict of float arrays keyed by column."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        for col in COLUMNS:
            if col not in names:
                raise SchemaError(f"{path}: missing column '{col}'")
        rows = list(reader)
    data = {}
    for col in COLUMNS:
        try:
            data[col] = np.array([float(r[col]) for r in rows], dtype=float)
        except (TypeError, ValueError):
            raise SchemaError(f"{path}: non-numeric value in column '{col}'")
    return data


def _apply_floor(data: Dict[str, np.ndarray], nk_floor: int) -> Dict[str, np.ndarray]:
    keep = data["n_k"] >= nk_floor
    return {col: arr[keep] for col, arr in data.items()}


def _separators(segments: List[Dict[str, np.ndarray]]) -> List[float]:
    """Vertical cut positions between non-overlapping spacing ranges."""
    spans = sorted((float(np.min(s["samp"])), float(np.max(s["samp"])))
                   for s in segments)
    cuts = []
    for (_, hi_left), (lo_right, _) in zip(spans, spans[1:]):
        if lo_right > hi_left:
            cuts.append(float(np.sqrt(hi_left * lo_right)))
    return cuts


def _draw_panel(ax, segments: List[Dict[str, np.ndarray]], rate: str,
                descending: bool) -> None:
    for i, seg in enumerate(segments):
        x = seg["samp"]
        ax.fill_between(x, seg[f"d10_{rate}"], seg[f"d90_{rate}"],
                        color="0.85", linewidth=0)
        ax.fill_between(x, seg[f"q25_{rate}"], seg[f"q75_{rate}"],
                        color="0.62", linewidth=0)
        line, = ax.plot(x, seg[f"mean_{rate}"], color="black", marker="o",
                        markersize=4, linestyle="none")
        line.set_gid(f"mean:{rate}:{i}")
    for value in REFERENCE_LINES[rate]:
        ref = ax.axhline(value, color="black", linestyle="--", linewidth=0.8)
        ref.set_gid(f"ref:{rate}:{value:g}")
    for j, cut in enumerate(_separators(segments)):
        sep = ax.axvline(cut, color="0.4", linestyle=":", linewidth=0.9)
        sep.set_gid(f"sep:{rate}:{j}")
    ax.set_xscale("log")
    ax.set_ylabel(AXIS_LABELS[rate])
    if descending and not ax.xaxis_inverted():
        ax.invert_xaxis()


def render(spec: PlotSpec):
    """Build the figure for a spec. Returns the matplotlib Figure."""
    segments = []
    for path in spec.inputs:
        data = _apply_floor(load_aggregate(path), spec.nk_floor)
        if data["samp"].size == 0:
            raise SchemaError(
                f"{path}: no rows with n_k >= {spec.nk_floor}")
        segments.append(data)
    rates = ["msd", "grad"] if spec.rate == "both" else [spec.rate]
    fig, axes = plt.subplots(len(rates), 1, sharex=True, squeeze=False,
                             figsize=(6.4, 3.2 * len(rates)))
    for ax, rate in zip(axes[:, 0], rates):
        _draw_panel(ax, segments, rate, spec.descending)
    axes[-1, 0].set_xlabel("average sample spacing")
    if spec.xlim is not None:
        axes[-1, 0].set_xlim(*spec.xlim)
    fig.tight_layout()
    return fig


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plot.py",
        description="rate vs. sample spacing figures from aggregate.csv")
    p.add_argument("--input", action="append", required=True, metavar="CSV",
                   help="aggregate.csv path; repeat to concatenate scales")
    p.add_argument("--rate", choices=["msd", "grad", "both"], default="both",
                   help="which rate panel(s) to draw")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--nk-floor", type=int, default=0, dest="nk_floor",
                   help="drop rows with n_k below this")
    p.add_argument("--descending", action="store_true",
                   help="spacing axis decreasing left to right")
    p.add_argument("--xmin", type=float, default=None,
                   help="lower spacing-axis bound")
    p.add_argument("--xmax", type=float, default=None,
                   help="upper spacing-axis bound")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    xlim = None
    if args.xmin is not None or args.xmax is not None:
        xlim = (args.xmin, args.xmax)
    spec = PlotSpec(inputs=args.input, rate=args.rate, out=args.out,
                    nk_floor=args.nk_floor, descending=args.descending,
                    xlim=xlim)
    try:
        fig = render(spec)
    except (OSError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
