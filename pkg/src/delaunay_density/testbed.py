"""Analytic test functions for exercising the diagnostic.

All evaluators accept an (m, d) array of points and return m values.  The
noise function is a true function of the point: its value is derived from a
hash of the seed and the coordinate bytes, so re-evaluating a point inside a
trial reproduces the same number.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "TestFunction",
    "griewank",
    "griewank_gradient",
    "ackley2",
    "uniform_noise",
    "quadratic_bowl",
    "quadratic_bowl_gradient",
    "FUNCTIONS",
    "make_function",
]


@dataclass(frozen=True)
class TestFunction:
    """A named evaluator, optionally with an analytic gradient."""

    name: str
    dim: int | None  # None means any dimension
    fn: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray] | None = None


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :]
    return x


def griewank(x) -> np.ndarray:
    """sum(x_i^2)/4000 - prod(cos(x_i/sqrt(i))) + 1, i counted from 1."""
    X = _as_points(x)
    scale = np.sqrt(np.arange(1, X.shape[1] + 1, dtype=float))
    out = (X * X).sum(axis=1) / 4000.0 - np.cos(X / scale).prod(axis=1) + 1.0
    return out if np.ndim(x) > 1 else out[0]


def griewank_gradient(x) -> np.ndarray:
    X = _as_points(x)
    d = X.shape[1]
    scale = np.sqrt(np.arange(1, d + 1, dtype=float))
    c = np.cos(X / scale)
    s = np.sin(X / scale)
    grad = X / 2000.0
    for j in range(d):
        others = np.prod(np.delete(c, j, axis=1), axis=1) if d > 1 else 1.0
        grad[:, j] += s[:, j] / scale[j] * others
    return grad if np.ndim(x) > 1 else grad[0]


def ackley2(x, y):
    """The two-dimensional Ackley function; 0 at the origin."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (
        -20.0 * np.exp(-0.2 * np.sqrt((x * x + y * y) / 2.0))
        - np.exp((np.cos(2.0 * np.pi * x) + np.cos(2.0 * np.pi * y)) / 2.0)
        + 20.0
        + np.e
    )


def uniform_noise(x, seed: int) -> np.ndarray:
    """Per-point pseudorandom value in [-1, 1), keyed to (seed, coordinates).

    Each point's value comes from a blake2b digest of the seed and the raw
    coordinate bytes, so it is stable across calls and platforms.
    """
    X = _as_points(x)
    tag = str(int(seed)).encode()
    out = np.empty(len(X))
    for i, row in enumerate(X):
        digest = hashlib.blake2b(row.tobytes() + tag, digest_size=8).digest()
        out[i] = 2.0 * (int.from_bytes(digest, "little") / 2.0**64) - 1.0
    return out if np.ndim(x) > 1 else out[0]


def quadratic_bowl(x) -> np.ndarray:
    """sum(x_i^2)/4000: the large-scale shape of griewank without oscillation."""
    X = _as_points(x)
    out = (X * X).sum(axis=1) / 4000.0
    return out if np.ndim(x) > 1 else out[0]


def quadratic_bowl_gradient(x) -> np.ndarray:
    X = _as_points(x)
    grad = X / 2000.0
    return grad if np.ndim(x) > 1 else grad[0]


FUNCTIONS = ("griewank", "ackley2", "uniform_noise", "quadratic_bowl")


def make_function(name: str, dim: int, seed: int | None = None) -> TestFunction:
    """Bind a registry name to an evaluator of (m, d) arrays.

    uniform_noise requires a seed; the others ignore it.
    """
    if name == "griewank":
        return TestFunction("griewank", None, griewank, griewank_gradient)
    if name == "quadratic_bowl":
        return TestFunction("quadratic_bowl", None, quadratic_bowl,
                            quadratic_bowl_gradient)
    if name == "ackley2":
        if dim != 2:
            raise ValueError("ackley2 is two-dimensional")
        return TestFunction("ackley2", 2, lambda X: ackley2(X[:, 0], X[:, 1]))
    if name == "uniform_noise":
        if seed is None:
            raise ValueError("uniform_noise needs a seed")
        return TestFunction("uniform_noise", None,
                            lambda X, _s=int(seed): uniform_noise(X, _s))
    raise ValueError(f"unknown function {name!r}; choose from {FUNCTIONS}")
