import numpy as np
import pytest
from hypothesis import given, strategies as st

from delaunay_density import (
    DegenerateSimplex,
    PointSet,
    WalkStatus,
    interpolant_gradient,
    simplex_gradient,
)
from oracles import gradient_solve


class TestSimplexGradient:
    @given(st.integers(0, 10**6))
    def test_svd_route_matches_linear_solve(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(1, 6))
        verts = rng.uniform(-1, 1, size=(d + 1, d))
        if abs(np.linalg.det(verts[1:] - verts[0])) < 1e-4:
            return
        vals = rng.normal(size=d + 1)
        got = simplex_gradient(verts, vals)
        expect = gradient_solve(verts, vals)
        assert np.allclose(got, expect, rtol=1e-7, atol=1e-9)

    def test_affine_is_exact(self):
        rng = np.random.default_rng(5)
        for d in (2, 3, 4, 5):
            coef = rng.normal(size=d)
            verts = rng.uniform(-2, 2, size=(d + 1, d))
            vals = verts @ coef + 1.25
            assert np.allclose(simplex_gradient(verts, vals), coef, atol=1e-9)

    def test_constant_values_give_zero_gradient(self):
        verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        g = simplex_gradient(verts, np.full(3, 7.0))
        assert np.allclose(g, 0.0, atol=1e-12)

    def test_flat_simplex_raises(self):
        verts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        with pytest.raises(DegenerateSimplex):
            simplex_gradient(verts, np.array([0.0, 1.0, 2.0]))


class TestInterpolantGradient:
    def test_affine_everywhere_interior(self):
        rng = np.random.default_rng(9)
        pts = rng.uniform(-1, 1, size=(300, 2))
        coef = np.array([2.0, -0.5])
        ps = PointSet(pts, pts @ coef + 0.1)
        for _ in range(40):
            q = rng.uniform(-0.5, 0.5, size=2)
            res = interpolant_gradient(ps, q)
            if res.gradient is not None:
                assert np.allclose(res.gradient, coef, atol=1e-9)

    def test_outside_hull_returns_none(self):
        rng = np.random.default_rng(11)
        pts = rng.uniform(0, 1, size=(50, 2))
        ps = PointSet(pts, np.zeros(50))
        res = interpolant_gradient(ps, np.array([30.0, 30.0]))
        assert res.gradient is None
        assert res.status is WalkStatus.EXTRAPOLATION

    def test_matches_per_simplex_gradient(self):
        rng = np.random.default_rng(13)
        pts = rng.uniform(0, 1, size=(80, 3))
        vals = np.sin(pts).sum(axis=1)
        ps = PointSet(pts, vals)
        from delaunay_density import walk_to_containing_simplex

        q = rng.uniform(0.3, 0.7, size=3)
        res = walk_to_containing_simplex(ps, q)
        assert res.status is WalkStatus.INTERIOR
        idx = list(res.simplex.vertex_indices)
        expect = simplex_gradient(ps.points[idx], ps.values[idx])
        got = interpolant_gradient(ps, q).gradient
        assert np.allclose(got, expect, rtol=1e-12, atol=1e-12)
