"""Manifold models: canonical forms, metrics, distances.

The projective metric is pinned by an independent arclength oracle: with
chart components 4[(1+|u|^2)I - u u^T]/(1+|u|^2)^2 the total length of
RP^1 must come out as 2*pi (the radius-2 circle quotient).
"""

import numpy as np
import pytest

from morseflow import geometry
from morseflow.errors import DegeneratePointError, UnknownManifoldError


def test_parse_manifold_names():
    assert geometry.parse_manifold("torus2").kind == "torus"
    assert geometry.parse_manifold("torus2").n == 2
    assert geometry.parse_manifold("torusN:3").n == 3
    assert geometry.parse_manifold("circle").n == 1
    assert geometry.parse_manifold("circle").kind == "torus"
    assert geometry.parse_manifold("sphere2").n == 2
    assert geometry.parse_manifold("rp2").kind == "projective"
    with pytest.raises(UnknownManifoldError):
        geometry.parse_manifold("klein")
    with pytest.raises(UnknownManifoldError):
        geometry.parse_manifold("rp7")


def test_ambient_dimensions():
    assert geometry.torus(2).ambient_dim == 2
    assert geometry.sphere(2).ambient_dim == 3
    assert geometry.projective(2).ambient_dim == 3


def test_torus_canonicalize_wraps():
    m = geometry.torus(2)
    p = geometry.canonicalize(m, (1.25, -0.5))
    assert np.allclose(p, (0.25, 0.5))
    # idempotent
    assert np.allclose(geometry.canonicalize(m, p), p)


def test_sphere_canonicalize_normalizes():
    m = geometry.sphere(2)
    p = geometry.canonicalize(m, (3.0, 0.0, 4.0))
    assert np.allclose(p, (0.6, 0.0, 0.8))
    with pytest.raises(DegeneratePointError):
        geometry.canonicalize(m, (0.0, 0.0, 0.0))


def test_projective_canonical_pivot_is_one():
    m = geometry.projective(2)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.normal(size=3)
        p = geometry.canonicalize(m, x)
        piv = np.argmax(np.abs(p))
        assert p[piv] == 1.0
        # the antipode lands on the same representative
        q = geometry.canonicalize(m, -x)
        assert np.allclose(p, q)


def test_metric_symmetric_positive_definite():
    rng = np.random.default_rng(4)
    for m in (geometry.torus(2), geometry.sphere(2), geometry.projective(2)):
        for _ in range(10):
            x = rng.normal(size=m.ambient_dim) + 0.1
            g = geometry.metric(m, geometry.canonicalize(m, x))
            assert np.allclose(g, g.T)
            assert np.all(np.linalg.eigvalsh(g) > 0)


def test_rp1_total_length_is_two_pi():
    # two affine charts, each covering the |u| <= 1 half; Simpson quadrature
    # of sqrt(g(u)) du, doubled.  g(u) = 4/(1+u^2)^2 in dimension one.
    m = geometry.projective(1)
    n = 400
    us = np.linspace(-1.0, 1.0, n + 1)
    vals = []
    for u in us:
        g = geometry.metric(m, (1.0, u))
        vals.append(np.sqrt(g[0, 0]))
    h = 2.0 / n
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    half = h / 3.0 * np.dot(w, vals)
    assert abs(2.0 * half - 2.0 * np.pi) < 1e-9


def test_torus_metric_diag_override():
    m = geometry.torus(2, metric_diag=(1.0, 1.3))
    g = geometry.metric(m, (0.2, 0.7))
    assert np.allclose(g, np.diag([1.0, 1.3]))


def test_distance_wraps_and_identifies():
    t = geometry.torus(2)
    assert abs(geometry.distance(t, (0.1, 0.0), (0.9, 0.0)) - 0.2) < 1e-12
    assert geometry.distance(t, (0.3, 0.4), (1.3, -0.6)) < 1e-12

    s = geometry.sphere(2)
    assert abs(geometry.distance(s, (0, 0, 1), (0, 0, -1)) - 2.0) < 1e-12

    p = geometry.projective(2)
    assert geometry.distance(p, (1.0, 0.2, 0.0), (-1.0, -0.2, 0.0)) < 1e-12
    assert geometry.distance(p, (1, 0, 0), (0, 1, 0)) > 1.0


def test_tangent_frame_orthonormal():
    for m in (geometry.sphere(2), geometry.projective(2)):
        x = geometry.canonicalize(m, (0.3, -0.5, 0.81))
        F = geometry.tangent_frame(m, x)
        assert F.shape == (3, 2)
        assert np.allclose(F.T @ F, np.eye(2), atol=1e-12)
        lift = geometry.unit_lift(m, x)
        assert np.allclose(F.T @ lift, 0.0, atol=1e-12)


def test_seed_points_cover_and_canonical():
    t = geometry.torus(2)
    seeds = geometry.seed_points(t, 4)
    assert len(seeds) == 16
    for s in seeds:
        assert np.all((s >= 0.0) & (s < 1.0))

    sp = geometry.sphere(2)
    for s in geometry.seed_points(sp, 4):
        assert abs(np.linalg.norm(s) - 1.0) < 1e-12
