"""Domain geometry: distances, normals, projections."""

import numpy as np
import pytest

from rgbsde.geometry import (
    DegeneratePointError,
    ball,
    interval,
    inward_normal,
    phi,
    project_batch,
    project_to_closure,
)


def test_interval_phi_values():
    dom = interval(0.0, 1.0)
    assert phi(dom, 0.25) == 0.25
    assert phi(dom, 0.9) == pytest.approx(0.1)
    assert phi(dom, 0.0) == 0.0
    assert phi(dom, 1.0) == 0.0
    assert phi(dom, -0.3) == -0.3
    assert phi(dom, 1.2) == pytest.approx(-0.2)


def test_ball_phi_values():
    dom = ball([0.0, 0.0], 2.0)
    assert phi(dom, [0.0, 0.0]) == 2.0
    assert phi(dom, [2.0, 0.0]) == 0.0
    assert phi(dom, [3.0, 0.0]) == -1.0
    pts = np.array([[0.0, 1.0], [0.0, -2.5]])
    np.testing.assert_allclose(phi(dom, pts), [1.0, -0.5])


def test_interval_inward_normal_signs():
    dom = interval(-1.0, 3.0)
    assert inward_normal(dom, -0.9)[0] == 1.0
    assert inward_normal(dom, 2.5)[0] == -1.0
    with pytest.raises(DegeneratePointError):
        inward_normal(dom, 1.0)  # midpoint


def test_ball_inward_normal_points_to_center():
    dom = ball([1.0, 1.0], 1.0)
    n = inward_normal(dom, [2.0, 1.0])
    np.testing.assert_allclose(n, [-1.0, 0.0])
    assert np.linalg.norm(n) == pytest.approx(1.0)
    with pytest.raises(DegeneratePointError):
        inward_normal(dom, [1.0, 1.0])  # center


def test_normal_matches_fd_gradient_in_boundary_band():
    # Near the boundary phi is differentiable and its gradient is the
    # inward normal; check against central differences.
    rng = np.random.default_rng(7)
    h = 1e-6
    dom_i = interval(0.0, 1.0)
    for x in rng.uniform(0.01, 0.2, size=20):  # band near a, away from kink
        fd = (phi(dom_i, x + h) - phi(dom_i, x - h)) / (2 * h)
        assert abs(fd - inward_normal(dom_i, x)[0]) < 1e-6
    dom_b = ball([0.0, 0.0], 1.0)
    for _ in range(20):
        theta = rng.uniform(0, 2 * np.pi)
        r = rng.uniform(0.8, 0.99)
        x = np.array([r * np.cos(theta), r * np.sin(theta)])
        grad = np.empty(2)
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            grad[j] = (phi(dom_b, x + e) - phi(dom_b, x - e)) / (2 * h)
        np.testing.assert_allclose(grad, inward_normal(dom_b, x), atol=1e-6)


def test_projection_properties():
    rng = np.random.default_rng(11)
    dom_i = interval(0.0, 1.0)
    pts = rng.uniform(-1.0, 2.0, size=(200, 1))
    proj, dist = project_batch(dom_i, pts)
    # lands in the closure
    assert np.all(phi(dom_i, proj) >= -1e-12)
    # idempotent
    proj2, dist2 = project_batch(dom_i, proj)
    np.testing.assert_array_equal(proj, proj2)
    assert np.all(dist2 == 0.0)
    # distance is |x - proj| and zero inside
    np.testing.assert_allclose(dist, np.linalg.norm(pts - proj, axis=1))
    inside = phi(dom_i, pts) >= 0
    assert np.all(dist[inside] == 0.0)

    dom_b = ball([0.5, -0.5], 1.5)
    pts = rng.normal(scale=2.0, size=(200, 2))
    proj, dist = project_batch(dom_b, pts)
    assert np.all(phi(dom_b, proj) >= -1e-12)
    proj2, _ = project_batch(dom_b, proj)
    np.testing.assert_allclose(proj, proj2, atol=1e-15)
    np.testing.assert_allclose(dist, np.linalg.norm(pts - proj, axis=1), atol=1e-15)
    # normal consistency at projected boundary points: proj + dist * n = x is
    # wrong (n points inward), x = proj - dist * n.
    outside = dist > 0
    n = np.array([inward_normal(dom_b, p) for p in proj[outside]])
    np.testing.assert_allclose(
        proj[outside] - dist[outside, None] * n, pts[outside], atol=1e-12
    )


def test_single_point_projection_roundtrip():
    dom = interval(0.0, 1.0)
    p, d = project_to_closure(dom, 1.25)
    assert p[0] == 1.0 and d == pytest.approx(0.25)
    p, d = project_to_closure(dom, 0.4)
    assert p[0] == pytest.approx(0.4) and d == 0.0


def test_domain_validation_errors():
    with pytest.raises(ValueError):
        interval(1.0, 1.0)
    with pytest.raises(ValueError):
        ball([0.0], -2.0)
    from rgbsde.geometry import DomainSpec

    with pytest.raises(ValueError):
        DomainSpec(kind="triangle")
