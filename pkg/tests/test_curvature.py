"""Tests for the chart-based curvature engine on classical surfaces."""

import numpy as np
import pytest

from tensorcurv import curvature


def circle_chart():
    return curvature.Chart(
        param_dim=1,
        value=lambda u: np.array([np.cos(u[0]), np.sin(u[0])]),
    )


def sphere_chart():
    def value(u):
        theta, phi = u
        return np.array(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
        )

    return curvature.Chart(param_dim=2, value=value)


def trig_chart():
    """Analytic chart with hand-coded derivative backends, for oracle checks."""

    def value(u):
        a, b = u
        return np.array([np.sin(a) * np.cos(b), a * b, np.exp(0.3 * a - 0.2 * b)])

    def first(u):
        a, b = u
        return np.array(
            [
                [np.cos(a) * np.cos(b), b, 0.3 * np.exp(0.3 * a - 0.2 * b)],
                [-np.sin(a) * np.sin(b), a, -0.2 * np.exp(0.3 * a - 0.2 * b)],
            ]
        )

    def second(u):
        a, b = u
        e = np.exp(0.3 * a - 0.2 * b)
        out = np.empty((2, 2, 3))
        out[0, 0] = [-np.sin(a) * np.cos(b), 0.0, 0.09 * e]
        out[0, 1] = [-np.cos(a) * np.sin(b), 1.0, -0.06 * e]
        out[1, 0] = out[0, 1]
        out[1, 1] = [-np.sin(a) * np.cos(b), 0.0, 0.04 * e]
        return out

    return curvature.Chart(param_dim=2, value=value, first_derivs=first, second_derivs=second)


class TestFiniteDifferences:
    def test_square_second_derivative(self):
        chart = curvature.Chart(param_dim=1, value=lambda u: np.array([u[0] ** 2]))
        second = curvature.fd_second_derivs(chart, np.zeros(1), h=1e-4)
        assert second[0, 0, 0] == pytest.approx(2.0, abs=1e-6)

    def test_step_must_be_positive(self):
        chart = circle_chart()
        with pytest.raises(ValueError):
            curvature.fd_first_derivs(chart, np.zeros(1), h=0.0)

    def test_against_analytic_backends(self):
        chart = trig_chart()
        rng = np.random.default_rng(0)
        for _ in range(5):
            u = rng.uniform(-1.0, 1.0, size=2)
            d1, d2 = curvature.finite_difference_derivatives(chart, u)
            a1 = chart.first_derivs(u)
            a2 = chart.second_derivs(u)
            np.testing.assert_allclose(d1, a1, rtol=1e-6, atol=1e-8)
            np.testing.assert_allclose(d2, a2, rtol=1e-4, atol=1e-6)


class TestTangentFrame:
    def test_linear_chart(self):
        chart = curvature.Chart(param_dim=1, value=lambda u: np.array([u[0], 0.0]))
        frame = curvature.tangent_frame(chart, np.zeros(1))
        np.testing.assert_allclose(frame.basis, [[1.0, 0.0]], atol=1e-10)
        np.testing.assert_allclose(frame.gram, [[1.0]], atol=1e-10)

    def test_circle_is_arc_length(self):
        chart = circle_chart()
        for theta in (0.0, 0.7, 2.5):
            frame = curvature.tangent_frame(chart, np.array([theta]))
            np.testing.assert_allclose(frame.gram, [[1.0]], atol=1e-10)

    def test_degenerate_chart_raises(self):
        chart = curvature.Chart(
            param_dim=2, value=lambda u: np.array([u[0] + u[1], 0.0])
        )
        with pytest.raises(curvature.DegenerateChartError):
            curvature.tangent_frame(chart, np.zeros(2))


class TestNormalProject:
    def test_tangent_vector_annihilated(self):
        chart = sphere_chart()
        u = np.array([1.1, 0.4])
        frame = curvature.tangent_frame(chart, u)
        v = 0.3 * frame.basis[0] - 1.7 * frame.basis[1]
        out = curvature.normal_project(v, frame)
        assert np.linalg.norm(out) <= 1e-10 * np.linalg.norm(v)

    def test_normal_vector_unchanged(self):
        chart = sphere_chart()
        u = np.array([1.1, 0.4])
        frame = curvature.tangent_frame(chart, u)
        normal = chart.value(u)  # radial direction is normal to the sphere
        out = curvature.normal_project(normal, frame)
        np.testing.assert_allclose(out, normal, atol=1e-10)

    def test_decomposition_is_orthogonal(self):
        chart = sphere_chart()
        rng = np.random.default_rng(1)
        u = np.array([1.0, 0.7])
        frame = curvature.tangent_frame(chart, u)
        for _ in range(10):
            v = rng.standard_normal(3)
            normal = curvature.normal_project(v, frame)
            tangent = v - normal
            assert abs(np.dot(normal, tangent)) <= 1e-10 * np.linalg.norm(v) ** 2
            for b in frame.basis:
                assert abs(np.dot(normal, b)) <= 1e-10 * np.linalg.norm(v)


class TestSecondFundamentalForm:
    def test_linear_chart_vanishes(self):
        mat = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, -1.0]])
        chart = curvature.Chart(param_dim=2, value=lambda u: mat @ u)
        out = curvature.second_fundamental_form(chart, np.zeros(2), [1.0, 0.5], [0.2, 1.0])
        np.testing.assert_allclose(out, np.zeros(3), atol=1e-8)

    def test_circle_inward_normal(self):
        chart = circle_chart()
        out = curvature.second_fundamental_form(chart, np.zeros(1), [1.0], [1.0])
        np.testing.assert_allclose(out, [-1.0, 0.0], atol=1e-7)

    def test_symmetry_and_bilinearity(self):
        chart = sphere_chart()
        rng = np.random.default_rng(2)
        u = np.array([0.9, 1.3])
        for _ in range(5):
            x, y, z = rng.standard_normal((3, 2))
            a, b = rng.standard_normal(2)
            bxy = curvature.second_fundamental_form(chart, u, x, y)
            byx = curvature.second_fundamental_form(chart, u, y, x)
            np.testing.assert_allclose(bxy, byx, rtol=1e-10, atol=1e-10)
            combo = curvature.second_fundamental_form(chart, u, a * x + b * z, y)
            expect = a * bxy + b * curvature.second_fundamental_form(chart, u, z, y)
            np.testing.assert_allclose(combo, expect, rtol=1e-8, atol=1e-10)


class TestMeanCurvature:
    def test_hyperplane_is_minimal(self):
        mat = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, -0.5]])
        chart = curvature.Chart(param_dim=2, value=lambda u: mat @ u + 1.0)
        out = curvature.mean_curvature(chart, np.zeros(2))
        assert out.norm <= 1e-8
        assert out.ratio == 0.0 or out.ratio <= 1e-8

    def test_circle(self):
        out = curvature.mean_curvature(circle_chart(), np.zeros(1))
        np.testing.assert_allclose(out.vector, [-1.0, 0.0], atol=1e-7)
        assert out.norm == pytest.approx(1.0, abs=1e-7)

    def test_sphere_norm_two(self):
        chart = sphere_chart()
        u = np.array([1.0, 0.7])
        out = curvature.mean_curvature(chart, u)
        assert out.norm == pytest.approx(2.0, abs=1e-6)
        # H points inward along the radius
        np.testing.assert_allclose(out.vector, -2.0 * chart.value(u), atol=1e-6)

    def test_mean_curvature_is_normal(self):
        chart = sphere_chart()
        u = np.array([0.8, 2.0])
        frame = curvature.tangent_frame(chart, u)
        out = curvature.mean_curvature(chart, u)
        for b in frame.basis:
            ratio = abs(np.dot(out.vector, b)) / (out.norm * np.linalg.norm(b))
            assert ratio <= 1e-8

    def test_reparametrization_invariance(self):
        rng = np.random.default_rng(3)
        chart = sphere_chart()
        u = np.array([1.2, 0.5])
        reference = curvature.mean_curvature(chart, u)
        for _ in range(5):
            mat = rng.standard_normal((2, 2))
            while abs(np.linalg.det(mat)) < 0.3:
                mat = rng.standard_normal((2, 2))
            shift = rng.standard_normal(2)
            moved = curvature.affine_reparametrization(chart, mat, shift)
            v = np.linalg.solve(mat, u - shift)
            out = curvature.mean_curvature(moved, v)
            np.testing.assert_allclose(
                out.vector, reference.vector, rtol=1e-6, atol=1e-6 * reference.norm
            )

    def test_reparametrization_invariance_analytic(self):
        rng = np.random.default_rng(4)
        chart = trig_chart()
        u = np.array([0.4, -0.3])
        reference = curvature.mean_curvature(chart, u, derivatives="analytic")
        mat = rng.standard_normal((2, 2)) + 2.0 * np.eye(2)
        shift = rng.standard_normal(2)
        moved = curvature.affine_reparametrization(chart, mat, shift)
        v = np.linalg.solve(mat, u - shift)
        out = curvature.mean_curvature(moved, v, derivatives="analytic")
        np.testing.assert_allclose(out.vector, reference.vector, rtol=1e-9, atol=1e-12)

    def test_analytic_mode_requires_backends(self):
        with pytest.raises(ValueError):
            curvature.mean_curvature(circle_chart(), np.zeros(1), derivatives="analytic")
        with pytest.raises(ValueError):
            curvature.mean_curvature(circle_chart(), np.zeros(1), derivatives="bogus")
