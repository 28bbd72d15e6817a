"""Tests for the fixed multilinear-rank chart, its Gram structure, and the
minimality campaign."""

import json
import math

import numpy as np
import pytest

from tensorcurv import curvature, tensors, tucker


def row_gram_loop(t, mode, r):
    """Oracle: row Gram of the mode flattening by direct summation."""
    out = np.zeros((r, r))
    for lam in range(r):
        for lam2 in range(r):
            total = 0.0
            for idx in np.ndindex(t.shape):
                if idx[mode] != lam:
                    continue
                other = list(idx)
                other[mode] = lam2
                total += t[idx] * t[tuple(other)]
            out[lam, lam2] = total
    return out


def unit(n, i):
    v = np.zeros(n)
    v[i] = 1.0
    return v


class TestRotations:
    def test_generator_is_skew(self):
        gen = tucker.skew_generator(4, 1, 3)
        np.testing.assert_array_equal(gen, -gen.T)
        assert gen[3, 1] == 1.0 and gen[1, 3] == -1.0

    def test_generator_index_validation(self):
        with pytest.raises(ValueError):
            tucker.skew_generator(3, 2, 2)
        with pytest.raises(ValueError):
            tucker.skew_generator(3, 1, 3)

    def test_exp_at_zero_is_identity(self):
        np.testing.assert_array_equal(tucker.rotation_exp(3, 0, 2, 0.0), np.eye(3))

    def test_quarter_turn_moves_first_basis_vector(self):
        rot = tucker.rotation_exp(2, 0, 1, math.pi / 2)
        np.testing.assert_allclose(rot @ unit(2, 0), unit(2, 1), atol=1e-15)

    def test_derivative_at_zero_is_generator(self):
        gen = tucker.skew_generator(3, 0, 2)
        h = 1e-6
        fd = (tucker.rotation_exp(3, 0, 2, h) - tucker.rotation_exp(3, 0, 2, -h)) / (2 * h)
        np.testing.assert_allclose(fd, gen, atol=1e-10)

    def test_one_parameter_group_property(self):
        gen = tucker.skew_generator(4, 1, 2)
        for u in (0.3, -1.2):
            rot = tucker.rotation_exp(4, 1, 2, u)
            h = 1e-6
            fd = (tucker.rotation_exp(4, 1, 2, u + h) - tucker.rotation_exp(4, 1, 2, u - h)) / (2 * h)
            np.testing.assert_allclose(fd, gen @ rot, atol=1e-9)
            np.testing.assert_allclose(fd, rot @ gen, atol=1e-9)


class TestGrassmannFactor:
    def test_pair_ordering(self):
        assert tucker.rotation_pairs(4, 2) == [(0, 2), (1, 2), (0, 3), (1, 3)]

    def test_zero_block_gives_identity(self):
        np.testing.assert_array_equal(tucker.grassmann_factor(4, 2, np.zeros(4)), np.eye(4))

    def test_orthogonality(self):
        rng = np.random.default_rng(0)
        for n, r in ((3, 1), (4, 2), (5, 3)):
            u = rng.standard_normal(r * (n - r))
            g = tucker.grassmann_factor(n, r, u)
            assert np.max(np.abs(g @ g.T - np.eye(n))) <= 1e-12

    def test_first_derivative_at_zero_is_generator(self):
        n, r = 4, 2
        pairs = tucker.rotation_pairs(n, r)
        _, dg, _ = tucker.grassmann_factor_derivs(n, r, np.zeros(len(pairs)))
        for k, (lam, mu) in enumerate(pairs):
            np.testing.assert_array_equal(dg[k], tucker.skew_generator(n, lam, mu))

    def test_second_derivative_at_zero_closed_form(self):
        # for ordered parameter pairs the second derivative of the rotation
        # product is -delta_mu E_(lam,lam') - delta_lam E_(mu,mu')
        n, r = 4, 2
        pairs = tucker.rotation_pairs(n, r)
        _, _, d2g = tucker.grassmann_factor_derivs(n, r, np.zeros(len(pairs)))
        for k, (lam, mu) in enumerate(pairs):
            for l in range(k, len(pairs)):
                lam2, mu2 = pairs[l]
                expected = np.zeros((n, n))
                if mu == mu2:
                    expected[lam, lam2] -= 1.0
                if lam == lam2:
                    expected[mu, mu2] -= 1.0
                np.testing.assert_array_equal(d2g[k, l], expected)

    @pytest.mark.parametrize("n,r", [(3, 1), (4, 2)])
    def test_derivatives_match_finite_differences(self, n, r):
        rng = np.random.default_rng(1)
        nparams = r * (n - r)
        chart = curvature.Chart(
            param_dim=nparams, value=lambda u: tucker.grassmann_factor(n, r, u)
        )
        for u in (np.zeros(nparams), 0.3 * rng.standard_normal(nparams)):
            _, dg, d2g = tucker.grassmann_factor_derivs(n, r, u)
            np.testing.assert_allclose(dg, curvature.fd_first_derivs(chart, u), atol=1e-8)
            np.testing.assert_allclose(d2g, curvature.fd_second_derivs(chart, u), atol=1e-6)


class TestCanonicalize:
    def test_round_trip(self):
        rng = np.random.default_rng(2)
        t = tensors.random_rank_r_tensor((3, 3, 3), (2, 2, 2), rng)
        point = tucker.canonicalize(t)
        assert point.rank == (2, 2, 2)
        np.testing.assert_allclose(point.original_tensor(), t, atol=1e-12)
        for g in point.aligning:
            assert tensors.is_orthogonal(g, tol=1e-12)

    def test_canonical_form_is_fixed_point(self):
        rng = np.random.default_rng(3)
        t = tensors.random_rank_r_tensor((3, 4, 3), (2, 2, 2), rng)
        canonical = tucker.canonicalize(t).canonical_tensor()
        again = tucker.canonicalize(canonical)
        # the singular vectors of the trailing (kernel) block are arbitrary,
        # so only the leading block of each aligning factor is pinned down
        for g, r in zip(again.aligning, again.rank):
            np.testing.assert_allclose(g[:r, :r], np.eye(r), atol=1e-10)
            np.testing.assert_allclose(g[:r, r:], 0.0, atol=1e-10)
        np.testing.assert_allclose(
            again.canonical_tensor(), canonical, atol=1e-12
        )

    def test_rank_one_core_carries_full_norm(self):
        rng = np.random.default_rng(4)
        t = tensors.random_rank_r_tensor((3, 3, 3), (1, 1, 1), rng)
        point = tucker.canonicalize(t)
        assert point.core.shape == (1, 1, 1)
        assert abs(point.core).max() == pytest.approx(tensors.frobenius_norm(t), rel=1e-12)

    def test_off_block_mass_is_tiny(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            t = tensors.random_rank_r_tensor((3, 3, 3), (2, 1, 2), rng)
            point = tucker.canonicalize(t)
            rotated = tensors.group_action(point.aligning, t)
            rotated[tuple(slice(0, r) for r in point.rank)] = 0.0
            assert np.max(np.abs(rotated)) <= 1e-12 * tensors.frobenius_norm(t)

    def test_ambiguous_rank_raises(self):
        rng = np.random.default_rng(6)
        t = tensors.random_rank_r_tensor((3, 3, 3), (1, 1, 1), rng)
        t = t / tensors.frobenius_norm(t)
        noisy = t + 1e-6 * rng.standard_normal(t.shape)
        with pytest.raises(tucker.AmbiguousRankError):
            tucker.canonicalize(noisy, rank=(1, 1, 1))

    def test_zero_tensor_rejected(self):
        with pytest.raises(ValueError):
            tucker.canonicalize(np.zeros((2, 2)))


class TestChartLayout:
    @pytest.mark.parametrize(
        "shape,rank,dim",
        [
            ((3, 3, 3), (2, 2, 2), 14),
            ((2, 2), (1, 1), 3),
            ((3, 2, 4), (2, 2, 2), 14),
            ((2, 2, 2, 2), (1, 2, 2, 1), 6),
        ],
    )
    def test_dimension_formula(self, shape, rank, dim):
        expected = sum(r * (n - r) for n, r in zip(shape, rank)) + math.prod(rank)
        assert dim == expected
        assert tucker.manifold_dim(shape, rank) == dim
        assert tucker.chart_layout(shape, rank).dim == dim

    def test_full_rank_mode_has_no_rotation_parameters(self):
        layout = tucker.chart_layout((2, 2, 2), (2, 2, 1))
        assert layout.mode_pairs[0] == ()
        assert layout.mode_pairs[1] == ()
        assert len(layout.mode_pairs[2]) == 1


def hand_point():
    """d=2, shape (2,2), rank (1,1), core entry 2."""
    return tucker.CanonicalPoint(
        shape=(2, 2),
        rank=(1, 1),
        core=np.array([[2.0]]),
        aligning=(np.eye(2), np.eye(2)),
    )


class TestTuckerChart:
    def test_origin_reproduces_canonical_tensor_exactly(self):
        rng = np.random.default_rng(7)
        t = tensors.random_rank_r_tensor((3, 2, 4), (2, 2, 2), rng)
        point = tucker.canonicalize(t)
        chart = tucker.tucker_chart(point)
        assert np.array_equal(chart.value(np.zeros(chart.param_dim)), point.canonical_tensor())

    def test_hand_example_frame_and_gram(self):
        point = hand_point()
        chart = tucker.tucker_chart(point)
        frame = curvature.tangent_frame(chart, np.zeros(3), derivatives="analytic")
        expected = np.zeros((3, 2, 2))
        expected[0][1, 0] = 2.0  # rotation of the first mode
        expected[1][0, 1] = 2.0  # rotation of the second mode
        expected[2][0, 0] = 1.0  # core perturbation
        np.testing.assert_array_equal(frame.basis, expected)
        np.testing.assert_allclose(frame.gram, np.diag([4.0, 4.0, 1.0]), atol=1e-14)

    def test_values_stay_on_the_manifold(self):
        rng = np.random.default_rng(8)
        t = tensors.random_rank_r_tensor((3, 3, 3), (2, 1, 2), rng)
        point = tucker.canonicalize(t)
        chart = tucker.tucker_chart(point)
        for _ in range(10):
            params = 0.1 * rng.standard_normal(chart.param_dim)
            assert tensors.multilinear_rank(chart.value(params)) == point.rank

    @pytest.mark.parametrize(
        "shape,rank",
        [((2, 2), (1, 1)), ((3, 3, 3), (2, 1, 2)), ((2, 2, 2), (2, 2, 1))],
    )
    def test_analytic_derivatives_match_fd(self, shape, rank):
        rng = np.random.default_rng(9)
        t = tensors.random_rank_r_tensor(shape, rank, rng)
        point = tucker.canonicalize(t)
        chart = tucker.tucker_chart(point)
        scale = np.max(np.abs(point.core))
        for params in (np.zeros(chart.param_dim), 0.2 * rng.standard_normal(chart.param_dim)):
            d1 = chart.first_derivs(params)
            d2 = chart.second_derivs(params)
            f1, f2 = curvature.finite_difference_derivatives(chart, params)
            np.testing.assert_allclose(d1, f1, rtol=1e-6, atol=1e-6 * scale)
            np.testing.assert_allclose(d2, f2, rtol=1e-4, atol=1e-4 * scale)

    def test_origin_closed_forms_match_product_rule_exactly(self):
        rng = np.random.default_rng(10)
        t = tensors.random_rank_r_tensor((3, 3, 3), (2, 2, 2), rng)
        point = tucker.canonicalize(t)
        chart = tucker.tucker_chart(point)
        zero = np.zeros(chart.param_dim)
        assert np.array_equal(tucker.chart_first_derivs_origin(point), chart.first_derivs(zero))
        assert np.array_equal(tucker.chart_second_derivs_origin(point), chart.second_derivs(zero))

    def test_same_mode_second_derivatives_are_tangent(self):
        # mixed rotation derivatives with a shared trailing index stay inside
        # the core block, hence have vanishing normal component
        rng = np.random.default_rng(11)
        t = tensors.random_rank_r_tensor((3, 3, 3), (2, 1, 2), rng)
        point = tucker.canonicalize(t)
        layout = tucker.chart_layout(point.shape, point.rank)
        chart = tucker.tucker_chart(point)
        zero = np.zeros(chart.param_dim)
        frame = curvature.tangent_frame(chart, zero, derivatives="analytic")
        second = chart.second_derivs(zero)
        checked = 0
        for j, pairs in enumerate(layout.mode_pairs):
            start = layout.mode_slices[j].start
            for k, (lam, mu) in enumerate(pairs):
                for l, (lam2, mu2) in enumerate(pairs):
                    if mu != mu2:
                        continue
                    vec = second[start + k, start + l]
                    residual = curvature.normal_project(vec, frame)
                    assert np.linalg.norm(residual) <= 1e-10 * np.linalg.norm(vec)
                    checked += 1
        assert checked > 0

    def test_bad_parameter_length_rejected(self):
        chart = tucker.tucker_chart(hand_point())
        with pytest.raises(ValueError):
            chart.value(np.zeros(chart.param_dim + 1))


class TestGramBlockReport:
    def test_hand_example_blocks(self):
        report = tucker.gram_block_report(hand_point())
        np.testing.assert_allclose(report.flattening_row_grams[0], [[4.0]])
        np.testing.assert_allclose(report.flattening_row_grams[1], [[4.0]])
        assert report.off_structure_max == 0.0
        assert report.s_block_max_dev == 0.0

    @pytest.mark.parametrize(
        "shape,rank",
        [((3, 3), (2, 2)), ((3, 3, 3), (2, 2, 2)), ((3, 2, 4), (2, 2, 2))],
    )
    def test_structure_on_random_points(self, shape, rank):
        rng = np.random.default_rng(12)
        t = tensors.random_rank_r_tensor(shape, rank, rng)
        point = tucker.canonicalize(t)
        report = tucker.gram_block_report(point)
        gmax = np.max(np.abs(report.gram))
        assert report.off_structure_max <= 1e-12 * gmax
        assert report.s_block_max_dev <= 1e-13
        assert report.a_block_max_dev <= 1e-12 * gmax
        m = report.dim
        assert report.min_eig > 1e-10 * np.trace(report.gram) / m
        # independent oracle for the flattening row Grams
        canonical = point.canonical_tensor()
        for j, r in enumerate(rank):
            oracle = row_gram_loop(canonical, j, r)
            np.testing.assert_allclose(
                report.flattening_row_grams[j], oracle, rtol=1e-12, atol=1e-12 * gmax
            )

    def test_s_block_is_exactly_identity(self):
        rng = np.random.default_rng(13)
        t = tensors.random_rank_r_tensor((3, 3, 3), (2, 1, 2), rng)
        point = tucker.canonicalize(t)
        report = tucker.gram_block_report(point)
        layout = tucker.chart_layout(point.shape, point.rank)
        s_block = report.gram[layout.core_slice, layout.core_slice]
        assert np.array_equal(s_block, np.eye(s_block.shape[0]))


class TestVerifyMinimality:
    @pytest.mark.parametrize(
        "shape,rank",
        [((3, 3), (2, 2)), ((2, 2, 2), (1, 1, 1)), ((3, 3, 3), (2, 1, 2))],
    )
    def test_mean_curvature_vanishes(self, shape, rank):
        report = tucker.verify_minimality(shape, rank, samples=10, seed=42)
        assert report.passed
        assert report.max_ratio <= 1e-8
        assert report.rank_failures == 0

    def test_report_schema(self):
        report = tucker.verify_minimality((2, 2), (1, 1), samples=3, seed=0)
        data = report.to_json_dict()
        assert set(data["summary"]) == {"pass", "max_ratio", "samples", "rank_failures"}
        for row in data["samples"]:
            assert set(row) == {
                "sample",
                "shape",
                "rank",
                "gram_min_eig",
                "curvature_ratio",
                "off_structure_max",
            }

    def test_same_seed_is_byte_deterministic(self):
        a = tucker.verify_minimality((3, 3, 3), (2, 2, 2), samples=4, seed=5)
        b = tucker.verify_minimality((3, 3, 3), (2, 2, 2), samples=4, seed=5)
        assert json.dumps(a.to_json_dict(), sort_keys=True) == json.dumps(
            b.to_json_dict(), sort_keys=True
        )

    def test_samples_are_independent_of_sample_count(self):
        short = tucker.verify_minimality((2, 2, 2), (1, 1, 1), samples=3, seed=9)
        long = tucker.verify_minimality((2, 2, 2), (1, 1, 1), samples=6, seed=9)
        assert short.to_json_dict()["samples"] == long.to_json_dict()["samples"][:3]

    def test_inadmissible_rank_rejected(self):
        with pytest.raises(ValueError):
            tucker.verify_minimality((3, 3, 3), (3, 1, 1), samples=2, seed=0)
        with pytest.raises(ValueError):
            tucker.verify_minimality((2, 2), (0, 0), samples=2, seed=0)

    def test_full_rank_chart_is_flat(self):
        # every mode at full rank: the chart is an affine embedding with no
        # rotation parameters, trivially minimal
        report = tucker.verify_minimality((2, 2), (2, 2), samples=3, seed=1)
        assert report.passed
        layout = tucker.chart_layout((2, 2), (2, 2))
        assert layout.dim == 4
        assert all(len(pairs) == 0 for pairs in layout.mode_pairs)
