#!/usr/bin/env python3
"""
Tests for the exterior-algebra engine: volumes, expansion factors and traces
"""

import numpy as np
import pytest

from chodim.core.exceptions import ConfigurationError, DegenerateFrameError, DimensionMismatchError
from chodim.services.multilinear import (
    DenseOperator, VectorFrame, InnerProduct, MultilinearValidator,
    gram, wedge_norm, log_wedge_norm, gram_orthogonalize, omega_d, lambda_d_apply,
    trace_form, projected_trace, projector, mu_spectrum, trace_d, generalized_trace_d,
    symmetric_part, random_orthonormal_frame, sampled_omega_d, equivalence_constant,
)


def random_spd(rng, dim, spread=3.0):
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return (Q * rng.uniform(1.0 / spread, spread, dim)) @ Q.T


I2 = InnerProduct.identity(2)
I3 = InnerProduct.identity(3)


class TestGramAndWedge:
    def test_orthonormal_pair(self):
        G = gram(VectorFrame.canonical(2, 2), I2)
        np.testing.assert_allclose(G.entries, np.eye(2))

    def test_sheared_pair(self):
        frame = VectorFrame.from_columns([1, 0], [1, 1])
        np.testing.assert_allclose(gram(frame, I2).entries, [[1, 1], [1, 2]])
        assert wedge_norm(frame, I2) == pytest.approx(1.0, abs=1e-14)

    def test_repeated_vector_is_singular(self):
        frame = VectorFrame.from_columns([1, 2, 3], [1, 2, 3])
        assert gram(frame, I3).det == pytest.approx(0.0, abs=1e-12)
        assert wedge_norm(frame, I3) == 0.0
        assert np.isneginf(log_wedge_norm(frame, I3))

    def test_degenerate_parallelepiped(self):
        frame = VectorFrame.from_columns([1, 0], [2, 0])
        assert wedge_norm(frame, I2) == 0.0

    def test_unit_square(self):
        assert wedge_norm(VectorFrame.canonical(2, 2), I2) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            gram(VectorFrame.canonical(3, 2), I2)

    def test_hadamard_bound(self, rng):
        for _ in range(1000):
            vectors = rng.standard_normal((5, 3))
            bound = np.prod(np.linalg.norm(vectors, axis=0))
            assert wedge_norm(VectorFrame(vectors), InnerProduct.identity(5)) <= bound * (1 + 1e-12)

    def test_log_wedge_matches_determinant(self, rng):
        form = InnerProduct.from_matrix(random_spd(rng, 6))
        frame = VectorFrame(rng.standard_normal((6, 3)))
        expected = 0.5 * np.log(np.linalg.det(gram(frame, form).entries))
        assert log_wedge_norm(frame, form) == pytest.approx(expected, rel=1e-10)


class TestGramOrthogonalize:
    def test_by_hand(self):
        out = gram_orthogonalize(VectorFrame.from_columns([1, 0], [1, 1]), I2)
        np.testing.assert_allclose(out.vectors, np.eye(2), atol=1e-14)

    def test_fixed_point(self):
        frame = VectorFrame.from_columns([2, 0, 0], [0, 0, 3])
        np.testing.assert_allclose(gram_orthogonalize(frame, I3).vectors, frame.vectors, atol=1e-14)

    def test_dependent_column_maps_to_zero(self):
        out = gram_orthogonalize(VectorFrame.from_columns([1, 0], [1, 0]), I2)
        np.testing.assert_allclose(out.vectors, [[1, 0], [0, 0]])

    def test_volume_preserved_and_norms_shrink(self, rng):
        for _ in range(100):
            form = InnerProduct.from_matrix(random_spd(rng, 7))
            frame = VectorFrame(rng.standard_normal((7, 4)))
            out = gram_orthogonalize(frame, form)
            G = gram(out, form).entries
            off = G - np.diag(np.diag(G))
            assert np.abs(off).max() <= 1e-10 * np.abs(G).max()
            assert wedge_norm(out, form) == pytest.approx(wedge_norm(frame, form), rel=1e-10)
            for i in range(frame.d):
                assert form.norm(out.column(i)) <= form.norm(frame.column(i)) * (1 + 1e-12)


class TestOmegaD:
    L = DenseOperator.diag([2.0, 1.0, 0.5])

    def test_top_two(self):
        assert omega_d(self.L, 2, I3) == pytest.approx(2.0)

    def test_full_volume(self):
        assert omega_d(self.L, 3, I3) == pytest.approx(1.0)

    def test_identity_preserves_volumes(self):
        for d in (1, 2, 3):
            assert omega_d(DenseOperator.identity(3), d, I3) == pytest.approx(1.0)

    def test_d_too_large(self):
        with pytest.raises(DimensionMismatchError):
            omega_d(self.L, 4, I3)

    def test_sampling_oracle(self, rng):
        sampled = sampled_omega_d(self.L, 2, I3, rng, n_samples=2000)
        assert sampled <= 2.0 + 1e-9
        assert sampled > 1.5
        refined = sampled_omega_d(self.L, 2, I3, rng, n_samples=200, refine_steps=200)
        assert refined == pytest.approx(2.0, abs=1e-8)

    @pytest.mark.slow
    def test_sampling_oracle_population(self, rng):
        for i in range(500):
            dim = int(rng.integers(1, 7))
            L = DenseOperator(rng.standard_normal((dim, dim)))
            form = InnerProduct.from_matrix(random_spd(rng, dim)) if i % 2 else InnerProduct.identity(dim)
            for d in range(1, dim + 1):
                exact = omega_d(L, d, form)
                best = sampled_omega_d(L, d, form, rng, n_samples=10_000, refine_steps=50)
                assert best <= exact + 1e-9 * max(1.0, exact)
                assert best >= 0.99 * exact

    def test_raw_samples_never_exceed_closed_form(self, rng):
        for _ in range(50):
            dim = int(rng.integers(2, 7))
            L = DenseOperator(rng.standard_normal((dim, dim)))
            form = InnerProduct.from_matrix(random_spd(rng, dim))
            d = int(rng.integers(1, dim + 1))
            exact = omega_d(L, d, form)
            assert sampled_omega_d(L, d, form, rng, n_samples=5000) <= exact + 1e-9 * max(1.0, exact)

    def test_sampling_oracle_weighted_form(self, rng):
        form = InnerProduct.from_matrix(random_spd(rng, 4))
        L = DenseOperator(rng.standard_normal((4, 4)))
        exact = omega_d(L, 2, form)
        refined = sampled_omega_d(L, 2, form, rng, n_samples=200, refine_steps=2000)
        assert refined <= exact * (1 + 1e-9)
        assert refined == pytest.approx(exact, rel=1e-4)

    def test_norm_power_bound(self, rng):
        for _ in range(1000):
            dim = int(rng.integers(1, 6))
            L = DenseOperator(rng.standard_normal((dim, dim)))
            form = InnerProduct.identity(dim)
            for d in range(1, dim + 1):
                assert L.norm() ** d - omega_d(L, d, form) >= -1e-9 * max(1.0, L.norm() ** d)

    def test_submultiplicative(self, rng):
        for _ in range(1000):
            dim = int(rng.integers(1, 6))
            L1 = DenseOperator(rng.standard_normal((dim, dim)))
            L2 = DenseOperator(rng.standard_normal((dim, dim)))
            form = InnerProduct.identity(dim)
            for d in range(1, dim + 1):
                lhs = omega_d(L1 @ L2, d, form)
                rhs = omega_d(L1, d, form) * omega_d(L2, d, form)
                assert rhs - lhs >= -1e-9 * max(1.0, rhs)

    def test_equivalent_form_sandwich(self, rng):
        for _ in range(50):
            form = InnerProduct.from_matrix(random_spd(rng, 5))
            c = equivalence_constant(InnerProduct.identity(5), form)
            L = DenseOperator(rng.standard_normal((5, 5)))
            for d in range(1, 6):
                base = omega_d(L, d, InnerProduct.identity(5))
                weighted = omega_d(L, d, form)
                assert c ** (-d) * base <= weighted * (1 + 1e-10)
                assert weighted <= c ** d * base * (1 + 1e-10)


class TestLambdaD:
    def test_identity(self):
        frame = VectorFrame.from_columns([1, 2], [3, 4])
        np.testing.assert_array_equal(lambda_d_apply(DenseOperator.identity(2), frame).vectors, frame.vectors)

    def test_diagonal(self):
        out = lambda_d_apply(DenseOperator.diag([2, 3]), VectorFrame.canonical(2, 2))
        np.testing.assert_allclose(out.vectors, np.diag([2.0, 3.0]))
        assert wedge_norm(out, I2) == pytest.approx(6.0)

    def test_zero(self):
        out = lambda_d_apply(DenseOperator.zeros(2), VectorFrame.canonical(2, 2))
        assert wedge_norm(out, I2) == 0.0


class TestTraceForm:
    def test_scalar_operator(self, rng):
        frame = VectorFrame(rng.standard_normal((5, 3)))
        L = DenseOperator.identity(5).scaled(-1.7)
        assert trace_form(L, frame, InnerProduct.identity(5)) == pytest.approx(-1.7 * 3)

    def test_diagonal(self):
        L = DenseOperator.diag([3, 1, -1])
        assert trace_form(L, VectorFrame.canonical(3, 2), I3) == pytest.approx(4.0)

    def test_two_paths_agree(self, rng):
        for _ in range(1000):
            dim = int(rng.integers(2, 9))
            d = int(rng.integers(1, dim + 1))
            form = InnerProduct.from_matrix(random_spd(rng, dim))
            L = DenseOperator(rng.standard_normal((dim, dim)))
            frame = VectorFrame(rng.standard_normal((dim, d)))
            expansion = trace_form(L, frame, form)
            assert projected_trace(L, frame, form) == pytest.approx(expansion, rel=1e-10, abs=1e-10)

    def test_projector_trace(self, rng):
        form = InnerProduct.from_matrix(random_spd(rng, 6))
        L = DenseOperator(rng.standard_normal((6, 6)))
        frame = VectorFrame(rng.standard_normal((6, 2)))
        Q = projector(frame, form)
        np.testing.assert_allclose((Q @ Q).entries, Q.entries, atol=1e-10)
        assert np.trace((Q @ L @ Q).entries) == pytest.approx(trace_form(L, frame, form), rel=1e-9)

    def test_symmetric_part_identity(self, rng):
        form = InnerProduct.from_matrix(random_spd(rng, 5))
        L = DenseOperator(rng.standard_normal((5, 5)))
        frame = VectorFrame(rng.standard_normal((5, 3)))
        assert trace_form(symmetric_part(L, form), frame, form) == pytest.approx(
            trace_form(L, frame, form), rel=1e-10, abs=1e-10
        )

    def test_ld_norm_bound(self, rng):
        for _ in range(1000):
            L = DenseOperator(rng.standard_normal((6, 6)))
            d = int(rng.integers(1, 7))
            frame = VectorFrame(rng.standard_normal((6, d)))
            assert abs(trace_form(L, frame, InnerProduct.identity(6))) <= d * L.norm() * (1 + 1e-10)

    def test_degenerate_frame_rejected(self):
        with pytest.raises(DegenerateFrameError):
            trace_form(DenseOperator.identity(2), VectorFrame.from_columns([1, 0], [1, 0]), I2)


class TestMuSpectrumAndTraceD:
    def test_diagonal(self):
        np.testing.assert_allclose(mu_spectrum(DenseOperator.diag([-1, 3, 1]), I3), [3, 1, -1])

    def test_identity(self):
        np.testing.assert_allclose(mu_spectrum(DenseOperator.identity(4), InnerProduct.identity(4)), np.ones(4))

    def test_sampled_min_max(self, rng):
        for dim in (2, 3, 4):
            A = rng.standard_normal((dim, dim))
            S = 0.5 * (A + A.T)
            mu = mu_spectrum(DenseOperator(S), InnerProduct.identity(dim))
            for k in range(1, dim + 1):
                sampled = np.inf
                for _ in range(300):
                    W = rng.standard_normal((dim, k - 1))
                    basis = np.linalg.svd(W, full_matrices=True)[0][:, k - 1:] if k > 1 else np.eye(dim)
                    sampled = min(sampled, np.linalg.eigvalsh(basis.T @ S @ basis).max())
                assert sampled >= mu[k - 1] - 1e-6

    def test_trace_d_examples(self):
        assert trace_d(DenseOperator.diag([3, 1, -1]), 2, I3) == pytest.approx(4.0)
        for d in (1, 2, 3):
            assert trace_d(DenseOperator.identity(3).scaled(-0.4), d, I3) == pytest.approx(-0.4 * d)

    def test_d_out_of_range(self):
        with pytest.raises(DimensionMismatchError):
            trace_d(DenseOperator.identity(3), 0, I3)

    def test_subadditive(self, rng):
        form = InnerProduct.identity(6)
        for _ in range(1000):
            A, B = rng.standard_normal((2, 6, 6))
            S1, S2 = DenseOperator(A + A.T), DenseOperator(B + B.T)
            for d in range(1, 7):
                assert trace_d(S1 + S2, d, form) <= trace_d(S1, d, form) + trace_d(S2, d, form) + 1e-10

    def test_monotone_in_operator_order(self, rng):
        form = InnerProduct.identity(5)
        A = rng.standard_normal((5, 5))
        S = DenseOperator(A + A.T)
        larger = S + DenseOperator(random_spd(rng, 5))
        for d in range(1, 6):
            assert trace_d(S, d, form) <= trace_d(larger, d, form) + 1e-12

    def test_equivalent_form_scaling(self, rng):
        V = random_spd(rng, 5)
        c = equivalence_constant(InnerProduct.identity(5), InnerProduct.from_matrix(V))
        positive = random_spd(rng, 5)
        for d in range(1, 6):
            base = generalized_trace_d(positive, np.eye(5), d)
            assert generalized_trace_d(positive, V, d) <= c * base + 1e-10
            negative_base = generalized_trace_d(-positive, np.eye(5), d)
            assert generalized_trace_d(-positive, V, d) <= negative_base / c + 1e-10

    def test_weighted_matches_operator_form(self, rng):
        V = random_spd(rng, 4)
        M = rng.standard_normal((4, 4))
        M = M + M.T
        L = DenseOperator(np.linalg.solve(V, M))
        form = InnerProduct.from_matrix(V)
        for d in range(1, 5):
            assert trace_d(L, d, form) == pytest.approx(generalized_trace_d(M, V, d), rel=1e-10, abs=1e-10)


class TestModelsAndValidators:
    def test_form_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            InnerProduct.from_matrix(np.diag([1.0, -1.0]))

    def test_form_must_be_symmetric(self):
        with pytest.raises(ConfigurationError):
            InnerProduct.from_matrix([[1.0, 0.5], [0.0, 1.0]])

    def test_frame_too_wide(self):
        with pytest.raises(DimensionMismatchError):
            VectorFrame(np.ones((2, 3)))

    def test_operator_must_be_finite(self):
        with pytest.raises(ConfigurationError):
            DenseOperator([[np.nan, 0.0], [0.0, 1.0]])

    def test_random_frame_orthonormal_in_form(self, rng):
        form = InnerProduct.from_matrix(random_spd(rng, 6))
        frame = random_orthonormal_frame(6, 3, rng, form)
        np.testing.assert_allclose(gram(frame, form).entries, np.eye(3), atol=1e-12)

    def test_validator(self, rng):
        validator = MultilinearValidator()
        V = InnerProduct.from_matrix(np.diag([0.5, 2.0]))
        ok, errors, _ = validator.validate_equivalence(I2, V, 2.0)
        assert ok and not errors
        ok, errors, message = validator.validate_equivalence(I2, V, 1.5)
        assert not ok and message == "Equivalence constant too small"
        ok, _, _ = validator.validate_gram(gram(VectorFrame(rng.standard_normal((4, 2))), InnerProduct.identity(4)))
        assert ok
