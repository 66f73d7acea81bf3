"""
Tests for polynomial Fourier expansions: matrix polynomials, P(τ), canonical form, weak
derivatives and twisted Fourier extraction.
"""
import warnings

import numpy as np
import pytest

from hilbert_mvf.errors import AliasingWarning, LatticeError, NotTwistedPeriodicError, NotUnitriangularError, ValidationError
from hilbert_mvf.linalg import nilpotent_exp
from hilbert_mvf.modfun import sample_points
from hilbert_mvf.pfe import (
    ExtractionConfig,
    FourierCoefficients,
    MatrixPolynomial,
    PFETerm,
    PolynomialFourierExpansion,
    axis_weak_derivative,
    build_P,
    canonicalize,
    evaluate_in_chunks,
    evaluate_pfe,
    expansion_handle,
    holomorphic_at_infinity,
    sampling_grid,
    twisted_fourier_extract,
    weak_derivative,
)

N3 = np.array([[0.0, 1.0, 0.5], [0.0, 0.0, -2.0], [0.0, 0.0, 0.0]])


def expansion(L, *terms):
    return PolynomialFourierExpansion(L, tuple(PFETerm(tuple(u), tuple(t), tuple(v), complex(a)) for u, t, v, a in terms))


class TestMatrixPolynomial:
    def test_product_evaluates_pointwise(self):
        A = MatrixPolynomial.linear([np.array([[1.0, 2.0], [0.0, 1.0]]), np.eye(2)])
        B = MatrixPolynomial.constant(np.array([[0.0, 1.0], [1.0, 0.0]]), 2) + A
        tau = sample_points(2, 3, seed=4)
        assert np.allclose((A * B)(tau), A(tau) @ B(tau))
        assert (A * B).degree == 2

    def test_exp_nilpotent(self):
        linear = MatrixPolynomial.linear([N3])
        E = MatrixPolynomial.exp_nilpotent(linear)
        tau = np.array([0.3 + 1.2j])
        assert np.allclose(E(tau), nilpotent_exp(tau[0] * N3))

    def test_left_multiplication(self):
        P = MatrixPolynomial.constant(np.eye(2), 1).left(np.array([[1.0, 2.0]]))
        assert P.shape == (1, 2)
        assert np.allclose(P(np.array([1j])), [[1.0, 2.0]])


class TestBuildP:
    def test_cocycle_over_q(self, L_Q):
        S = nilpotent_exp(N3)
        P = build_P([S], L_Q.M)
        tau = sample_points(1, 5, seed=8)
        assert np.allclose(P(tau + 1.0), P(tau) @ S, atol=1e-10)
        assert np.allclose(P(tau) @ P.inverse(tau), np.eye(3), atol=1e-10)

    def test_cocycle_over_quadratic_field(self, L5):
        S = [nilpotent_exp(N3), nilpotent_exp(-0.7 * N3)]
        P = build_P(S, L5.M)
        tau = sample_points(2, 5, seed=9)
        for i in range(2):
            shifted = tau + L5.M[:, i][None, :]
            assert np.allclose(P(shifted), P(tau) @ S[i], atol=1e-10)

    def test_errors(self, L5):
        with pytest.raises(NotUnitriangularError):
            build_P([2 * np.eye(2), np.eye(2)], L5.M)
        with pytest.raises(ValidationError):
            build_P([np.eye(2)], L5.M)


class TestCanonicalize:
    def test_moves_integer_part_of_u_into_v(self, L_Q):
        E = expansion(L_Q, ((1.25,), (0,), (0,), 2.0))
        C = canonicalize(E)
        (term,) = C.terms
        assert term.u == pytest.approx((0.25,))
        assert term.v == (1,)
        assert C.canonical

    def test_merges_and_drops(self, L_Q):
        E = expansion(
            L_Q,
            ((0.25,), (1,), (1,), 1.0),
            ((1.25,), (1,), (0,), 2.0),
            ((0.5,), (0,), (0,), 1e-15),
        )
        C = canonicalize(E)
        assert len(C) == 1
        assert C.terms[0].a == pytest.approx(3.0)

    def test_is_idempotent_and_preserves_values(self, L5):
        E = expansion(
            L5,
            ((0.4, -0.3), (0, 1), (1, 0), 1.0 + 1j),
            ((1.1, 0.2), (0, 0), (0, 1), -0.5),
            ((0.4, -0.3), (0, 1), (1, 0), 0.25),
        )
        C = canonicalize(E)
        assert canonicalize(C).terms == C.terms
        tau = sample_points(2, 6, seed=11)
        assert np.allclose(evaluate_pfe(C, tau), evaluate_pfe(E, tau), rtol=1e-8)

    def test_shifts_and_degrees(self, L_Q):
        E = canonicalize(expansion(L_Q, ((0.5,), (2,), (0,), 1.0), ((0.25,), (1,), (3,), 1.0)))
        assert len(E.shifts) == 2
        assert E.max_degree() == (2,)
        assert E.max_degree(E.shifts[0]) == (1,)


class TestHolomorphy:
    def test_detects_negative_frequencies(self, L_Q):
        ok, violations = holomorphic_at_infinity(expansion(L_Q, ((0.25,), (0,), (-1,), 1.0), ((0.25,), (0,), (0,), 1.0)))
        assert not ok
        assert [t.v for t in violations] == [(-1,)]

    def test_zero_coefficients_ignored(self, L_Q):
        ok, _ = holomorphic_at_infinity(expansion(L_Q, ((0.0,), (0,), (-3,), 0.0)))
        assert ok


class TestWeakDerivative:
    def test_kills_twisted_periodic_terms(self, L5):
        E = expansion(L5, ((0.1, 0.2), (0, 0), (1, -1), 2.0))
        assert len(weak_derivative(E, 0, (0.1, 0.2))) == 0

    def test_lowers_polynomial_degree(self, L_Q):
        E = expansion(L_Q, ((0.3,), (1,), (0,), 2.0))
        D = weak_derivative(E, 0, (0.3,))
        assert [(t.t, t.v) for t in D.terms] == [((0,), (0,))]
        assert D.terms[0].a == pytest.approx(2.0)

    def test_handle_matches_expansion(self, L5):
        E = expansion(L5, ((0.1, 0.2), (1, 1), (0, 1), 1.5), ((0.1, 0.2), (0, 2), (1, 0), -1j))
        u = (0.1, 0.2)
        symbolic = weak_derivative(E, 1, u)
        numeric = weak_derivative(expansion_handle(E), 1, u, L5)
        tau = sample_points(2, 5, seed=12)
        assert np.allclose(numeric(tau), evaluate_pfe(symbolic, tau), rtol=1e-9, atol=1e-9)

    def test_axis_derivative(self, L_Q, L5):
        E = expansion(L_Q, ((0.3,), (2,), (1,), 1.0))
        assert axis_weak_derivative(E, 0, (0.3,)).terms == weak_derivative(E, 0, (0.3,)).terms
        with pytest.raises(LatticeError):
            axis_weak_derivative(expansion(L5), 0, (0.0, 0.0))

    def test_handle_needs_lattice(self):
        with pytest.raises(ValidationError):
            weak_derivative(lambda b: b[:, 0], 0, (0.0,))


class TestExtraction:
    def test_config_validation(self):
        with pytest.raises(ValidationError):
            ExtractionConfig(grid=48)
        with pytest.raises(ValidationError):
            ExtractionConfig(y0=(1.0, -1.0))
        with pytest.raises(ValidationError):
            ExtractionConfig(workers=0)
        with pytest.raises(ValidationError):
            ExtractionConfig(y0=(1.0,)).height(2)

    def test_grid_shape(self, L5):
        points = sampling_grid(L5, ExtractionConfig(grid=16))
        assert points.shape == (256, 2)
        assert np.allclose(points.imag, 1.0)

    def test_chunked_evaluation_is_thread_independent(self):
        points = np.linspace(0, 1, 20000) + 1j
        f = lambda b: np.exp(2j * np.pi * b)  # noqa: E731
        assert np.array_equal(evaluate_in_chunks(f, points, 1), evaluate_in_chunks(f, points, 4))

    def test_recovers_rational_coefficients(self, L_Q):
        f = lambda b: np.exp(2j * np.pi * 0.3 * b[:, 0]) * (2 + 3 * np.exp(2j * np.pi * b[:, 0]))  # noqa: E731
        coefficients = twisted_fourier_extract(f, L_Q, [0.3], ExtractionConfig(dual_bound=4))
        assert coefficients[(0,)] == pytest.approx(2.0, abs=1e-10)
        assert coefficients[(1,)] == pytest.approx(3.0, abs=1e-10)
        assert set(coefficients.nonzero(1e-8)) == {(0,), (1,)}
        assert isinstance(coefficients, FourierCoefficients)

    def test_rejects_wrong_twist(self, L_Q):
        f = lambda b: np.exp(2j * np.pi * 0.3 * b[:, 0])  # noqa: E731
        with pytest.raises(NotTwistedPeriodicError):
            twisted_fourier_extract(f, L_Q, [0.1])
        with pytest.raises(NotTwistedPeriodicError):
            twisted_fourier_extract(lambda b: b[:, 0], L_Q, [0.0])

    def test_warns_when_dual_box_reaches_nyquist(self, L_Q):
        f = lambda b: np.ones(b.shape[0], dtype=complex)  # noqa: E731
        with pytest.warns(AliasingWarning):
            twisted_fourier_extract(f, L_Q, [0.0], ExtractionConfig(grid=16, dual_bound=10))

    def test_warns_on_energy_in_the_nyquist_shell(self, L_Q):
        """A 1e-6 tone at index N/2 on top of a 1e4 constant still warns."""
        scale = 1e-6 * np.exp(16 * np.pi)
        f = lambda b: 1e4 + scale * np.exp(2j * np.pi * 8 * b[:, 0])  # noqa: E731
        with pytest.warns(AliasingWarning, match="Nyquist-shell"):
            coefficients = twisted_fourier_extract(f, L_Q, [0.0], ExtractionConfig(grid=16, dual_bound=4, y0=(1.0,)))
        assert coefficients.nyquist_magnitude == pytest.approx(1e-6, rel=1e-4)

    def test_large_clean_input_does_not_warn(self, L_Q):
        f = lambda b: 1e4 * (1 + np.exp(2j * np.pi * b[:, 0]))  # noqa: E731
        with warnings.catch_warnings():
            warnings.simplefilter("error", AliasingWarning)
            coefficients = twisted_fourier_extract(f, L_Q, [0.0], ExtractionConfig(grid=16, dual_bound=4, y0=(1.0,)))
        assert coefficients[(1,)] == pytest.approx(1e4, rel=1e-10)

    def test_expansion_round_trip(self, L_Q):
        f = lambda b: np.exp(2j * np.pi * 0.3 * b[:, 0])  # noqa: E731
        E = twisted_fourier_extract(f, L_Q, [0.3], ExtractionConfig(dual_bound=3)).to_expansion()
        tau = sample_points(1, 4, seed=1)
        assert np.allclose(evaluate_pfe(E, tau), f(tau), rtol=1e-10)
