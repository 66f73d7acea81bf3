"""
Tests for the logarithmic expansion pipeline and the synthetic families it is checked against.
"""
import numpy as np
import pytest

from hilbert_mvf.errors import TranslationLawError, ValidationError
from hilbert_mvf.linalg import commuting_residual
from hilbert_mvf.modfun import sample_points
from hilbert_mvf.pfe import ExtractionConfig, evaluate_pfe, expansion_pipeline, prepare_pipeline, twisted_fourier_extract
from hilbert_mvf.synthetic import synthetic_jordan, synthetic_twisted


def term_map(E):
    return {(t.t, t.v, tuple(np.round(np.real(np.asarray(t.u) @ E.lattice.M), 6))): t.a for t in E.terms}


def expansion_distance(E1, E2):
    a, b = term_map(E1), term_map(E2)
    return max((abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)), default=0.0)


class TestSyntheticFamilies:
    def test_twisted_sample_is_twisted_periodic(self, L5):
        sample = synthetic_twisted(L5, np.random.default_rng(3))
        tau = sample_points(2, 6, seed=1)
        for i in range(2):
            shifted = sample(tau + L5.M[:, i][None, :])
            assert np.allclose(shifted, np.exp(2j * np.pi * sample.mu[i]) * sample(tau), rtol=1e-10)

    def test_twisted_extraction_recovers_sample(self, L5):
        sample = synthetic_twisted(L5, np.random.default_rng(7), max_terms=6)
        found = twisted_fourier_extract(sample, L5, sample.mu, ExtractionConfig(grid=64))
        for v, a in sample.coefficients.items():
            assert abs(found[v] - a) <= 1e-8
        assert set(found.nonzero(1e-8)) == set(sample.coefficients)

    def test_jordan_sample_satisfies_translation_law(self, L5):
        sample = synthetic_jordan(L5, np.random.default_rng(11), block_sizes=(2, 1))
        assert commuting_residual(sample.translations) < 1e-10
        tau = sample_points(2, 5, seed=2, im_range=(0.9, 1.5))
        g = sample.column(tau)
        for i, A in enumerate(sample.translations):
            assert np.allclose(sample.column(tau + L5.M[:, i][None, :]), g @ A.T, rtol=1e-9, atol=1e-9)

    def test_source_expansions_evaluate_to_the_column(self, L_Q):
        sample = synthetic_jordan(L_Q, np.random.default_rng(5), block_sizes=(3,))
        tau = sample_points(1, 8, seed=3, im_range=(0.9, 1.5))
        g = sample.column(tau)
        for a, E in enumerate(sample.source):
            assert np.allclose(evaluate_pfe(E, tau), g[:, a], rtol=1e-9, atol=1e-9)

    def test_invalid_parameters(self, L_Q):
        with pytest.raises(ValidationError):
            synthetic_twisted(L_Q, np.random.default_rng(0), max_terms=0)
        with pytest.raises(ValidationError):
            synthetic_jordan(L_Q, np.random.default_rng(0), block_sizes=(0,))


class TestExpansionPipeline:
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_rational_jordan_column(self, L_Q, seed):
        sample = synthetic_jordan(L_Q, np.random.default_rng(seed))
        found = expansion_pipeline(sample.components(), sample.translations, L_Q)
        assert len(found) == sample.r
        for E_found, E_source in zip(found, sample.source):
            assert expansion_distance(E_found, E_source) <= 1e-7

    @pytest.mark.parametrize("seed", [4, 5])
    def test_quadratic_jordan_column(self, L5, seed):
        sample = synthetic_jordan(L5, np.random.default_rng(seed), block_sizes=(2, 1))
        found = expansion_pipeline(sample.components(), sample.translations, L5)
        tau = sample_points(2, 50, seed=seed, im_range=(0.9, 1.5))
        g = sample.column(tau)
        for a, E in enumerate(found):
            assert expansion_distance(E, sample.source[a]) <= 1e-7
            values = evaluate_pfe(E, tau)
            assert np.all(np.abs(values - g[:, a]) <= 1e-7 * np.maximum(1.0, np.abs(g[:, a])))

    def test_prepared_basis_twists_components(self, L_Q):
        sample = synthetic_jordan(L_Q, np.random.default_rng(9), block_sizes=(2,))
        basis = prepare_pipeline(sample.translations, L_Q)
        tau = sample_points(1, 4, seed=4)
        h = basis.h(sample.column(tau), tau)
        h_shifted = basis.h(sample.column(tau + 1.0), tau + 1.0)
        for k in range(basis.r):
            assert np.allclose(h_shifted[:, k], basis.eigenvalues(k)[0] * h[:, k], rtol=1e-9, atol=1e-9)

    def test_rejects_broken_translation_law(self, L_Q):
        sample = synthetic_jordan(L_Q, np.random.default_rng(6), block_sizes=(2,))
        with pytest.raises(TranslationLawError):
            expansion_pipeline(sample.components(), [np.eye(2)], L_Q)

    def test_rejects_wrong_matrix_size(self, L_Q):
        sample = synthetic_jordan(L_Q, np.random.default_rng(6), block_sizes=(2,))
        with pytest.raises(ValidationError):
            expansion_pipeline(sample.components(), [np.eye(3)], L_Q)
