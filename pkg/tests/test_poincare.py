"""
Tests for coset enumeration and truncated Poincaré series.
"""
import numpy as np
import pytest

from hilbert_mvf.errors import AssumptionViolation, NotUnitaryError, PoincareDomainError, ValidationError
from hilbert_mvf.field import SL2Matrix, complete_row
from hilbert_mvf.linalg import spectral_norm
from hilbert_mvf.modfun import sample_points, transformation_residual
from hilbert_mvf.poincare import (
    absolute_sum,
    convergence_diagnostic,
    coset_table,
    cusp_limit_check,
    eisenstein_q_series,
    enumerate_cosets,
    eval_poincare,
    make_poincare_spec,
    poincare_handle,
    poincare_term,
    residual_representation,
)
from hilbert_mvf.rep import perm_rep_mod_p, translation_rep, trivial_rep


@pytest.fixture(scope="module")
def eisenstein_q(Q):
    return make_poincare_spec(Q, trivial_rep(1), 4, eisenstein=True, bound=50.0)


class TestCosetTable:
    def test_rational_unit_box(self, Q):
        table = coset_table(Q, 1.0)
        assert len(table) == 8
        rows = {(int(e[2, 0]), int(e[3, 0])) for e in table.entries}
        assert rows == {(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)}

    def test_rows_are_lexicographic(self, K5):
        keys = [tuple(int(x) for x in e[2:].reshape(-1)) for e in coset_table(K5, 2.0).entries]
        assert keys == sorted(keys)

    def test_bottom_rows_lie_in_the_box(self, K5):
        table = coset_table(K5, 3.0)
        assert np.all(table.sup_norms <= 3.0 + 1e-9)

    def test_completion_matches_complete_row(self, K5):
        table = coset_table(K5, 2.0)
        for row in range(len(table)):
            M = table.matrix(row)
            expected = complete_row(K5, M.c, M.d)
            assert (M.a, M.b) == (expected.a, expected.b)

    def test_completion_is_normalized(self, K5):
        table = coset_table(K5, 2.0)
        for row in range(len(table)):
            M = table.matrix(row)
            if M.c.is_zero():
                assert M.b.is_zero()
                continue
            ratio = M.a / M.c
            assert 0 <= ratio.a < 1 and 0 <= ratio.b < 1

    def test_enumerate_cosets_pairs(self, Q):
        cosets = enumerate_cosets(Q, 2.0)
        assert len(cosets) == len(coset_table(Q, 2.0))
        for (c, d), M in cosets:
            assert M.bottom_row == (c, d)

    def test_invalid_bound(self, Q):
        with pytest.raises(ValidationError):
            coset_table(Q, 0.0)

    def test_unit_orbit_representatives(self, K5):
        """No two kept rows differ by the fundamental unit."""
        table = coset_table(K5, 3.0)
        mask = table.unit_orbit_mask
        assert 0 < mask.sum() < len(table)
        kept = {tuple(int(x) for x in e[2:].reshape(-1)) for e in table.entries[mask]}
        eps = K5.fundamental_unit
        for row in np.nonzero(mask)[0]:
            M = table.matrix(int(row))
            moved = (eps * M.c).coords + (eps * M.d).coords
            assert moved not in kept


class TestPoincareSpec:
    def test_permutation_blocks(self, perm2_spec):
        assert perm2_spec.r == 5
        assert perm2_spec.block_sizes == (2, 1, 1, 1)
        assert np.all(perm2_spec.nu_real > 0.1)
        assert perm2_spec.frequencies.shape == (5, 2)

    def test_rejects_non_unitary(self, Q):
        rep = translation_rep([np.array([[1.0, 1.0], [0.0, 1.0]])])
        with pytest.raises(NotUnitaryError):
            make_poincare_spec(Q, rep, 4, nu=[1])

    def test_rejects_small_weight(self, K5):
        with pytest.raises(AssumptionViolation):
            make_poincare_spec(K5, perm_rep_mod_p(K5, 2), (2, 3), nu=[1, 0])

    def test_rejects_nu_that_is_not_totally_positive(self, K5):
        with pytest.raises(AssumptionViolation):
            make_poincare_spec(K5, perm_rep_mod_p(K5, 2), (3, 3), nu=[0, 1])

    def test_nu_required_and_integral(self, K5):
        with pytest.raises(ValidationError):
            make_poincare_spec(K5, trivial_rep(1), (3, 3))
        with pytest.raises(ValidationError):
            make_poincare_spec(K5, trivial_rep(1), (3, 3), nu=[0.5, 0])

    def test_eisenstein_conditions(self, K5):
        with pytest.raises(AssumptionViolation):
            make_poincare_spec(K5, perm_rep_mod_p(K5, 2), (4, 4), eisenstein=True)
        with pytest.raises(AssumptionViolation):
            make_poincare_spec(K5, trivial_rep(1), (3, 3), eisenstein=True)
        with pytest.raises(AssumptionViolation):
            make_poincare_spec(K5, trivial_rep(1), (4, 4), nu=[1, 0], eisenstein=True)
        assert make_poincare_spec(K5, trivial_rep(1), (4, 4), eisenstein=True).eisenstein

    def test_seed_matrix_shape(self, K5):
        with pytest.raises(ValidationError):
            make_poincare_spec(K5, trivial_rep(1), (3, 3), nu=[1, 0], seed_matrix=np.ones((2, 1)))

    def test_with_bound(self, perm2_spec):
        assert perm2_spec.with_bound(5.0).bound == 5.0
        with pytest.raises(ValidationError):
            perm2_spec.with_bound(-1.0)


class TestEvaluation:
    def test_rational_eisenstein_series(self, eisenstein_q):
        """Over ℚ the series with ν = 0 sums (cτ + d)^{-4} over ± coprime pairs, i.e. 2·E_4."""
        tau = np.array([2j])
        G = eval_poincare(eisenstein_q, tau)
        assert G.shape == (1, 1)
        expected = eisenstein_q_series(4, 2j)
        assert abs(G[0, 0] / 2 - expected) / abs(expected) < 1e-4

    def test_s_invariance_at_rounding_level(self, perm2_spec, K5):
        G = poincare_handle(perm2_spec)
        samples = sample_points(2, 3, seed=7, im_range=(1.0, 1.8))
        residual = transformation_residual(G, residual_representation(perm2_spec), SL2Matrix.S(K5), samples)
        assert residual < 1e-9

    def test_terms_are_invariant_under_translations(self, perm2_spec, K5):
        table = coset_table(K5, perm2_spec.bound)
        tau = np.array([0.3 + 1.2j, -0.4 + 0.9j])
        for row in (0, len(table) // 3, len(table) - 1):
            M = table.matrix(row)
            base = poincare_term(perm2_spec, M, tau)
            for x in (K5.one, K5.omega):
                moved = poincare_term(perm2_spec, SL2Matrix.T(K5, x) @ M, tau)
                assert np.abs(moved - base).max() <= 1e-10 * max(1.0, np.abs(base).max())

    def test_workers_are_bit_identical(self, perm2_spec):
        tau = np.array([0.1 + 1.1j, 0.2 + 1.3j])
        assert np.array_equal(eval_poincare(perm2_spec, tau, workers=1), eval_poincare(perm2_spec, tau, workers=4))

    def test_coset_images_follow_the_bound(self, perm2_spec, K5):
        spec = perm2_spec.with_bound(3.0)
        assert spec.grouped_images is spec.grouped_images
        wider = spec.with_bound(4.0)
        assert wider.grouped_images[1].shape[0] == len(coset_table(K5, 4.0))
        tau = np.array([0.1 + 1.1j, 0.2 + 1.3j])
        assert np.array_equal(eval_poincare(wider, tau), eval_poincare(wider, tau))

    def test_original_basis(self, perm2_spec):
        tau = np.array([0.1 + 1.1j, 0.2 + 1.3j])
        G = eval_poincare(perm2_spec, tau)
        assert np.allclose(eval_poincare(perm2_spec, tau, original_basis=True), perm2_spec.T @ G)

    def test_absolute_sum_dominates(self, perm2_spec):
        tau = np.array([0.1 + 1.1j, 0.2 + 1.3j])
        assert absolute_sum(perm2_spec, tau) >= spectral_norm(eval_poincare(perm2_spec, tau))

    def test_rejects_bad_points(self, perm2_spec, eisenstein_q):
        with pytest.raises(ValidationError):
            eval_poincare(perm2_spec, np.array([1j]))
        with pytest.raises(ValidationError):
            eval_poincare(perm2_spec, np.array([1j, -1j]))
        with pytest.raises(PoincareDomainError):
            eval_poincare(eisenstein_q, np.array([1e-7j]))


class TestDiagnostics:
    def test_convergence_report(self, eisenstein_q):
        report = convergence_diagnostic(eisenstein_q, np.array([2j]), [10, 20, 40])
        assert [row.bound for row in report.rows] == [10.0, 20.0, 40.0]
        assert report.rows[0].delta is None
        assert len(report.deltas) == 2

    def test_convergence_arguments(self, eisenstein_q):
        with pytest.raises(ValidationError):
            convergence_diagnostic(eisenstein_q, np.array([2j]), [10])
        with pytest.raises(ValidationError):
            convergence_diagnostic(eisenstein_q, np.array([2j]), [20, 10])

    def test_cusp_check_arguments(self, eisenstein_q, perm2_spec):
        with pytest.raises(AssumptionViolation):
            cusp_limit_check(eisenstein_q, [2, 4])
        with pytest.raises(ValidationError):
            cusp_limit_check(perm2_spec, [0.5])
        with pytest.raises(ValidationError):
            cusp_limit_check(perm2_spec, [2], axis=0)


class TestEisensteinOracle:
    @pytest.mark.parametrize("k, first", [(4, 240.0), (6, -504.0), (8, 480.0)])
    def test_first_coefficient(self, k, first):
        q = np.exp(-2 * np.pi * 5)
        assert (eisenstein_q_series(k, 5j) - 1) / q == pytest.approx(first, rel=1e-3)

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_rejects_bad_weights(self, k):
        with pytest.raises(ValidationError):
            eisenstein_q_series(k, 1j)

    def test_vectorized(self):
        values = eisenstein_q_series(4, np.array([1j, 2j]))
        assert values.shape == (2,)
        assert values[0] == pytest.approx(eisenstein_q_series(4, 1j))
