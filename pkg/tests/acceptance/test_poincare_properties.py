"""
Transformation law, cusp decay, determinism and the scalar module action for truncated
Poincaré series over ℚ(√5).
"""
import numpy as np
import pytest

from hilbert_mvf.field import SL2Matrix
from hilbert_mvf.linalg import spectral_norm
from hilbert_mvf.modfun import MatrixFunctionHandle, sample_points, scalar_module_action, slash, transformation_residual
from hilbert_mvf.poincare import (
    coset_table,
    cusp_limit_check,
    eval_poincare,
    make_poincare_spec,
    poincare_handle,
    poincare_term,
    residual_representation,
)
from hilbert_mvf.rep import trivial_rep

BOUNDS = (5.0, 10.0, 20.0)

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def samples():
    return sample_points(2, 4, seed=42, im_range=(1.2, 2.0))


@pytest.fixture(scope="module")
def generators(K5):
    return {"S": SL2Matrix.S(K5), "T1": SL2Matrix.T(K5, K5.one), "T2": SL2Matrix.T(K5, K5.omega)}


@pytest.fixture(scope="module")
def residuals(perm2_spec, generators, samples):
    table = {}
    for B in BOUNDS:
        spec = perm2_spec.with_bound(B)
        G = poincare_handle(spec)
        rho = residual_representation(spec)
        table[B] = {name: transformation_residual(G, rho, gamma, samples) for name, gamma in generators.items()}
    return table


class TestTransformationLaw:
    def test_s_residual_at_rounding_level(self, residuals):
        assert all(residuals[B]["S"] <= 1e-9 for B in BOUNDS)

    @pytest.mark.parametrize("name", ["T1", "T2"])
    def test_translation_residual_decreases(self, residuals, name):
        values = [residuals[B][name] for B in BOUNDS]
        assert values[0] > values[1] > values[2]
        assert values[2] <= 1e-2

    def test_termwise_lattice_invariance(self, perm2_spec, K5):
        spec = perm2_spec.with_bound(20.0)
        table = coset_table(K5, spec.bound)
        tau = np.array([0.2 + 1.4j, -0.3 + 1.7j])
        rows = np.linspace(0, len(table) - 1, 12).astype(int)
        for row in rows:
            M = table.matrix(int(row))
            base = poincare_term(spec, M, tau)
            for x in (K5.one, K5.omega, K5.one + K5.omega):
                moved = poincare_term(spec, SL2Matrix.T(K5, x) @ M, tau)
                assert np.abs(moved - base).max() <= 1e-10 * max(1.0, np.abs(base).max())


def test_cusp_vanishing(perm2_spec):
    values = cusp_limit_check(perm2_spec.with_bound(20.0), [2, 4, 8])
    assert values[0] > values[1] > values[2]
    assert values[2] <= 1e-3


def test_worker_count_does_not_change_bits(perm2_spec):
    spec = perm2_spec.with_bound(20.0)
    tau = np.array([0.15 + 1.3j, -0.25 + 1.1j])
    reference = eval_poincare(spec, tau, workers=1)
    for workers in (4, 8):
        assert np.array_equal(eval_poincare(spec, tau, workers=workers), reference)


def test_scalar_module_action(K5, perm2_spec, generators, samples):
    G4 = poincare_handle(make_poincare_spec(K5, trivial_rep(1), (4, 4), eisenstein=True, bound=10.0))
    G6 = poincare_handle(make_poincare_spec(K5, trivial_rep(1), (6, 6), eisenstein=True, bound=10.0))
    g = MatrixFunctionHandle.scalar(lambda b: G6(b)[:, 0, 0] / G4(b)[:, 0, 0], K5, (2, 2), name="G6/G4")
    G = poincare_handle(perm2_spec)
    rho = residual_representation(perm2_spec)
    product = scalar_module_action(g, G)
    assert product.weight.rows == ((5, 5),)

    g_size = float(np.abs(g(samples)).max())
    for gamma in generators.values():
        g_residual = transformation_residual(g, trivial_rep(1), gamma, samples)
        assert g_residual <= 1e-3
        G_residual = transformation_residual(G, rho, gamma, samples)
        G_size = max(spectral_norm(v) for v in slash(G, gamma)(samples))
        bound = g_residual * G_size + g_size * G_residual
        assert transformation_residual(product, rho, gamma, samples) <= 2 * bound + 1e-12
