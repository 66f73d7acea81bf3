"""
Tests for the shared type aliases and numerical constants.
"""
import numpy as np

from hilbert_mvf.theory_types import (
    CHUNK_SIZE,
    CMatrix,
    DEFAULT_GRID,
    DFT_RESOLUTION,
    DROP_TOL,
    EUCLIDEAN_DISCRIMINANTS,
    MIN_POINCARE_WEIGHT,
    MIN_PRECISION,
    DEFAULT_PRECISION,
    SAMPLE_IM_RANGE,
    SIGNIFICANT_DIGITS,
    TOL_CLUSTER,
    TOL_CLUSTER_CEILING,
    TOL_COMMUTE,
    TOL_PERIODIC,
    Tau,
)


class TestTypeAliases:
    def test_point_and_matrix_aliases_are_arrays(self):
        tau: Tau = np.array([0.1 + 1j, 2j])
        A: CMatrix = np.eye(2, dtype=np.complex128)
        assert tau.shape == (2,)
        assert A.dtype == np.complex128


class TestConstants:
    def test_supported_fields(self):
        assert EUCLIDEAN_DISCRIMINANTS == (2, 3, 5, 13)

    def test_precision_defaults(self):
        assert DEFAULT_PRECISION >= MIN_PRECISION >= 30

    def test_tolerance_ordering(self):
        assert 0 < DFT_RESOLUTION < DROP_TOL < TOL_PERIODIC
        assert TOL_COMMUTE < TOL_CLUSTER < TOL_CLUSTER_CEILING

    def test_grid_is_a_power_of_two(self):
        assert DEFAULT_GRID >= 16 and DEFAULT_GRID & (DEFAULT_GRID - 1) == 0
        assert CHUNK_SIZE > 0

    def test_poincare_weight_floor(self):
        assert MIN_POINCARE_WEIGHT == 3

    def test_sample_heights_are_positive(self):
        assert 0 < SAMPLE_IM_RANGE[0] < SAMPLE_IM_RANGE[1]

    def test_seventeen_digits_round_trip_doubles(self):
        for x in (0.1, 1 / 3, np.pi, 1e-300, -2.5e17):
            assert float(f"{x:.{SIGNIFICANT_DIGITS}g}") == x
