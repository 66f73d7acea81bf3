"""
Shared fixtures for the hilbert_mvf test suite.
"""
import numpy as np
import pytest

from hilbert_mvf.field import make_field
from hilbert_mvf.lattice import translation_lattice
from hilbert_mvf.poincare import make_poincare_spec
from hilbert_mvf.rep import perm_rep_mod_p


@pytest.fixture(scope="session")
def Q():
    return make_field("Q")


@pytest.fixture(scope="session")
def K5():
    """ℚ(√5) with ω = (1 + √5)/2."""
    return make_field("Q(sqrt:5)")


@pytest.fixture(scope="session")
def K2():
    return make_field(2)


@pytest.fixture(scope="session")
def L_Q(Q):
    return translation_lattice(Q)


@pytest.fixture(scope="session")
def L5(K5):
    return translation_lattice(K5)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def perm2_spec(K5):
    """Permutation representation mod 2 over ℚ(√5) (r = 5), weight (3, 3), ν with coordinates (1, 0)."""
    return make_poincare_spec(K5, perm_rep_mod_p(K5, 2), (3, 3), nu=[1, 0], bound=10.0)


def relative_error(actual, expected):
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    return float(np.abs(actual - expected).max() / max(1.0, float(np.abs(expected).max())))
