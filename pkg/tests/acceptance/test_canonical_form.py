"""
Randomized re-splittings of an expansion canonicalize to the same serialized terms.
"""
import json

import numpy as np
import pytest

from hilbert_mvf.pfe import PFETerm, PolynomialFourierExpansion, canonicalize
from hilbert_mvf.serialization import pfe_to_json
from hilbert_mvf.synthetic import synthetic_jordan


def resplit(E, rng):
    """Move dual offsets between u and v, split coefficients into exact binary parts, shuffle."""
    L = E.lattice
    terms = []
    for term in E.terms:
        parts = int(rng.choice([1, 2, 4]))
        for _ in range(parts):
            k = rng.integers(-3, 4, size=L.n)
            u = tuple(complex(x) for x in np.asarray(term.u) + L.D @ k)
            v = tuple(int(m) for m in np.asarray(term.v) - k)
            terms.append(PFETerm(u, term.t, v, term.a / parts))
    order = rng.permutation(len(terms))
    return PolynomialFourierExpansion(L, tuple(terms[i] for i in order))


def serialized(E):
    return json.dumps(pfe_to_json(canonicalize(E))["terms"])


@pytest.mark.parametrize("seed", range(20))
def test_resplittings_are_bit_identical(L_Q, L5, seed):
    rng = np.random.default_rng(seed)
    L = (L_Q, L5)[seed % 2]
    sample = synthetic_jordan(L, rng, block_sizes=(int(rng.integers(1, 4)),))
    E = sample.source[0]
    reference = serialized(E)
    for _ in range(3):
        assert serialized(resplit(E, rng)) == reference
