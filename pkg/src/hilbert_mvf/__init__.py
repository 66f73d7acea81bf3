"""
hilbert_mvf: matrix-valued Hilbert modular forms over ℚ and norm-Euclidean real quadratic fields.

The package provides exact field arithmetic, translation lattices, simultaneous
block-triangularization, polynomial Fourier expansions and truncated Poincaré series. The
public API is re-exported from :mod:`hilbert_mvf.api`.

Typical usage:
    import hilbert_mvf as hm
    F = hm.make_field("Q(sqrt:5)")
    L = hm.translation_lattice(F)
    ...
"""
import logging

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

from .api import *  # noqa: E402,F401,F403
