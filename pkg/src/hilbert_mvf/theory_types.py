"""
Theory Types for matrix-valued Hilbert modular forms.

This module provides the type aliases and numerical constants shared by the rest of the
package. Keeping them in one place makes the mathematical objects explicit in signatures and
keeps every tolerance documented next to its default.

**Objects:**

- **Points of 𝓗ⁿ**: complex vectors τ = (τ_1, …, τ_n) with Im τ_j > 0.
- **Complex matrices**: dense ``numpy`` arrays of dtype ``complex128``.
- **Weight matrices**: c×n integer matrices k; row i gives the automorphy factor
  j_{k_i}(γ, τ) = Π_j (σ_j(c)τ_j + σ_j(d))^{k_{i,j}}.
- **Dual coordinates**: integer vectors m with respect to the dual basis of a translation lattice.

**Usage:**

    from hilbert_mvf.theory_types import Tau, CMatrix, TOL_COMMUTE

    def commutator_ok(a: CMatrix, b: CMatrix) -> bool:
        return float(abs(a @ b - b @ a).max()) <= TOL_COMMUTE
"""

from typing import Callable, Tuple

import numpy as np

# Core types
Tau = np.ndarray
"""Type alias for a point (or a batch of points) of 𝓗ⁿ.

A single point has shape ``(n,)``; a batch has shape ``(m, n)``. Entries are complex with
positive imaginary part.
"""

CMatrix = np.ndarray
"""Type alias for a dense complex matrix (``complex128``), finite entries only."""

WeightRows = Tuple[Tuple[int, ...], ...]
"""Type alias for a weight matrix k ∈ M_{c,n}(ℤ) stored as a tuple of rows."""

DualCoords = Tuple[int, ...]
"""Integer coordinates of a dual lattice vector with respect to the dual basis."""

Multidegree = Tuple[int, ...]
"""Exponent vector t ∈ ℕⁿ of the monomial τ^t = Π_j τ_j^{t_j}."""

ScalarFunction = Callable[[np.ndarray], np.ndarray]
"""Evaluation handle 𝓗ⁿ → ℂ accepting a point of shape (n,) or a batch of shape (m, n)."""

# Precision
DEFAULT_PRECISION = 50
"""Decimal digits used for field embeddings unless ``HMVF_PRECISION`` is set."""

MIN_PRECISION = 30
"""Smallest working precision accepted from the environment."""

PRECISION_ENV = "HMVF_PRECISION"
"""Environment variable overriding the working precision."""

EUCLIDEAN_DISCRIMINANTS = (2, 3, 5, 13)
"""Squarefree d for which ℚ(√d) is supported (norm-Euclidean, class number one)."""

# Linear algebra tolerances
TOL_COMMUTE = 1e-10
"""Largest commutator entry accepted for a family declared commuting."""

TOL_CLUSTER = 1e-8
"""Relative distance under which computed eigenvalues are joined into one cluster."""

TOL_CLUSTER_CEILING = 1e-2
"""Largest clustering tolerance tried before reporting a clustering failure."""

TOL_RANK = 1e-10
"""Relative singular-value threshold for kernel computations."""

TOL_BLOCK = 1e-9
"""Largest off-pattern entry tolerated in a transformed SBTSD block."""

TOL_UNITARY = 1e-10
"""Largest ‖A*A − I‖ accepted for a unitary input."""

TOL_TRIANGULAR = 1e-10
"""Largest entry below (or above) the diagonal accepted for a unitriangular input."""

# Fourier expansions
TOL_PERIODIC = 1e-8
"""Relative tolerance of the twisted-periodicity probe before extraction."""

DROP_TOL = 1e-12
"""Coefficients below this magnitude are removed by canonicalization."""

TOL_GEQ = 1e-12
"""Slack for the holomorphy inequality v_k + Re(u_k) ≥ 0."""

PIPELINE_COEFFICIENT_TOL = 1e-9
"""Expansion-pipeline terms below this magnitude are treated as extraction noise."""

DEFAULT_GRID = 64
"""Samples per axis of the extraction grid."""

DEFAULT_DUAL_BOUND = 8.0
"""Box bound max_j |v_j| on extracted dual frequencies."""

DFT_RESOLUTION = 1e-13
"""Raw DFT magnitudes below this fraction of the largest one are reported as zero."""

NYQUIST_WARN = 1e-9
"""Nyquist-shell magnitude above which extraction emits an aliasing warning."""

U_DECIMALS = 10
"""Decimal places kept in the canonical lattice coordinates of an exponent shift u."""

U_SNAP = 1e-9
"""Lattice coordinates this close below an integer are snapped to it."""

# Poincaré series
OVERFLOW_GUARD = 1e12
"""Largest summand magnitude accepted before the evaluation is declared out of domain."""

CHUNK_SIZE = 8192
"""Coset rows per parallel chunk; independent of the worker count."""

MIN_POINCARE_WEIGHT = 3
"""Smallest weight entry for which the Poincaré series converges absolutely."""

# Sampling and reproducibility
DEFAULT_SEED = 42
"""Seed used by the command line when ``--seed`` is not given."""

SAMPLE_IM_RANGE = (0.8, 2.5)
"""Imaginary-part range of residual sample points."""

SAMPLE_RE_RANGE = (-1.0, 1.0)
"""Real-part range of residual sample points."""

SIGNIFICANT_DIGITS = 17
"""Significant digits of every serialized float (enough for an exact round trip)."""
