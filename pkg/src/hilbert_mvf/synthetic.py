"""
Seeded synthetic families with known expansions.

Used by ``hmvf expand --source synthetic-*`` and by the round-trip checks of the extraction
and the logarithmic pipeline.

- :func:`synthetic_twisted`: f(τ) = Σ a_v e^{2πi (v + u)·τ} with u = μM⁻¹.
- :func:`synthetic_jordan`: a column g = T P(τ)⁻¹ h(τ) with Jordan-type translation matrices
  A_i = T Λ_i S_i⁻¹ T⁻¹.

Dual coordinates are drawn with the first coordinate in {−1, 0, 1}. For the full lattice the
first coordinate is v·(1, …, 1), so the sample magnitudes on the default contour stay within
e^{±2π}.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag

from .errors import ValidationError
from .lattice import TranslationLattice
from .linalg import nilpotent_exp
from .pfe import (
    FourierCoefficients,
    PolyMatrixP,
    PolynomialFourierExpansion,
    assemble_expansions,
    build_P,
    evaluate_pfe,
)
from .theory_types import CMatrix, DualCoords, PIPELINE_COEFFICIENT_TOL

logger = logging.getLogger(__name__)


def _random_coefficient(rng: np.random.Generator) -> complex:
    radius = rng.uniform(0.5, 1.5)
    return complex(radius * np.exp(2j * np.pi * rng.uniform()))


def _random_duals(rng: np.random.Generator, n: int, count: int, spread: int) -> List[DualCoords]:
    first = np.arange(-1, 2)
    rest = [np.arange(-spread, spread + 1)] * (n - 1)
    grid = np.stack([g.reshape(-1) for g in np.meshgrid(first, *rest, indexing="ij")], axis=1)
    count = min(count, grid.shape[0])
    picks = rng.choice(grid.shape[0], size=count, replace=False)
    return sorted(tuple(int(x) for x in grid[p]) for p in picks)


@dataclass(frozen=True, eq=False)
class TwistedSample:
    """A twisted-periodic scalar function with its exact coefficients."""

    lattice: TranslationLattice
    mu: np.ndarray
    coefficients: Dict[DualCoords, complex]

    @property
    def u(self) -> Tuple[complex, ...]:
        return tuple(complex(x) for x in self.mu @ self.lattice.M_inv)

    def fourier(self) -> FourierCoefficients:
        return FourierCoefficients(self.lattice, self.u, dict(self.coefficients), 0.0, 0.0)

    def expansion(self) -> PolynomialFourierExpansion:
        return self.fourier().to_expansion()

    def __call__(self, batch: np.ndarray) -> np.ndarray:
        return np.asarray(evaluate_pfe(self.expansion(), np.atleast_2d(batch)))


def synthetic_twisted(
    L: TranslationLattice,
    rng: np.random.Generator,
    max_terms: int = 10,
    spread: int = 3,
    mu: Optional[Sequence[float]] = None,
) -> TwistedSample:
    """Random f with f(τ + v_i) = e^{2πiμ_i} f(τ) and at most ``max_terms`` dual frequencies."""
    if max_terms < 1:
        raise ValidationError(f"max_terms must be >= 1, got {max_terms}")
    mu_arr = rng.uniform(0.0, 1.0, size=L.n) if mu is None else np.asarray(mu, dtype=float)
    count = int(rng.integers(1, max_terms + 1))
    duals = _random_duals(rng, L.n, count, spread)
    coefficients = {v: _random_coefficient(rng) for v in duals}
    return TwistedSample(L, mu_arr, coefficients)


@dataclass(frozen=True, eq=False)
class JordanSample:
    """A column with Jordan-type translation law and its canonical source expansions.

    Attributes:
        lattice: The translation lattice.
        block_sizes: Sizes of the Jordan blocks.
        mu: Block exponents, shape (t, n).
        T: Change of basis.
        S: Commuting unitriangular factors S_1..S_n.
        translations: A_i = T Λ_i S_i⁻¹ T⁻¹.
        h: Twisted-periodic components of h = P T⁻¹ g.
        source: Canonical expansions of g_1..g_r.
    """

    lattice: TranslationLattice
    block_sizes: Tuple[int, ...]
    mu: np.ndarray
    T: CMatrix
    S: Tuple[CMatrix, ...]
    translations: Tuple[CMatrix, ...]
    h: Tuple[FourierCoefficients, ...]
    source: Tuple[PolynomialFourierExpansion, ...]

    @property
    def r(self) -> int:
        return self.T.shape[0]

    @property
    def P(self) -> PolyMatrixP:
        return build_P(self.S, self.lattice.M)

    def column(self, batch: np.ndarray) -> np.ndarray:
        """g at a batch of points; shape (m, r)."""
        batch = np.atleast_2d(batch)
        h_values = np.stack([np.asarray(evaluate_pfe(hk.to_expansion(), batch)) for hk in self.h], axis=1)
        return np.einsum("ab,mbc,mc->ma", self.T, self.P.inverse(batch), h_values)

    def components(self) -> List:
        return [lambda batch, a=a: self.column(batch)[:, a] for a in range(self.r)]


def synthetic_jordan(
    L: TranslationLattice,
    rng: np.random.Generator,
    block_sizes: Optional[Sequence[int]] = None,
    max_block: int = 3,
    terms_per_component: int = 2,
    coefficient_tol: float = PIPELINE_COEFFICIENT_TOL,
) -> JordanSample:
    """Random column with commuting non-semisimple translation matrices.

    Every block j carries an exponent μ_j ∈ [0, 1)ⁿ and a nilpotent N_j with nonzero
    superdiagonal; S_i restricted to block j is exp(c_i N_j).
    """
    n = L.n
    if block_sizes is None:
        count = int(rng.integers(1, 3))
        block_sizes = tuple(int(rng.integers(1, max_block + 1)) for _ in range(count))
    sizes = tuple(int(m) for m in block_sizes)
    if not sizes or any(m < 1 for m in sizes):
        raise ValidationError(f"block sizes must be positive, got {block_sizes}")
    mu = rng.uniform(0.0, 1.0, size=(len(sizes), n))
    nilpotents = [np.triu(rng.uniform(0.5, 1.5, size=(m, m)), 1) for m in sizes]
    scales = rng.uniform(0.5, 1.5, size=n)
    S = tuple(block_diag(*[nilpotent_exp(scales[i] * N) for N in nilpotents]).astype(np.complex128) for i in range(n))
    S_inv = [block_diag(*[nilpotent_exp(-scales[i] * N) for N in nilpotents]) for i in range(n)]
    phases = [np.concatenate([np.full(m, np.exp(2j * np.pi * mu[j, i])) for j, m in enumerate(sizes)]) for i in range(n)]
    r = sum(sizes)
    T = np.eye(r) + 0.3 * (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r)))
    T_inv = np.linalg.inv(T)
    translations = tuple(T @ np.diag(phases[i]) @ S_inv[i] @ T_inv for i in range(n))

    h = []
    for j, m in enumerate(sizes):
        u = tuple(complex(x) for x in mu[j] @ L.M_inv)
        for _ in range(m):
            duals = _random_duals(rng, n, terms_per_component, 2)
            h.append(FourierCoefficients(L, u, {v: _random_coefficient(rng) for v in duals}, 0.0, 0.0))
    P = build_P(S, L.M)
    source = assemble_expansions(L, P.inverse_polynomial().left(T), h, coefficient_tol)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("synthetic Jordan column: blocks=%s, terms=%s", sizes, [len(E) for E in source])
    return JordanSample(L, sizes, mu, T, S, translations, tuple(h), tuple(source))
