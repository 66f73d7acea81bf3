"""
Poincaré series for unitary representations of SL₂(O_F).

For a unitary ρ whose translation images are diagonal in a unitary basis T, blocks with joint
exponents μ_j (e^{2πiμ_{j,i}} = λ_{j,i}) and dual shifts ν_j ∈ Λ*, the series is

    G(τ) = Σ_{M ∈ Λ\\Γ_F} ρ_T(M)* D(Mτ) E J_k(M, τ)⁻¹,
    D(z) = diag(…, e^{2πi (ν_j + μ_jM⁻¹)·z} I_{m_j}, …),

where E is a constant r×c seed matrix (the first c columns of I_r by default). P(τ) = I because
ρ(Λ) is diagonal.

Cosets are represented by their bottom rows (c, d). Every coprime row completes to a unique
matrix with the lattice coordinates of a/c in [0, 1). The sum is truncated to rows with
max_j(|σ_j(c)|, |σ_j(d)|) ≤ B.

Evaluation is vectorized. Cosets are grouped by the image ρ_T(M), chunks of the coset table are
summed in parallel, and the partial sums are reduced in chunk order. The result is therefore
bit-identical for every worker count.
"""
from __future__ import annotations

import dataclasses
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import bernoulli, divisor_sigma

from .errors import (
    AssumptionViolation,
    ConvergenceWarning,
    NotUnitaryError,
    PoincareDomainError,
    ValidationError,
)
from .field import (
    Field,
    FieldElement,
    SL2Matrix,
    batch_conjugate,
    batch_embed,
    batch_ext_gcd,
    batch_conj_product,
    batch_multiply,
)
from .lattice import TranslationLattice, translation_lattice
from .linalg import principal_exponent, spectral_norm, unitary_simdiag
from .modfun import MatrixFunctionHandle, WeightMatrix, automorphy_diagonal, mobius
from .rep import ConjugatedRepresentation, Representation
from .theory_types import CHUNK_SIZE, CMatrix, MIN_POINCARE_WEIGHT, OVERFLOW_GUARD

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# Coset table
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CosetTable:
    """Bottom rows of Λ\\Γ_F inside the box of radius ``bound`` with their completions.

    Attributes:
        field: The field F.
        bound: The box radius B.
        entries: Integer coordinates of shape (K, 4, 2); rows a, b, c, d.
        embedded: Embeddings of shape (K, 4, n).
    """

    field: Field
    bound: float
    entries: np.ndarray
    embedded: np.ndarray

    def __len__(self) -> int:
        return int(self.entries.shape[0])

    def matrix(self, row: int) -> SL2Matrix:
        F = self.field
        return SL2Matrix(*(F.element(int(self.entries[row, k, 0]), int(self.entries[row, k, 1])) for k in range(4)))

    @cached_property
    def sup_norms(self) -> np.ndarray:
        return np.abs(self.embedded[:, 2:, :]).max(axis=(1, 2))

    @cached_property
    def unit_orbit_mask(self) -> np.ndarray:
        """True for the one row per ⟨ε₀⟩-orbit with minimal (sup-norm, coordinates)."""
        F = self.field
        if F.degree == 1 or len(self) == 0:
            return np.ones(len(self), dtype=bool)
        eps = F.fundamental_unit
        assert eps is not None
        ea, eb = (np.full(len(self), x, dtype=np.int64) for x in eps.coords)
        sign = int(eps.norm())
        ia, ib = batch_conjugate(F, ea, eb)
        ia, ib = sign * ia, sign * ib
        rows = self.entries[:, 2:, :].reshape(len(self), 4)
        key_self = self.sup_norms
        keep = np.ones(len(self), dtype=bool)
        for ua, ub in ((ea, eb), (ia, ib)):
            ca, cb = batch_multiply(F, ua, ub, rows[:, 0], rows[:, 1])
            da, db = batch_multiply(F, ua, ub, rows[:, 2], rows[:, 3])
            other = np.stack([ca, cb, da, db], axis=1)
            sup = np.maximum(np.abs(batch_embed(F, ca, cb)).max(axis=1), np.abs(batch_embed(F, da, db)).max(axis=1))
            smaller = key_self < sup - 1e-9
            tie = np.abs(key_self - sup) <= 1e-9
            keep &= smaller | (tie & _lex_less(rows, other))
        return keep


def _lex_less(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    diff = x != y
    first = np.argmax(diff, axis=1)
    idx = np.arange(x.shape[0])
    return diff.any(axis=1) & (x[idx, first] < y[idx, first])


def _coprime(F: Field, ca: np.ndarray, cb: np.ndarray, da: np.ndarray, db: np.ndarray) -> np.ndarray:
    """Rows with (c, d) = O_F: the 2×2 minors of [c, cω, d, dω] have gcd 1."""
    if F.degree == 1:
        return np.gcd(ca, da) == 1
    zero, one = np.zeros_like(ca), np.ones_like(ca)
    cols = [(ca, cb), batch_multiply(F, ca, cb, zero, one), (da, db), batch_multiply(F, da, db, zero, one)]
    g = np.zeros_like(ca)
    for i in range(4):
        for j in range(i + 1, 4):
            g = np.gcd(g, cols[i][0] * cols[j][1] - cols[j][0] * cols[i][1])
    return g == 1


def _complete(F: Field, ca: np.ndarray, cb: np.ndarray, da: np.ndarray, db: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Top rows (a, b) with ad − bc = 1 and the lattice coordinates of a/c in [0, 1)."""
    ga, gb, sa, sb, ta, tb = batch_ext_gcd(F, ca, cb, da, db)
    # g is a unit, so g·conj(g) = ±1 and g⁻¹ = (g·conj(g))·conj(g)
    ng = batch_conj_product(F, ga, gb)
    gia, gib = batch_conjugate(F, ga, gb)
    gia, gib = ng * gia, ng * gib
    aa, ab = batch_multiply(F, ta, tb, gia, gib)
    ba, bb = batch_multiply(F, -sa, -sb, gia, gib)
    nonzero = (ca != 0) | (cb != 0)
    if nonzero.any():
        idx = np.nonzero(nonzero)[0]
        nc = batch_conj_product(F, ca[idx], cb[idx])
        pa, pb = batch_multiply(F, aa[idx], ab[idx], *batch_conjugate(F, ca[idx], cb[idx]))
        ka, kb = np.floor_divide(pa, nc), np.floor_divide(pb, nc)
        if F.degree == 1:
            kb = np.zeros_like(kb)
        sub_a = batch_multiply(F, ka, kb, ca[idx], cb[idx])
        sub_b = batch_multiply(F, ka, kb, da[idx], db[idx])
        aa[idx], ab[idx] = aa[idx] - sub_a[0], ab[idx] - sub_a[1]
        ba[idx], bb[idx] = ba[idx] - sub_b[0], bb[idx] - sub_b[1]
    if (~nonzero).any():
        idx = np.nonzero(~nonzero)[0]
        nd = batch_conj_product(F, da[idx], db[idx])
        ia, ib = batch_conjugate(F, da[idx], db[idx])
        aa[idx], ab[idx] = nd * ia, nd * ib
        ba[idx], bb[idx] = 0, 0
    return aa, ab, ba, bb


@lru_cache(maxsize=8)
def coset_table(F: Field, bound: float) -> CosetTable:
    """Vectorized table of coset representatives of Λ\\Γ_F with bottom rows in the box.

    Rows are ordered lexicographically by the coordinates of (c, d).
    """
    if bound <= 0:
        raise ValidationError(f"truncation bound must be positive, got {bound}")
    xa, xb = F.integers_in_box(bound)
    m = xa.shape[0]
    ci, di = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    ci, di = ci.reshape(-1), di.reshape(-1)
    ca, cb, da, db = xa[ci], xb[ci], xa[di], xb[di]
    keep = _coprime(F, ca, cb, da, db)
    ca, cb, da, db = ca[keep], cb[keep], da[keep], db[keep]
    aa, ab, ba, bb = _complete(F, ca, cb, da, db)
    entries = np.stack(
        [np.stack([aa, ab], axis=1), np.stack([ba, bb], axis=1), np.stack([ca, cb], axis=1), np.stack([da, db], axis=1)],
        axis=1,
    ).astype(np.int64)
    if entries.shape[0]:
        embedded = np.stack([batch_embed(F, entries[:, k, 0], entries[:, k, 1]) for k in range(4)], axis=1)
    else:
        entries = np.zeros((0, 4, 2), dtype=np.int64)
        embedded = np.zeros((0, 4, F.degree))
    table = CosetTable(F, float(bound), entries, embedded)
    logger.info("coset table over %s at B=%g: %d rows", F.name, bound, len(table))
    return table


def enumerate_cosets(F: Field, bound: float) -> List[Tuple[Tuple[FieldElement, FieldElement], SL2Matrix]]:
    """One (bottom row, completed matrix) pair per coset with max_j(|σ_j(c)|, |σ_j(d)|) ≤ B."""
    table = coset_table(F, float(bound))
    out = []
    for row in range(len(table)):
        M = table.matrix(row)
        out.append((M.bottom_row, M))
    return out


# ---------------------------------------------------------------------------
# Series data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PoincareSpec:
    """Validated data of a truncated Poincaré series.

    Attributes
    ----------
    field : Field
        The field F.
    representation : Representation
        The unitary representation ρ.
    lattice : TranslationLattice
        The full translation lattice ι_F(O_F).
    T : ndarray
        Unitary basis diagonalizing ρ(T_1), …, ρ(T_n).
    block_sizes : tuple of int
        m_1..m_t.
    mu : ndarray
        Exponents, shape (t, n), entries in [0, 1).
    nu : ndarray
        Dual coordinates of ν_j, shape (t, n), integer.
    weight : WeightMatrix
        Weight k with c rows.
    bound : float
        Truncation bound B.
    eisenstein : bool
        ν = 0 extension (outside the totally positive setting).
    seed_matrix : ndarray
        Constant r×c matrix E.
    """

    field: Field
    representation: Representation
    lattice: TranslationLattice
    T: CMatrix
    block_sizes: Tuple[int, ...]
    mu: np.ndarray
    nu: np.ndarray
    weight: WeightMatrix
    bound: float
    eisenstein: bool = False
    seed_matrix: CMatrix = dc_field(default=None, repr=False)  # type: ignore[assignment]

    @property
    def r(self) -> int:
        return self.representation.dimension

    @property
    def c(self) -> int:
        return self.weight.c

    @property
    def n(self) -> int:
        return self.field.degree

    @property
    def t(self) -> int:
        return len(self.block_sizes)

    @property
    def nu_real(self) -> np.ndarray:
        """ν_j as real vectors D·m_j, shape (t, n)."""
        return self.nu @ self.lattice.D.T

    @property
    def block_of_component(self) -> Tuple[int, ...]:
        return tuple(j for j, m in enumerate(self.block_sizes) for _ in range(m))

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Row a gives ν_j + μ_jM⁻¹ for the block j of component a; shape (r, n)."""
        per_block = self.nu_real + self.mu @ self.lattice.M_inv
        return per_block[list(self.block_of_component)]

    @cached_property
    def rep_in_basis(self) -> ConjugatedRepresentation:
        return ConjugatedRepresentation(self.representation, self.T)

    @cached_property
    def grouped_images(self) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct conjugate-transposed images ρ_T(M)* over the coset table at this bound, and the
        per-row index into them."""
        table = coset_table(self.field, self.bound)
        images, index = self.rep_in_basis.batch_images(self.field, table.entries)
        return np.conj(np.transpose(images, (0, 2, 1))), index

    def with_bound(self, bound: float) -> "PoincareSpec":
        if bound <= 0:
            raise ValidationError(f"truncation bound must be positive, got {bound}")
        return dataclasses.replace(self, bound=float(bound))


def _as_weight(weight: Union[WeightMatrix, Sequence[Sequence[int]], Sequence[int], int], n: int) -> WeightMatrix:
    if isinstance(weight, WeightMatrix):
        return weight
    if isinstance(weight, int):
        return WeightMatrix.uniform(weight, n)
    rows = list(weight)
    if rows and isinstance(rows[0], (int, np.integer)):
        return WeightMatrix((tuple(int(x) for x in rows),))
    return WeightMatrix(tuple(tuple(int(x) for x in row) for row in rows))


def _group_blocks(diagonals: List[np.ndarray]) -> Tuple[Tuple[int, ...], np.ndarray]:
    """Runs of equal joint eigenvalue tuples and their exponents."""
    r = diagonals[0].shape[0]
    tuples = [tuple(round(complex(diag[k]).real, 8) + 1j * round(complex(diag[k]).imag, 8) for diag in diagonals) for k in range(r)]
    sizes: List[int] = []
    exponents: List[List[float]] = []
    for k in range(r):
        if k > 0 and tuples[k] == tuples[k - 1]:
            sizes[-1] += 1
            continue
        sizes.append(1)
        exponents.append([principal_exponent(diag[k]).real for diag in diagonals])
    return tuple(sizes), np.array(exponents)


def make_poincare_spec(
    field: Field,
    rep: Representation,
    weight: Union[WeightMatrix, Sequence[Sequence[int]], Sequence[int], int],
    nu: Optional[Sequence] = None,
    bound: float = 10.0,
    *,
    eisenstein: bool = False,
    seed_matrix: Optional[object] = None,
) -> PoincareSpec:
    """Validate the data of a Poincaré series and compute its block structure.

    Args:
        field: The field F.
        rep: A unitary representation of dimension r.
        weight: Weight matrix (c rows of length n), one row, or an integer for parallel weight.
        nu: Dual coordinates of ν, one row per block or a single row used for every block.
            Ignored (must be absent or zero) in Eisenstein mode.
        bound: Truncation bound B.
        eisenstein: Use ν = 0.
        seed_matrix: Constant r×c matrix E (default: first c columns of I_r).

    Raises:
        NotUnitaryError: ρ is not unitary.
        AssumptionViolation: a weight entry is below 3, ν is not totally positive, or the
            Eisenstein conditions fail.
        ValidationError: malformed input.
    """
    if not rep.is_unitary:
        raise NotUnitaryError(f"Poincaré series need a unitary representation, got {rep!r}")
    n = field.degree
    k = _as_weight(weight, n)
    if k.n != n:
        raise ValidationError(f"weight rows of length {k.n} for n = {n}")
    if k.min_entry < MIN_POINCARE_WEIGHT:
        raise AssumptionViolation(f"every weight entry must be >= {MIN_POINCARE_WEIGHT}, got {k.rows}")
    if bound <= 0:
        raise ValidationError(f"truncation bound must be positive, got {bound}")

    L = translation_lattice(field)
    images = rep.translation_images(L)
    T, diagonals = unitary_simdiag(images)
    sizes, mu = _group_blocks(diagonals)
    t = len(sizes)

    rep_S = T.conj().T @ rep.evaluate(SL2Matrix.S(field)) @ T
    if abs(spectral_norm(rep_S) - 1.0) > 1e-9:
        raise NotUnitaryError(f"rho(S) in the diagonalizing basis has norm {spectral_norm(rep_S):.3g}")

    if eisenstein:
        if nu is not None and np.any(np.asarray(nu) != 0):
            raise AssumptionViolation("Eisenstein mode uses nu = 0")
        nu_arr = np.zeros((t, n), dtype=np.int64)
        if n >= 2:
            _check_eisenstein(field, rep, k)
    else:
        if nu is None:
            raise ValidationError("nu is required outside Eisenstein mode")
        nu_arr = np.atleast_2d(np.asarray(nu))
        if not np.all(np.equal(np.mod(nu_arr, 1), 0)):
            raise ValidationError(f"nu must be given by integer dual coordinates, got {nu!r}")
        nu_arr = nu_arr.astype(np.int64)
        if nu_arr.shape == (1, n) and t > 1:
            nu_arr = np.repeat(nu_arr, t, axis=0)
        if nu_arr.shape != (t, n):
            raise ValidationError(f"nu must have shape ({t}, {n}) or ({n},), got {nu_arr.shape}")
        real = nu_arr @ L.D.T
        if np.any(real <= 0):
            raise AssumptionViolation(f"nu must be totally positive; real coordinates {real.tolist()}")

    r = rep.dimension
    E = np.eye(r, k.c, dtype=np.complex128) if seed_matrix is None else np.asarray(seed_matrix, dtype=np.complex128)
    if E.shape != (r, k.c):
        raise ValidationError(f"seed matrix must be {r}x{k.c}, got {E.shape}")

    spec = PoincareSpec(field, rep, L, T, sizes, mu, nu_arr, k, float(bound), eisenstein, E)
    logger.info("Poincaré spec over %s: r=%d, blocks=%s, weight=%s", field.name, r, sizes, k.rows)
    return spec


def _check_eisenstein(field: Field, rep: Representation, weight: WeightMatrix) -> None:
    if rep.kind != "trivial":
        raise AssumptionViolation("Eisenstein mode over a quadratic field needs the trivial representation")
    if not weight.is_parallel:
        raise AssumptionViolation("Eisenstein mode over a quadratic field needs parallel weight")
    eps = field.fundamental_unit
    assert eps is not None
    for row in weight.rows:
        if eps.norm() ** row[0] != 1:
            raise AssumptionViolation(f"N(eps)^k = {eps.norm() ** row[0]} for weight {row}; the unit-orbit sum vanishes")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _active_rows(spec: PoincareSpec) -> np.ndarray:
    table = coset_table(spec.field, spec.bound)
    if spec.eisenstein and spec.n >= 2:
        return np.nonzero(table.unit_orbit_mask)[0]
    return np.arange(len(table))


def _summands(spec: PoincareSpec, embedded: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """D(Mτ) E J(M,τ)⁻¹ for a chunk of cosets; shape (K, r, c)."""
    a, b, c, d = (embedded[:, k, :] for k in range(4))
    cocycle = c * tau[None, :] + d
    m_tau = (a * tau[None, :] + b) / cocycle
    phase = np.exp(TWO_PI_I * (m_tau @ spec.frequencies.T))
    k = spec.weight.as_array()
    jinv = np.ones((embedded.shape[0], spec.c), dtype=np.complex128)
    inverse = 1.0 / cocycle
    for i in range(spec.c):
        for j in range(spec.n):
            for _ in range(abs(int(k[i, j]))):
                jinv[:, i] = jinv[:, i] * (inverse[:, j] if k[i, j] > 0 else cocycle[:, j])
    values = phase[:, :, None] * jinv[:, None, :]
    worst = float(np.abs(values).max()) if values.size else 0.0
    if worst > OVERFLOW_GUARD:
        raise PoincareDomainError(f"Poincaré summand of magnitude {worst:.3g} exceeds {OVERFLOW_GUARD:g}; tau too close to the real axis")
    return values * spec.seed_matrix[None, :, :]


def _chunk_sum(spec: PoincareSpec, rows: np.ndarray, index: np.ndarray, groups: int, tau: np.ndarray) -> np.ndarray:
    table = coset_table(spec.field, spec.bound)
    values = _summands(spec, table.embedded[rows], tau)
    W = np.zeros((groups, spec.r, spec.c), dtype=np.complex128)
    np.add.at(W, index[rows], values)
    return W


def _check_tau(spec: PoincareSpec, tau: np.ndarray) -> np.ndarray:
    tau = np.asarray(tau, dtype=np.complex128).reshape(-1)
    if tau.shape[0] != spec.n:
        raise ValidationError(f"tau needs {spec.n} coordinates, got {tau.shape[0]}")
    if np.any(tau.imag <= 0):
        raise ValidationError(f"tau must lie in the upper half-plane, got {tau}")
    return tau


def eval_poincare(
    spec: PoincareSpec,
    tau: np.ndarray,
    *,
    workers: int = 1,
    original_basis: bool = False,
) -> CMatrix:
    """Truncated Poincaré series G_B(τ), an r×c matrix in the basis T (or T·G_B).

    Raises:
        PoincareDomainError: a summand exceeds the overflow guard.
        ValidationError: τ is not a point of 𝓗ⁿ.
    """
    tau = _check_tau(spec, tau)
    rows = _active_rows(spec)
    if rows.shape[0] == 0:
        return np.zeros((spec.r, spec.c), dtype=np.complex128)
    images_H, index = spec.grouped_images
    groups = images_H.shape[0]
    chunks = [rows[i : i + CHUNK_SIZE] for i in range(0, rows.shape[0], CHUNK_SIZE)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda chunk: _chunk_sum(spec, chunk, index, groups, tau), chunks))
    else:
        partials = [_chunk_sum(spec, chunk, index, groups, tau) for chunk in chunks]
    W = partials[0]
    for part in partials[1:]:
        W = W + part
    G = np.einsum("gab,gbc->ac", images_H, W)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("G_B at B=%g over %d cosets in %d chunks", spec.bound, rows.shape[0], len(chunks))
    return spec.T @ G if original_basis else G


def poincare_term(spec: PoincareSpec, M: SL2Matrix, tau: np.ndarray) -> CMatrix:
    """The single summand ρ_T(M)* D(Mτ) E J(M,τ)⁻¹."""
    tau = _check_tau(spec, tau)
    m_tau = mobius(M, tau)
    D = np.diag(np.exp(TWO_PI_I * (spec.frequencies @ m_tau)))
    J_inv = np.diag(1.0 / automorphy_diagonal(M, tau, spec.weight))
    return spec.rep_in_basis.evaluate(M).conj().T @ D @ spec.seed_matrix @ J_inv


def absolute_sum(spec: PoincareSpec, tau: np.ndarray) -> float:
    """Σ ‖term‖₂ over the truncated coset set (ρ_T(M) is unitary, so it drops out)."""
    tau = _check_tau(spec, tau)
    rows = _active_rows(spec)
    if rows.shape[0] == 0:
        return 0.0
    table = coset_table(spec.field, spec.bound)
    norms = []
    for i in range(0, rows.shape[0], CHUNK_SIZE):
        values = _summands(spec, table.embedded[rows[i : i + CHUNK_SIZE]], tau)
        norms.extend(np.linalg.norm(values, ord=2, axis=(1, 2)).tolist())
    return math.fsum(norms)


@dataclass(frozen=True)
class ConvergenceRow:
    bound: float
    value: CMatrix
    delta: Optional[float]


@dataclass(frozen=True)
class ConvergenceReport:
    rows: Tuple[ConvergenceRow, ...]
    monotone: bool

    @property
    def deltas(self) -> List[float]:
        return [row.delta for row in self.rows if row.delta is not None]


def convergence_diagnostic(
    spec: PoincareSpec,
    tau: np.ndarray,
    bounds: Sequence[float],
    *,
    workers: int = 1,
) -> ConvergenceReport:
    """Evaluate at ascending bounds and report successive spectral-norm deltas.

    A delta that grows along the sequence marks the report non-monotone and emits a
    :class:`~hilbert_mvf.errors.ConvergenceWarning`.
    """
    if len(bounds) < 2:
        raise ValidationError("convergence_diagnostic needs at least two bounds")
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
        raise ValidationError(f"bounds must be strictly ascending, got {list(bounds)}")
    rows: List[ConvergenceRow] = []
    previous: Optional[CMatrix] = None
    for B in bounds:
        value = eval_poincare(spec.with_bound(B), tau, workers=workers)
        delta = None if previous is None else spectral_norm(value - previous)
        rows.append(ConvergenceRow(float(B), value, delta))
        previous = value
    deltas = [row.delta for row in rows if row.delta is not None]
    monotone = all(d2 <= d1 for d1, d2 in zip(deltas, deltas[1:]))
    if not monotone:
        msg = f"Poincaré deltas are not monotone: {deltas}"
        logger.warning(msg)
        warnings.warn(msg, ConvergenceWarning, stacklevel=2)
    return ConvergenceReport(tuple(rows), monotone)


def cusp_limit_check(
    spec: PoincareSpec,
    lambdas: Sequence[float],
    axis: Optional[int] = None,
    *,
    workers: int = 1,
) -> List[float]:
    """Largest component magnitude of G_B at τ = iλ(1, …, 1) (or iλ along ``axis`` for n = 1).

    Raises:
        AssumptionViolation: Eisenstein mode (the limit is not zero there).
        ValidationError: an axis direction for n ≥ 2, or λ < 1.
    """
    if spec.eisenstein:
        raise AssumptionViolation("cusp limit check is meaningless in Eisenstein mode")
    if axis is not None and spec.n != 1:
        raise ValidationError("the single-axis direction is only supported for n = 1")
    if any(lam < 1 for lam in lambdas):
        raise ValidationError(f"lambda values must be >= 1, got {list(lambdas)}")
    values = []
    for lam in lambdas:
        tau = 1j * lam * np.ones(spec.n)
        values.append(float(np.abs(eval_poincare(spec, tau, workers=workers)).max()))
    return values


def residual_representation(spec: PoincareSpec) -> ConjugatedRepresentation:
    """ρ in the basis T, the representation G_B transforms under."""
    return spec.rep_in_basis


def poincare_handle(spec: PoincareSpec, *, original_basis: bool = False, workers: int = 1) -> MatrixFunctionHandle:
    """G_B as a matrix function handle (evaluated point by point)."""

    def func(batch: np.ndarray) -> np.ndarray:
        return np.stack([eval_poincare(spec, tau, workers=workers, original_basis=original_basis) for tau in batch])

    rep = spec.representation if original_basis else spec.rep_in_basis
    return MatrixFunctionHandle(func, spec.r, spec.c, spec.weight, rep, spec.field, f"P_B{spec.bound:g}")


# ---------------------------------------------------------------------------
# Divisor-sum oracle
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _eisenstein_coefficients(k: int, terms: int) -> np.ndarray:
    factor = -2 * k / bernoulli(k)
    coeffs = np.zeros(terms + 1)
    coeffs[0] = 1.0
    for m in range(1, terms + 1):
        coeffs[m] = float(factor * divisor_sigma(m, k - 1))
    return coeffs


def eisenstein_q_series(k: int, tau: Union[complex, np.ndarray], terms: int = 60) -> Union[complex, np.ndarray]:
    """E_k(τ) = 1 − (2k/B_k) Σ_{m ≤ terms} σ_{k−1}(m) q^m with q = e^{2πiτ}.

    For k = 4 the coefficients are 240σ₃(m).
    """
    if k < 4 or k % 2:
        raise ValidationError(f"Eisenstein series need an even weight >= 4, got {k}")
    coeffs = _eisenstein_coefficients(k, terms)
    q = np.exp(TWO_PI_I * np.asarray(tau, dtype=np.complex128))
    total = np.zeros_like(q)
    power = np.ones_like(q)
    for coefficient in coeffs:
        total = total + coefficient * power
        power = power * q
    return complex(total) if np.ndim(total) == 0 else total
