"""
Dense complex linear algebra for commuting families.

The central routine is :func:`sbtsd`. It takes a commuting family A_1..A_m of invertible
matrices and finds a basis T in which every A_i becomes block diagonal, with blocks that are
upper triangular and have a constant diagonal. The block sizes are the same for every i. The
construction follows the classical proof:

1. split ℂʳ into generalized eigenspaces ker(A_1 − λ)^m of A_1;
2. recurse with A_2, A_3, … on each summand (each summand is stable under the whole family);
3. inside every final joint summand, triangularize the restricted family simultaneously by
   repeatedly deflating a common eigenvector.

Computed eigenvalues are clustered with union-find. Floating point splits a defective eigenvalue
of multiplicity m into a cloud of radius about ε^{1/m}, so each cluster is checked against the
kernel dimension of (A − λ̄)^m, where λ̄ is the cluster mean. The clustering tolerance is widened
until the two agree.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import (
    ClusteringError,
    ConvergenceWarning,
    NonCommutingError,
    NotUnitaryError,
    NotUnitriangularError,
    SingularMatrixError,
    ValidationError,
)
from .theory_types import (
    CMatrix,
    TOL_BLOCK,
    TOL_CLUSTER,
    TOL_CLUSTER_CEILING,
    TOL_COMMUTE,
    TOL_RANK,
    TOL_TRIANGULAR,
    TOL_UNITARY,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SBTSDOptions:
    """Tolerances used by :func:`sbtsd`.

    Attributes
    ----------
    tol_commute : float
        Largest commutator entry accepted (scaled by max(1, ‖A‖²)).
    tol_cluster : float
        Initial relative clustering tolerance for eigenvalues.
    tol_rank : float
        Relative singular-value threshold for kernels.
    tol_block : float
        Largest off-pattern entry accepted after the change of basis.
    """

    tol_commute: float = TOL_COMMUTE
    tol_cluster: float = TOL_CLUSTER
    tol_rank: float = TOL_RANK
    tol_block: float = TOL_BLOCK


def as_cmatrix(A: object, *, square: bool = True) -> CMatrix:
    """Convert to a finite complex128 matrix, validating the shape."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2:
        raise ValidationError(f"expected a matrix, got an array of shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    return M


def _as_family(family: Sequence[object]) -> List[CMatrix]:
    mats = [as_cmatrix(A) for A in family]
    if not mats:
        raise ValidationError("empty matrix family")
    r = mats[0].shape[0]
    if any(A.shape != (r, r) for A in mats):
        raise ValidationError(f"dimension mismatch in family: {[A.shape for A in mats]}")
    return mats


def spectral_norm(A: object) -> float:
    """Largest singular value."""
    M = np.asarray(A, dtype=np.complex128)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def max_entry_norm(A: object) -> float:
    """max_{i,j} |a_ij|."""
    M = np.asarray(A, dtype=np.complex128)
    return float(np.abs(M).max()) if M.size else 0.0


def commuting_residual(family: Sequence[object]) -> float:
    """max over pairs of the largest entry of A_iA_j − A_jA_i."""
    mats = _as_family(family)
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            worst = max(worst, max_entry_norm(mats[i] @ mats[j] - mats[j] @ mats[i]))
    return worst


def is_unitary(A: object, tol: float = TOL_UNITARY) -> bool:
    M = as_cmatrix(A)
    return max_entry_norm(M.conj().T @ M - np.eye(M.shape[0])) <= tol


def triangular_side(U: object, tol: float = TOL_TRIANGULAR) -> Optional[str]:
    """Return "upper", "lower" or None according to which side U is unitriangular on.

    The identity counts as "upper".
    """
    M = as_cmatrix(U)
    if max_entry_norm(np.diag(M) - 1) > tol:
        return None
    if max_entry_norm(np.tril(M, -1)) <= tol:
        return "upper"
    if max_entry_norm(np.triu(M, 1)) <= tol:
        return "lower"
    return None


def is_unitriangular(U: object, tol: float = TOL_TRIANGULAR) -> bool:
    return triangular_side(U, tol) is not None


def null_space(A: CMatrix, threshold: float) -> CMatrix:
    """Orthonormal basis of the right singular vectors with singular value ≤ threshold."""
    if A.shape[0] == 0:
        return np.eye(A.shape[1], dtype=np.complex128)
    _, s, vh = scipy.linalg.svd(A)
    rank = int(np.sum(s > threshold))
    return vh[rank:].conj().T


def _cluster(values: np.ndarray, radius: float) -> List[List[int]]:
    """Union-find on |λ_a − λ_b| ≤ radius; clusters sorted by (Re, Im) of their means."""
    parent = list(range(len(values)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            if abs(values[a] - values[b]) <= radius:
                parent[find(a)] = find(b)
    groups: dict = {}
    for i in range(len(values)):
        groups.setdefault(find(i), []).append(i)

    def key(g: List[int]) -> Tuple[float, float]:
        mean = values[g].mean()
        return (round(float(mean.real), 8), round(float(mean.imag), 8))

    return sorted(groups.values(), key=key)


def generalized_eigenspaces(
    A: object,
    basis: Optional[CMatrix] = None,
    tol_cluster: float = TOL_CLUSTER,
    tol_rank: float = TOL_RANK,
) -> List[Tuple[complex, CMatrix]]:
    """Split an A-stable subspace into generalized eigenspaces of A.

    Args:
        A: Square matrix acting on ℂʳ.
        basis: Orthonormal columns spanning an A-stable subspace (default: all of ℂʳ).
        tol_cluster: Initial relative clustering tolerance.
        tol_rank: Relative singular-value threshold for the kernels of (A − λ̄)^m.

    Returns:
        list: (λ̄, Q) pairs; Q has orthonormal columns in ambient coordinates spanning
        ker(A − λ̄)^m within the subspace.

    Raises:
        ClusteringError: no tolerance up to the ceiling yields consistent kernel dimensions.
    """
    A = as_cmatrix(A)
    Q0 = np.eye(A.shape[0], dtype=np.complex128) if basis is None else np.asarray(basis, dtype=np.complex128)
    B = Q0.conj().T @ A @ Q0
    k = B.shape[0]
    eigs = scipy.linalg.eigvals(B)
    scale = max(1.0, float(np.abs(eigs).max()))
    tol = tol_cluster
    while True:
        groups = _cluster(eigs, tol * scale)
        if len(groups) == 1:
            return [(complex(np.trace(B) / k), Q0)]
        spaces = []
        for g in groups:
            lam = complex(eigs[g].mean())
            m = len(g)
            shifted = B - lam * np.eye(k)
            power = np.linalg.matrix_power(shifted, m)
            threshold = tol_rank * max(1.0, spectral_norm(shifted)) ** m
            K = null_space(power, threshold)
            if K.shape[1] != m:
                break
            spaces.append((complex(np.trace(K.conj().T @ B @ K) / m), K))
        else:
            # split halves of one Jordan chain share an eigenvector
            if float(scipy.linalg.svdvals(np.hstack([K for _, K in spaces])).min()) > math.sqrt(tol_rank):
                return [(lam, Q0 @ K) for lam, K in spaces]
        if tol >= TOL_CLUSTER_CEILING:
            raise ClusteringError(
                f"eigenvalue clusters inconsistent with kernel dimensions up to tolerance {tol:g}"
            )
        tol *= 10.0
        logger.info("widening eigenvalue clustering tolerance to %g", tol)


def _joint_triangularize(mats: Sequence[CMatrix]) -> CMatrix:
    """Unitary U with U*B U upper triangular for a commuting family with single eigenvalues."""
    k = mats[0].shape[0]
    U = np.eye(k, dtype=np.complex128)
    for s in range(k - 1):
        V = U[:, s:]
        size = k - s
        stack = []
        for B in mats:
            C = V.conj().T @ B @ V
            stack.append(C - (np.trace(C) / size) * np.eye(size))
        _, _, vh = scipy.linalg.svd(np.vstack(stack))
        x = vh[-1].conj()
        Qx, _ = scipy.linalg.qr(x[:, None])
        U[:, s:] = V @ Qx
    return U


def principal_exponent(lam: complex) -> complex:
    """μ with e^{2πiμ} = λ and Re μ ∈ [0, 1)."""
    mu = complex(np.log(complex(lam)) / (2j * math.pi))
    re = mu.real - math.floor(mu.real)
    if re >= 1.0:
        re = 0.0
    return complex(re, mu.imag)


@dataclass(frozen=True)
class SBTSDResult:
    """Simultaneous block-triangularization of a commuting family.

    Attributes
    ----------
    T : ndarray
        Change of basis; columns are the new basis of ℂʳ.
    T_inv : ndarray
        Inverse of T.
    block_sizes : tuple of int
        m_1..m_t, shared by the whole family.
    eigenvalues : ndarray
        λ_{i,j}, shape (family size, t).
    B : tuple of ndarray
        T⁻¹A_iT with every block cleaned to exact upper-triangular form.
    S : tuple of ndarray
        Block-diagonal unitriangular matrices with blocks (B_{i,j}/λ_{i,j})⁻¹.
    exponents : ndarray
        Principal exponents μ_{i,j} (Re in [0, 1)), shape (family size, t).
    """

    T: CMatrix
    T_inv: CMatrix
    block_sizes: Tuple[int, ...]
    eigenvalues: np.ndarray
    B: Tuple[CMatrix, ...]
    S: Tuple[CMatrix, ...]
    exponents: np.ndarray

    @property
    def block_slices(self) -> Tuple[slice, ...]:
        offsets = np.concatenate([[0], np.cumsum(self.block_sizes)]).astype(int)
        return tuple(slice(int(offsets[j]), int(offsets[j + 1])) for j in range(len(self.block_sizes)))

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    def block(self, i: int, j: int) -> CMatrix:
        """B_{i,j}."""
        sl = self.block_slices[j]
        return self.B[i][sl, sl]

    def s_block(self, i: int, j: int) -> CMatrix:
        sl = self.block_slices[j]
        return self.S[i][sl, sl]

    @property
    def eigenvalue_tuples(self) -> List[Tuple[complex, ...]]:
        """Joint eigenvalue tuple (λ_{1,j}, …, λ_{m,j}) of every block j."""
        return [tuple(complex(x) for x in self.eigenvalues[:, j]) for j in range(self.num_blocks)]

    def residual(self, family: Sequence[object]) -> float:
        """max_i ‖T⁻¹A_iT − B_i‖₂."""
        mats = _as_family(family)
        return max(spectral_norm(self.T_inv @ A @ self.T - B) for A, B in zip(mats, self.B))


def sbtsd(family: Sequence[object], options: SBTSDOptions = SBTSDOptions()) -> SBTSDResult:
    """Simultaneously block-triangularize a commuting family of invertible matrices.

    Args:
        family: A_1..A_m, square, same size, pairwise commuting, invertible.
        options: Tolerances.

    Returns:
        SBTSDResult: change of basis, blocks, eigenvalues, unipotent factors and exponents.

    Raises:
        ValidationError: shapes are inconsistent.
        NonCommutingError: the commuting residual exceeds ``tol_commute``.
        SingularMatrixError: some A_i, or the computed T, is singular.
        ClusteringError: eigenvalue clusters cannot be made consistent.

    Example:
        >>> res = sbtsd([np.diag([1, 2]), np.diag([5, 5])])
        >>> res.block_sizes
        (1, 1)
    """
    mats = _as_family(family)
    r = mats[0].shape[0]
    norm_scale = max(1.0, max(spectral_norm(A) for A in mats))
    residual = commuting_residual(mats)
    if residual > options.tol_commute * norm_scale**2:
        raise NonCommutingError(
            f"commuting residual {residual:.3g} exceeds tolerance {options.tol_commute:g}"
        )
    for idx, A in enumerate(mats):
        smin = float(scipy.linalg.svdvals(A).min())
        if smin <= options.tol_rank * max(1.0, spectral_norm(A)):
            raise SingularMatrixError(f"matrix {idx} is singular (smallest singular value {smin:.3g})")

    leaves: List[CMatrix] = [np.eye(r, dtype=np.complex128)]
    for A in mats:
        refined: List[CMatrix] = []
        for Q in leaves:
            refined.extend(Qs for _, Qs in generalized_eigenspaces(A, Q, options.tol_cluster, options.tol_rank))
        leaves = refined

    columns = []
    for Q in leaves:
        restricted = [Q.conj().T @ A @ Q for A in mats]
        columns.append(Q @ _joint_triangularize(restricted))
    T = np.hstack(columns)
    sizes = tuple(int(Q.shape[1]) for Q in leaves)
    try:
        T_inv = scipy.linalg.inv(T)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularMatrixError(f"change of basis is singular: {exc}") from exc
    if np.linalg.cond(T) > 1e12:
        raise SingularMatrixError(f"change of basis is ill-conditioned (cond {np.linalg.cond(T):.3g})")

    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    eigenvalues = np.zeros((len(mats), len(sizes)), dtype=np.complex128)
    B_clean, S_list = [], []
    for i, A in enumerate(mats):
        raw = T_inv @ A @ T
        scale = max(1.0, spectral_norm(A))
        Bi = np.zeros((r, r), dtype=np.complex128)
        Si = np.zeros((r, r), dtype=np.complex128)
        for j, m in enumerate(sizes):
            sl = slice(offsets[j], offsets[j + 1])
            blk = raw[sl, sl]
            lam = complex(np.trace(blk) / m)
            eigenvalues[i, j] = lam
            off_pattern = max(
                max_entry_norm(np.tril(blk, -1)),
                max_entry_norm(np.diag(blk) - lam),
            )
            if off_pattern > options.tol_block * scale * max(1.0, np.linalg.cond(T)):
                raise ClusteringError(
                    f"block {j} of matrix {i} is not triangular with constant diagonal "
                    f"(off-pattern {off_pattern:.3g})"
                )
            clean = np.triu(blk, 1) + lam * np.eye(m)
            Bi[sl, sl] = clean
            inv = scipy.linalg.solve_triangular(clean / lam, np.eye(m), lower=False)
            Si[sl, sl] = np.triu(inv, 1) + np.eye(m)
        off_block = max_entry_norm(raw - _block_mask(raw, offsets))
        if off_block > options.tol_block * scale * max(1.0, np.linalg.cond(T)):
            raise ClusteringError(f"matrix {i} leaks between blocks (off-block {off_block:.3g})")
        B_clean.append(Bi)
        S_list.append(Si)

    exponents = np.vectorize(principal_exponent, otypes=[np.complex128])(eigenvalues)
    result = SBTSDResult(T, T_inv, sizes, eigenvalues, tuple(B_clean), tuple(S_list), exponents)
    logger.info("sbtsd: r=%d, family=%d, blocks=%s", r, len(mats), sizes)
    return result


def _block_mask(raw: CMatrix, offsets: np.ndarray) -> CMatrix:
    out = np.zeros_like(raw)
    for j in range(len(offsets) - 1):
        sl = slice(offsets[j], offsets[j + 1])
        out[sl, sl] = raw[sl, sl]
    return out


def unipotent_log(U: object) -> CMatrix:
    """log U = Σ_{k≥1} (−1)^{k+1}(U − I)^k / k for unitriangular U (a finite sum).

    Raises:
        NotUnitriangularError: U is not unitriangular on either side.
    """
    M = as_cmatrix(U)
    side = triangular_side(M)
    if side is None:
        raise NotUnitriangularError("unipotent_log needs a unitriangular matrix")
    r = M.shape[0]
    N = M - np.eye(r)
    N = np.triu(N, 1) if side == "upper" else np.tril(N, -1)
    result = np.zeros_like(N)
    power = np.eye(r, dtype=np.complex128)
    for k in range(1, r):
        power = power @ N
        result = result + ((-1) ** (k + 1)) * power / k
    return result


def nilpotent_exp(N: object) -> CMatrix:
    """exp N = Σ_{k<r} N^k / k! for strictly triangular N."""
    M = as_cmatrix(N)
    r = M.shape[0]
    if max_entry_norm(np.tril(M)) > TOL_TRIANGULAR and max_entry_norm(np.triu(M)) > TOL_TRIANGULAR:
        raise NotUnitriangularError("nilpotent_exp needs a strictly triangular matrix")
    result = np.eye(r, dtype=np.complex128)
    power = np.eye(r, dtype=np.complex128)
    for k in range(1, r):
        power = power @ M / k
        result = result + power
    return result


def unitary_simdiag(family: Sequence[object], tol: float = TOL_CLUSTER) -> Tuple[CMatrix, List[np.ndarray]]:
    """Simultaneously diagonalize commuting unitary matrices by a unitary T.

    Eigenspaces are split matrix by matrix with a complex Schur decomposition (diagonal for
    normal input). Columns are ordered by the principal exponents arg(λ)/2π ∈ [0, 1) of the
    successive matrices.

    Returns:
        tuple: (T, diagonals), where ``diagonals[i]`` is the diagonal of T*A_iT.

    Raises:
        NotUnitaryError: some matrix is not unitary.
        NonCommutingError: the family does not commute.
    """
    mats = _as_family(family)
    for idx, A in enumerate(mats):
        if not is_unitary(A):
            raise NotUnitaryError(f"matrix {idx} is not unitary")
    residual = commuting_residual(mats)
    if residual > TOL_COMMUTE:
        raise NonCommutingError(f"commuting residual {residual:.3g} exceeds tolerance {TOL_COMMUTE:g}")
    r = mats[0].shape[0]
    spaces: List[CMatrix] = [np.eye(r, dtype=np.complex128)]
    for A in mats:
        refined: List[CMatrix] = []
        for Q in spaces:
            C = Q.conj().T @ A @ Q
            schur_form, Z = scipy.linalg.schur(C, output="complex")
            eig = np.diag(schur_form)
            groups = _cluster(eig, tol)
            groups.sort(key=lambda g: round(principal_exponent(eig[g].mean()).real, 8) % 1.0)
            refined.extend(Q @ Z[:, g] for g in groups)
        spaces = refined
    T = np.hstack(spaces)
    diagonals = [np.diag(T.conj().T @ A @ T).copy() for A in mats]
    for idx, A in enumerate(mats):
        off = max_entry_norm(T.conj().T @ A @ T - np.diag(diagonals[idx]))
        if off > 1e-9:
            warnings.warn(f"unitary_simdiag: off-diagonal residual {off:.3g}", ConvergenceWarning)
    return T, diagonals
