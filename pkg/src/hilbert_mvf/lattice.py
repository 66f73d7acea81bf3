"""
Translation lattices Λ_H ⊂ ℝⁿ and their duals.

H is described only through S_H, which is either O_F or c·O_F. The lattice is
Λ_H = ι_F(S_H). It has the basis v_i = ι_F(a_i), collected as the columns of M, and the dual
basis D = (Mᵀ)⁻¹. Dual vectors are stored as integer coordinates in the dual basis, so they can
be hashed, ordered and serialized exactly.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from .errors import FieldMismatchError, LatticeError, ValidationError
from .field import Field, FieldElement
from .theory_types import DualCoords

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TranslationLattice:
    """Λ_H with basis matrix M and dual basis matrix D.

    Attributes:
        field: The field F.
        scale: The element c with S_H = c·O_F (c = 1 for the full lattice).
        basis: a_i = c·(i-th integral basis element).
        M: n×n matrix whose columns are v_i = ι_F(a_i).
        D: (Mᵀ)⁻¹; its columns d_j span Λ_H*.
        M_inv: M⁻¹, mapping τ to lattice coordinates.
    """

    field: Field
    scale: FieldElement
    basis: Tuple[FieldElement, ...] = dc_field(init=False)
    M: np.ndarray = dc_field(init=False, repr=False)
    D: np.ndarray = dc_field(init=False, repr=False)
    M_inv: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self) -> None:
        basis = tuple(self.scale * e for e in self.field.integral_basis)
        n = self.field.degree
        with mpmath.workdps(self.field.precision):
            m_hp = mpmath.matrix(n, n)
            for i, a_i in enumerate(basis):
                for j, s in enumerate(a_i.embed()):
                    m_hp[j, i] = s
            if mpmath.det(m_hp) == 0:
                raise LatticeError("lattice basis vectors are linearly dependent")
            m_inv_hp = mpmath.inverse(m_hp)
            M = np.array([[float(m_hp[r, c]) for c in range(n)] for r in range(n)])
            M_inv = np.array([[float(m_inv_hp[r, c]) for c in range(n)] for r in range(n)])
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "M_inv", M_inv)
        object.__setattr__(self, "D", M_inv.T.copy())

    @property
    def n(self) -> int:
        return self.field.degree

    @property
    def vectors(self) -> Tuple[np.ndarray, ...]:
        """The basis vectors v_1..v_n."""
        return tuple(self.M[:, i] for i in range(self.n))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TranslationLattice) and self.field == other.field and self.scale == other.scale

    def __hash__(self) -> int:
        return hash(("TranslationLattice", self.field, self.scale))

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        """Lattice coordinates M⁻¹x of a real or complex vector (or of the rows of a batch)."""
        x = np.asarray(x)
        return x @ self.M_inv.T

    def lattice_vector(self, coords: Sequence[int]) -> np.ndarray:
        return self.M @ np.asarray(coords, dtype=float)

    def dual_vector(self, coords: Sequence[int]) -> "DualVector":
        return DualVector(tuple(int(m) for m in coords), self)

    def is_dual(self, v: np.ndarray, tol: float = 1e-9) -> bool:
        """True if v pairs integrally with every basis vector of Λ_H."""
        pairing = np.asarray(v, dtype=float) @ self.M
        return bool(np.all(np.abs(pairing - np.rint(pairing)) <= tol))

    def __repr__(self) -> str:
        return f"TranslationLattice({self.field.name}, scale={self.scale!r})"


@dataclass(frozen=True, order=True)
class DualVector:
    """Element Σ m_j d_j of Λ_H*, identified by its integer coordinates."""

    coords: DualCoords
    lattice: TranslationLattice = dc_field(compare=False, repr=False)

    @property
    def real(self) -> np.ndarray:
        """Real coordinates v = D·m."""
        return self.lattice.D @ np.asarray(self.coords, dtype=float)

    def pairing(self, i: int) -> int:
        """d·v_i, which is the i-th integer coordinate."""
        return self.coords[i]

    def __add__(self, other: "DualVector") -> "DualVector":
        if other.lattice != self.lattice:
            raise FieldMismatchError("dual vectors of different lattices")
        return DualVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __neg__(self) -> "DualVector":
        return DualVector(tuple(-a for a in self.coords), self.lattice)

    def __sub__(self, other: "DualVector") -> "DualVector":
        return self + (-other)


def translation_lattice(F: Field, scale: Union[None, int, FieldElement] = None) -> TranslationLattice:
    """Translation lattice for S_H = O_F (``scale=None``) or S_H = c·O_F.

    Raises:
        LatticeError: c = 0.
        ValidationError: c not in O_F.
    """
    c = F.one if scale is None else F.one * scale
    if c.is_zero():
        raise LatticeError("ideal-scaled lattice needs c != 0")
    if not c.is_integral():
        raise ValidationError(f"scale {c!r} is not in O_F")
    L = TranslationLattice(F, c)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("translation lattice %r with M=%s", L, L.M.tolist())
    return L


def enumerate_dual(L: TranslationLattice, box_bound: float) -> List[DualVector]:
    """All dual vectors with max_j |v_j| ≤ box_bound, in lexicographic order of coordinates."""
    if box_bound < 0:
        raise ValidationError(f"box bound must be >= 0, got {box_bound}")
    slack = 1e-12 * max(1.0, box_bound)
    # m = Mᵀ v, so |m_i| ≤ bound · Σ_j |M_ji|
    reach = np.floor(box_bound * np.abs(L.M).sum(axis=0) + slack).astype(int)
    axes = [np.arange(-r, r + 1) for r in reach]
    grid = np.array(list(itertools.product(*axes)), dtype=float)
    real = grid @ L.D.T
    keep = np.all(np.abs(real) <= box_bound + slack, axis=1)
    return [DualVector(tuple(int(m) for m in row), L) for row in grid[keep].astype(int)]


def axis_periods(L: TranslationLattice) -> Tuple[Optional[int], ...]:
    """Minimal h_i > 0 with h_i·e_i ∈ Λ_H, or None where no such h_i exists.

    For n = 1 this is the generator length. For n = 2 every axis is absent: h·e_i ∈ Λ_H would
    need a nonzero element of O_F with a vanishing embedding.
    """
    if L.n == 1:
        return (int(round(abs(L.M[0, 0]))),)
    return tuple(None for _ in range(L.n))
