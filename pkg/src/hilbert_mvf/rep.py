"""
Representations ρ of SL₂(O_F) with direct evaluation on matrices.

No word problem is ever solved: every representation evaluates ρ(γ) straight from the entries
of γ. Three kinds are provided:

- :class:`TrivialRepresentation`: ρ(γ) = I_r.
- :class:`PermutationRepresentation`: the permutation action of γ mod p on the projective line
  over the residue field O_F/p.
- :class:`TranslationRepresentation`: prescribed commuting matrices A_i = ρ(T_{a_i}) on the
  translations of a lattice; evaluation anywhere else is undefined.

:class:`ConjugatedRepresentation` expresses any of these in another basis.
"""
from __future__ import annotations

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from sympy import isprime

from .errors import (
    FieldMismatchError,
    NonCommutingError,
    NotPrimeError,
    SingularMatrixError,
    UndefinedEvaluationError,
    ValidationError,
)
from .field import Field, FieldElement, SL2Matrix, make_field
from .lattice import TranslationLattice, translation_lattice
from .linalg import as_cmatrix, commuting_residual, is_unitary, spectral_norm
from .theory_types import CMatrix, TOL_COMMUTE

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Residue fields
# ---------------------------------------------------------------------------


class ResidueField:
    """O_F/p for a prime p of O_F, with elements encoded as integers 0..size−1.

    Degree one (N(p) = ±q): a + bω ↦ (a + b·w) mod q, where w is the root of the minimal
    polynomial of ω with p | (ω − w).

    Degree two (p an associate of an inert rational prime q): a + bω ↦ x + q·y with
    (x, y) = (a mod q, b mod q), multiplied through ω² = tω + c₀.
    """

    __slots__ = ("field", "prime", "q", "degree", "root", "size")

    def __init__(self, F: Field, p: FieldElement):
        if p.field != F:
            raise FieldMismatchError("prime from a different field")
        if not p.is_integral() or p.is_zero():
            raise NotPrimeError(f"{p!r} is not a nonzero element of O_F")
        norm = abs(int(p.norm()))
        self.field = F
        self.prime = p
        self.root: Optional[int] = None
        if isprime(norm):
            self.q, self.degree = norm, 1
            if F.degree == 2:
                self.root = self._matching_root(F, p, norm)
        elif F.degree == 2 and _is_square_of_prime(norm):
            q = int(round(norm**0.5))
            if not (p / q).is_unit():
                raise NotPrimeError(f"{p!r} has norm {norm} but is not an associate of {q}")
            if any(_minimal_polynomial_root_mod(F, q, w) for w in range(q)):
                raise NotPrimeError(f"{q} splits or ramifies in {F.name}, so {p!r} is not prime")
            self.q, self.degree = q, 2
        else:
            raise NotPrimeError(f"{p!r} is not prime in O_F (norm {norm})")
        self.size = self.q**self.degree

    @staticmethod
    def _matching_root(F: Field, p: FieldElement, q: int) -> int:
        for w in range(q):
            if _minimal_polynomial_root_mod(F, q, w) and ((F.omega - w) / p).is_integral():
                return w
        raise NotPrimeError(f"no residue root of ω matches {p!r} modulo {q}")

    # -- reduction ------------------------------------------------------
    def reduce(self, x: Union[FieldElement, int]) -> int:
        x = self.field.one * x
        a, b = x.coords
        return int(self.reduce_coords(np.array([a]), np.array([b]))[0])

    def reduce_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Vectorized reduction of integer coordinate arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.degree == 1:
            w = 0 if self.root is None else self.root
            return np.mod(np.mod(a, self.q) + np.mod(b, self.q) * w, self.q)
        return np.mod(a, self.q) + self.q * np.mod(b, self.q)

    # -- arithmetic on codes --------------------------------------------
    def _split(self, x: int) -> Tuple[int, int]:
        return x % self.q, x // self.q

    def add(self, x: int, y: int) -> int:
        if self.degree == 1:
            return (x + y) % self.q
        (x0, x1), (y0, y1) = self._split(x), self._split(y)
        return (x0 + y0) % self.q + self.q * ((x1 + y1) % self.q)

    def mul(self, x: int, y: int) -> int:
        if self.degree == 1:
            return (x * y) % self.q
        (x0, x1), (y0, y1) = self._split(x), self._split(y)
        t, c0 = self.field.omega_trace, self.field.omega_const
        low = (x0 * y0 + c0 * x1 * y1) % self.q
        high = (x0 * y1 + x1 * y0 + t * x1 * y1) % self.q
        return low + self.q * high

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in a residue field")
        if self.degree == 1:
            return pow(x, self.q - 2, self.q)
        x0, x1 = self._split(x)
        t, c0 = self.field.omega_trace, self.field.omega_const
        norm = (x0 * x0 + t * x0 * x1 - c0 * x1 * x1) % self.q
        n_inv = pow(norm, self.q - 2, self.q)
        conj0, conj1 = (x0 + t * x1) % self.q, (-x1) % self.q
        return (conj0 * n_inv) % self.q + self.q * ((conj1 * n_inv) % self.q)

    def __repr__(self) -> str:
        return f"ResidueField({self.field.name}/({self.prime!r}), size={self.size})"


def _is_square_of_prime(n: int) -> bool:
    root = int(round(n**0.5))
    return root * root == n and isprime(root)


def _minimal_polynomial_root_mod(F: Field, q: int, w: int) -> bool:
    return (w * w - F.omega_trace * w - F.omega_const) % q == 0


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------


class Representation:
    """Base class: a representation ρ: SL₂(O_F) → GL_r(ℂ) evaluated matrix by matrix.

    Subclasses implement :meth:`evaluate`. Everything else is derived from it.
    """

    dimension: int
    field: Optional[Field] = None
    kind: str = "abstract"

    def evaluate(self, gamma: SL2Matrix) -> CMatrix:
        """Return ρ(γ)."""
        raise NotImplementedError

    def __call__(self, gamma: SL2Matrix) -> CMatrix:
        return self.evaluate(gamma)

    @property
    def is_unitary(self) -> bool:
        return False

    def _check_field(self, gamma: SL2Matrix) -> None:
        if self.field is not None and gamma.field != self.field:
            raise FieldMismatchError(f"representation over {self.field.name} evaluated on {gamma.field.name}")

    def translation_images(self, L: TranslationLattice) -> List[CMatrix]:
        """A_i = ρ(T_{a_i}) for the basis a_i of S_H."""
        return [self.evaluate(SL2Matrix.T(L.field, a)) for a in L.basis]

    def batch_images(self, F: Field, entries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct images of many matrices plus an index into them.

        Args:
            F: The field of the matrices.
            entries: Integer coordinates of shape (K, 4, 2), rows ordered a, b, c, d.

        Returns:
            tuple: (images of shape (G, r, r), index of shape (K,)).
        """
        entries = np.asarray(entries, dtype=np.int64)
        images: List[CMatrix] = []
        seen: Dict[bytes, int] = {}
        index = np.zeros(entries.shape[0], dtype=np.int64)
        for row in range(entries.shape[0]):
            gamma = _sl2_from_coords(F, entries[row])
            image = self.evaluate(gamma)
            key = np.round(image, 12).tobytes()
            if key not in seen:
                seen[key] = len(images)
                images.append(image)
            index[row] = seen[key]
        stacked = np.array(images) if images else np.zeros((0, self.dimension, self.dimension), dtype=np.complex128)
        return stacked, index

    def conjugate(self, T: CMatrix) -> "ConjugatedRepresentation":
        """The representation γ ↦ T⁻¹ρ(γ)T."""
        return ConjugatedRepresentation(self, as_cmatrix(T))

    def homomorphism_residual(self, pairs: Iterable[Tuple[SL2Matrix, SL2Matrix]]) -> float:
        """max ‖ρ(γδ) − ρ(γ)ρ(δ)‖₂ over the given pairs."""
        worst = 0.0
        for gamma, delta in pairs:
            worst = max(worst, spectral_norm(self.evaluate(gamma @ delta) - self.evaluate(gamma) @ self.evaluate(delta)))
        return worst


class TrivialRepresentation(Representation):
    """ρ(γ) = I_r for every γ and every field."""

    kind = "trivial"

    def __init__(self, r: int):
        if isinstance(r, bool) or not isinstance(r, int):
            raise TypeError(f"dimension must be an int, got {type(r).__name__}")
        if r < 1:
            raise ValidationError(f"dimension must be positive, got {r}")
        self.dimension = r

    @property
    def is_unitary(self) -> bool:
        return True

    def evaluate(self, gamma: SL2Matrix) -> CMatrix:
        return np.eye(self.dimension, dtype=np.complex128)

    def batch_images(self, F: Field, entries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        count = np.asarray(entries).shape[0]
        return np.eye(self.dimension, dtype=np.complex128)[None], np.zeros(count, dtype=np.int64)

    def __repr__(self) -> str:
        return f"TrivialRepresentation({self.dimension})"


class PermutationRepresentation(Representation):
    """Permutation action of SL₂(O_F/p) on P¹(O_F/p).

    Points are ordered as the residue codes 0..q^f − 1 followed by ∞; ρ(γ)e_z = e_{γz}.
    """

    kind = "permmod"

    def __init__(self, residue_field: ResidueField):
        self.residue = residue_field
        self.field = residue_field.field
        self.dimension = residue_field.size + 1

    @property
    def infinity(self) -> int:
        return self.residue.size

    @property
    def is_unitary(self) -> bool:
        return True

    def act(self, codes: Tuple[int, int, int, int], z: int) -> int:
        """Image of the point z under the fractional-linear map with residue entries ``codes``."""
        R = self.residue
        a, b, c, d = codes
        if z == self.infinity:
            num, den = a, c
        else:
            num, den = R.add(R.mul(a, z), b), R.add(R.mul(c, z), d)
        if den == 0:
            return self.infinity
        return R.mul(num, R.inv(den))

    def _matrix_from_codes(self, codes: Tuple[int, int, int, int]) -> CMatrix:
        P = np.zeros((self.dimension, self.dimension), dtype=np.complex128)
        for z in range(self.dimension):
            P[self.act(codes, z), z] = 1.0
        return P

    def evaluate(self, gamma: SL2Matrix) -> CMatrix:
        self._check_field(gamma)
        codes = tuple(self.residue.reduce(x) for x in (gamma.a, gamma.b, gamma.c, gamma.d))
        return self._matrix_from_codes(codes)  # type: ignore[arg-type]

    def batch_images(self, F: Field, entries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        entries = np.asarray(entries, dtype=np.int64)
        if entries.shape[0] == 0:
            return np.zeros((0, self.dimension, self.dimension), dtype=np.complex128), np.zeros(0, dtype=np.int64)
        codes = np.stack([self.residue.reduce_coords(entries[:, k, 0], entries[:, k, 1]) for k in range(4)], axis=1)
        unique, index = np.unique(codes, axis=0, return_inverse=True)
        images = np.array([self._matrix_from_codes(tuple(int(x) for x in row)) for row in unique])  # type: ignore[arg-type]
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("permutation images: %d matrices, %d distinct", entries.shape[0], len(unique))
        return images, np.asarray(index).reshape(-1)

    def __repr__(self) -> str:
        return f"PermutationRepresentation({self.residue!r})"


class TranslationRepresentation(Representation):
    """ρ(T^a) = Π A_i^{n_i} for a = Σ n_i a_i ∈ S_H; undefined off the translations."""

    kind = "translation"

    def __init__(self, matrices: Sequence[object], lattice: TranslationLattice):
        mats = [as_cmatrix(A) for A in matrices]
        if len(mats) != lattice.n:
            raise ValidationError(f"need {lattice.n} translation matrices for {lattice!r}, got {len(mats)}")
        r = mats[0].shape[0]
        if any(A.shape != (r, r) for A in mats):
            raise ValidationError("translation matrices have different sizes")
        residual = commuting_residual(mats) if len(mats) > 1 else 0.0
        if residual > TOL_COMMUTE * max(1.0, max(spectral_norm(A) for A in mats)) ** 2:
            raise NonCommutingError(f"commuting residual {residual:.3g} exceeds tolerance {TOL_COMMUTE:g}")
        for idx, A in enumerate(mats):
            if float(scipy.linalg.svdvals(A).min()) <= 1e-12 * max(1.0, spectral_norm(A)):
                raise SingularMatrixError(f"translation matrix {idx} is singular")
        self.matrices = tuple(mats)
        self.lattice = lattice
        self.field = lattice.field
        self.dimension = r

    @property
    def is_unitary(self) -> bool:
        return all(is_unitary(A) for A in self.matrices)

    def lattice_coefficients(self, a: FieldElement) -> Tuple[int, ...]:
        """Integers n_i with a = Σ n_i a_i."""
        x = a / self.lattice.scale
        if not x.is_integral():
            raise UndefinedEvaluationError(f"{a!r} is not in the translation lattice")
        return x.coords[: self.lattice.n]

    def evaluate(self, gamma: SL2Matrix) -> CMatrix:
        self._check_field(gamma)
        if not gamma.is_translation():
            raise UndefinedEvaluationError("translation-only representation is undefined for non-translation matrices")
        result = np.eye(self.dimension, dtype=np.complex128)
        for A, power in zip(self.matrices, self.lattice_coefficients(gamma.b)):
            result = result @ np.linalg.matrix_power(A if power >= 0 else np.linalg.inv(A), abs(power))
        return result

    def translation_images(self, L: TranslationLattice) -> List[CMatrix]:
        if L == self.lattice:
            return [A.copy() for A in self.matrices]
        return super().translation_images(L)

    def __repr__(self) -> str:
        return f"TranslationRepresentation(r={self.dimension}, {self.lattice!r})"


class ConjugatedRepresentation(Representation):
    """γ ↦ T⁻¹ρ(γ)T (T* for unitary T)."""

    def __init__(self, base: Representation, T: CMatrix):
        if T.shape != (base.dimension, base.dimension):
            raise ValidationError(f"basis of shape {T.shape} for a representation of dimension {base.dimension}")
        self.base = base
        self.T = T
        self.T_inv = T.conj().T if is_unitary(T) else np.linalg.inv(T)

    @property
    def dimension(self) -> int:  # type: ignore[override]
        return self.base.dimension

    @property
    def field(self) -> Optional[Field]:  # type: ignore[override]
        return self.base.field

    @property
    def kind(self) -> str:  # type: ignore[override]
        return self.base.kind

    @property
    def is_unitary(self) -> bool:
        return self.base.is_unitary and is_unitary(self.T)

    def evaluate(self, gamma: SL2Matrix) -> CMatrix:
        return self.T_inv @ self.base.evaluate(gamma) @ self.T

    def batch_images(self, F: Field, entries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        images, index = self.base.batch_images(F, entries)
        return self.T_inv @ images @ self.T, index


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def trivial_rep(r: int) -> TrivialRepresentation:
    return TrivialRepresentation(r)


@lru_cache(maxsize=32)
def _cached_residue_field(F: Field, p: FieldElement) -> ResidueField:
    return ResidueField(F, p)


def perm_rep_mod_p(F: Field, p: Union[int, FieldElement, Tuple[int, int]]) -> PermutationRepresentation:
    """Permutation representation on P¹(O_F/p).

    Args:
        F: The field.
        p: A prime of O_F, given as an element, a rational integer or integer coordinates (a, b).

    Raises:
        NotPrimeError: p is not a prime of O_F.
    """
    if isinstance(p, tuple):
        p = F.element(*p)
    elif isinstance(p, int) and not isinstance(p, bool):
        p = F.from_int(p)
    elif not isinstance(p, FieldElement):
        raise TypeError(f"prime must be an int, a coordinate pair or a FieldElement, got {type(p).__name__}")
    rep = PermutationRepresentation(_cached_residue_field(F, p))
    logger.info("permutation representation mod %r over %s: r=%d", p, F.name, rep.dimension)
    return rep


def translation_rep(matrices: Sequence[object], lattice: Optional[TranslationLattice] = None) -> TranslationRepresentation:
    """Translation-only representation with ρ(T_{a_i}) = A_i.

    With no lattice, one matrix means the full lattice ℤ ⊂ ℝ.
    """
    if lattice is None:
        if len(matrices) != 1:
            raise ValidationError("a lattice is required for more than one translation matrix")
        lattice = translation_lattice(make_field("Q"))
    return TranslationRepresentation(matrices, lattice)


def parse_rep_spec(text: str, F: Field) -> Representation:
    """Parse ``trivial:r``, ``permmod:p``, ``permmod:a,b`` or ``custom:file.json``.

    The custom file holds ``{"matrices": [...]}`` with complex entries as ``[re, im]`` pairs;
    the matrices become a translation-only representation on the full lattice of F.
    """
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "trivial":
            return trivial_rep(int(arg))
        if kind == "permmod":
            parts = [int(x) for x in arg.split(",")]
            if len(parts) == 1:
                return perm_rep_mod_p(F, parts[0])
            if len(parts) == 2:
                return perm_rep_mod_p(F, (parts[0], parts[1]))
            raise ValidationError(f"permmod needs one integer or a coordinate pair, got {arg!r}")
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"cannot parse representation spec {text!r}: {exc}") from exc
    if kind == "custom":
        from .serialization import matrix_from_json

        path = Path(arg)
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read representation file {path}: {exc}") from exc
        matrices = [matrix_from_json(m) for m in document.get("matrices", [])]
        return translation_rep(matrices, translation_lattice(F))
    raise ValidationError(f"unknown representation kind {kind!r}; expected trivial, permmod or custom")


def _sl2_from_coords(F: Field, row: np.ndarray) -> SL2Matrix:
    return SL2Matrix(*(F.element(int(row[k, 0]), int(row[k, 1])) for k in range(4)))


def random_sl2(F: Field, rng: np.random.Generator, length: int = 3) -> SL2Matrix:
    """A random word of the given length in S, T^{±1} and (quadratic F) T^{±ω}.

    Only used to draw sample matrices for checks.
    """
    generators = [SL2Matrix.S(F)]
    for x in F.integral_basis:
        generators.append(SL2Matrix.T(F, x))
        generators.append(SL2Matrix.T(F, -x))
    gamma = SL2Matrix.identity(F)
    for _ in range(length):
        gamma = gamma @ generators[int(rng.integers(len(generators)))]
    return gamma
