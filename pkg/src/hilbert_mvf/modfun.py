"""
Automorphy factors, the Möbius action on 𝓗ⁿ and the slash action on matrix-valued functions.

A matrix-valued Hilbert modular function of weight k (a c×n integer matrix) for ρ satisfies

    G(γτ) J_k(γ, τ)⁻¹ = ρ(γ) G(τ),   J_k(γ, τ) = diag(j_{k_1}(γ, τ), …, j_{k_c}(γ, τ)),

with j_{k_i}(γ, τ) = Π_j (σ_j(c)τ_j + σ_j(d))^{k_{i,j}}. Powers are taken by repeated
multiplication, so no branch of the complex logarithm is ever involved.

Function handles evaluate on a single point (shape (n,)) or a batch (shape (m, n)); the batch
form returns an array of shape (m, r, c).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import FieldMismatchError, ValidationError
from .field import Field, SL2Matrix
from .linalg import spectral_norm
from .rep import Representation, TrivialRepresentation
from .theory_types import SAMPLE_IM_RANGE, SAMPLE_RE_RANGE, WeightRows

logger = logging.getLogger(__name__)

BatchFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WeightMatrix:
    """Integer weight matrix k ∈ M_{c,n}(ℤ), stored row by row."""

    rows: WeightRows

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        if not rows or any(len(row) != len(rows[0]) for row in rows) or not rows[0]:
            raise ValidationError(f"weight rows must be non-empty and of equal length, got {self.rows!r}")
        for row, original in zip(rows, self.rows):
            if any(isinstance(x, float) and not float(x).is_integer() for x in original):
                raise ValidationError(f"weights must be integers, got {original!r}")
        object.__setattr__(self, "rows", rows)

    @property
    def c(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    @property
    def min_entry(self) -> int:
        return min(min(row) for row in self.rows)

    @property
    def is_parallel(self) -> bool:
        """True if every row is constant (k_{i,1} = … = k_{i,n})."""
        return all(len(set(row)) == 1 for row in self.rows)

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def shifted(self, alpha: Sequence[int]) -> "WeightMatrix":
        """Add the row α to every row."""
        if len(alpha) != self.n:
            raise ValidationError(f"weight shift of length {len(alpha)} for n = {self.n}")
        return WeightMatrix(tuple(tuple(k + a for k, a in zip(row, alpha)) for row in self.rows))

    @classmethod
    def uniform(cls, k: int, n: int, c: int = 1) -> "WeightMatrix":
        return cls(tuple(tuple(k for _ in range(n)) for _ in range(c)))


def parse_weight(text: str, n: Optional[int] = None) -> WeightMatrix:
    """Parse ``"3,3"`` or ``"3,3;4,4"`` (rows separated by ``;``)."""
    try:
        rows = tuple(tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse weight {text!r}: {exc}") from exc
    weight = WeightMatrix(rows)
    if n is not None and weight.n != n:
        raise ValidationError(f"weight {text!r} has {weight.n} columns, field degree is {n}")
    return weight


def _points(tau: np.ndarray, n: int) -> Tuple[np.ndarray, bool]:
    """Return a batch of shape (m, n) and whether the input was a single point."""
    arr = np.asarray(tau, dtype=np.complex128)
    single = arr.ndim == 1
    batch = arr[None, :] if single else arr
    if batch.ndim != 2 or batch.shape[1] != n:
        raise ValidationError(f"expected points with {n} coordinates, got shape {arr.shape}")
    return batch, single


def _int_power(z: np.ndarray, k: int) -> np.ndarray:
    base = z if k >= 0 else 1.0 / z
    result = np.ones_like(z)
    for _ in range(abs(k)):
        result = result * base
    return result


def mobius(gamma: SL2Matrix, tau: np.ndarray) -> np.ndarray:
    """Componentwise (σ_j(a)τ_j + σ_j(b)) / (σ_j(c)τ_j + σ_j(d)).

    Example:
        >>> F = make_field("Q")
        >>> mobius(SL2Matrix.S(F), np.array([1j]))
        array([0.+1.j])
    """
    emb = gamma.embedded()
    batch, single = _points(tau, emb.shape[1])
    out = (emb[0] * batch + emb[1]) / (emb[2] * batch + emb[3])
    return out[0] if single else out


def _cocycle_factors(gamma: SL2Matrix, batch: np.ndarray) -> np.ndarray:
    emb = gamma.embedded()
    return emb[2] * batch + emb[3]


def automorphy_j(gamma: SL2Matrix, tau: np.ndarray, k_row: Sequence[int]) -> Union[complex, np.ndarray]:
    """j_k(γ, τ) = Π_j (σ_j(c)τ_j + σ_j(d))^{k_j}."""
    emb = gamma.embedded()
    batch, single = _points(tau, emb.shape[1])
    if len(k_row) != batch.shape[1]:
        raise ValidationError(f"weight row of length {len(k_row)} for n = {batch.shape[1]}")
    factors = _cocycle_factors(gamma, batch)
    value = np.ones(batch.shape[0], dtype=np.complex128)
    for j, k in enumerate(k_row):
        value = value * _int_power(factors[:, j], int(k))
    return complex(value[0]) if single else value


def automorphy_diagonal(gamma: SL2Matrix, tau: np.ndarray, weight: WeightMatrix) -> np.ndarray:
    """Diagonal entries of J_k(γ, τ); shape (c,) or (m, c)."""
    batch, single = _points(tau, weight.n)
    cols = [np.asarray(automorphy_j(gamma, batch, row)) for row in weight.rows]
    diag = np.stack(cols, axis=-1)
    return diag[0] if single else diag


def automorphy_J(gamma: SL2Matrix, tau: np.ndarray, weight: WeightMatrix) -> np.ndarray:
    """J_k(γ, τ) as a c×c diagonal matrix (or a batch of them)."""
    diag = automorphy_diagonal(gamma, tau, weight)
    if diag.ndim == 1:
        return np.diag(diag)
    out = np.zeros(diag.shape + (diag.shape[-1],), dtype=np.complex128)
    idx = np.arange(diag.shape[-1])
    out[:, idx, idx] = diag
    return out


@dataclass(frozen=True, eq=False)
class MatrixFunctionHandle:
    """An r×c matrix-valued function on 𝓗ⁿ with its declared transformation data.

    Attributes:
        func: Batch evaluator mapping points of shape (m, n) to values of shape (m, r, c).
        r: Number of rows.
        c: Number of columns.
        weight: Declared weight (c rows of length n).
        representation: Declared representation of dimension r.
        field: The field F; fixes n and the embeddings.
        name: Label used in logs and reports.
    """

    func: BatchFunction
    r: int
    c: int
    weight: WeightMatrix
    representation: Representation
    field: Field
    name: str = "G"

    def __post_init__(self) -> None:
        if self.weight.c != self.c or self.weight.n != self.field.degree:
            raise ValidationError(
                f"weight of shape {self.weight.c}x{self.weight.n} for a {self.r}x{self.c} function over {self.field.name}"
            )
        if self.representation.dimension != self.r:
            raise ValidationError(f"representation of dimension {self.representation.dimension} for r = {self.r}")

    @property
    def n(self) -> int:
        return self.field.degree

    def __call__(self, tau: np.ndarray) -> np.ndarray:
        batch, single = _points(tau, self.n)
        values = np.asarray(self.func(batch), dtype=np.complex128).reshape(batch.shape[0], self.r, self.c)
        return values[0] if single else values

    @classmethod
    def scalar(
        cls,
        f: BatchFunction,
        field: Field,
        weight: Sequence[int],
        representation: Optional[Representation] = None,
        name: str = "g",
    ) -> "MatrixFunctionHandle":
        """Wrap a scalar batch function f: (m, n) → (m,) as a 1×1 handle."""

        def func(batch: np.ndarray) -> np.ndarray:
            return np.asarray(f(batch), dtype=np.complex128).reshape(-1, 1, 1)

        return cls(func, 1, 1, WeightMatrix((tuple(weight),)), representation or TrivialRepresentation(1), field, name)


def constant_handle(
    value: object,
    field: Field,
    weight: Optional[WeightMatrix] = None,
    representation: Optional[Representation] = None,
    name: str = "const",
) -> MatrixFunctionHandle:
    """The constant function τ ↦ value (weight 0 and trivial ρ unless given)."""
    matrix = np.atleast_2d(np.asarray(value, dtype=np.complex128))
    r, c = matrix.shape
    weight = weight or WeightMatrix.uniform(0, field.degree, c)
    representation = representation or TrivialRepresentation(r)

    def func(batch: np.ndarray) -> np.ndarray:
        return np.broadcast_to(matrix, (batch.shape[0], r, c)).copy()

    return MatrixFunctionHandle(func, r, c, weight, representation, field, name)


def slash(G: MatrixFunctionHandle, gamma: SL2Matrix) -> MatrixFunctionHandle:
    """The handle (G|_k γ)(τ) = G(γτ) J_k(γ, τ)⁻¹."""
    if gamma.field != G.field:
        raise FieldMismatchError(f"slash by a matrix over {gamma.field.name} on a function over {G.field.name}")

    def func(batch: np.ndarray) -> np.ndarray:
        diag = automorphy_diagonal(gamma, batch, G.weight)
        return G(mobius(gamma, batch)) / diag[:, None, :]

    return MatrixFunctionHandle(func, G.r, G.c, G.weight, G.representation, G.field, f"{G.name}|γ")


def transformation_residual(
    G: MatrixFunctionHandle,
    rho: Representation,
    gamma: SL2Matrix,
    samples: np.ndarray,
) -> float:
    """max over samples of ‖G(γτ)J(γ,τ)⁻¹ − ρ(γ)G(τ)‖₂."""
    batch, _ = _points(samples, G.n)
    if batch.shape[0] == 0:
        return 0.0
    left = slash(G, gamma)(batch)
    right = rho.evaluate(gamma)[None, :, :] @ G(batch)
    residual = max(spectral_norm(d) for d in left - right)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("transformation residual of %s at %r: %.3g", G.name, gamma, residual)
    return residual


def scalar_module_action(g: MatrixFunctionHandle, G: MatrixFunctionHandle) -> MatrixFunctionHandle:
    """The product τ ↦ g(τ)G(τ) of a scalar form g (weight α, trivial ρ) with G (weight β).

    The result carries weight rows α + β_i and the representation of G.

    Raises:
        FieldMismatchError: g and G live over different fields.
        ValidationError: g is not 1×1 or does not transform under the trivial representation.
    """
    if g.field != G.field:
        raise FieldMismatchError(f"cannot multiply a form over {g.field.name} with one over {G.field.name}")
    if (g.r, g.c) != (1, 1):
        raise ValidationError(f"scalar factor must be 1x1, got {g.r}x{g.c}")
    if g.representation.kind != "trivial":
        raise ValidationError(f"scalar factor {g.name} must transform under the trivial representation")
    weight = G.weight.shifted(g.weight.rows[0])

    def func(batch: np.ndarray) -> np.ndarray:
        return g(batch)[:, :, :1] * G(batch)

    return MatrixFunctionHandle(func, G.r, G.c, weight, G.representation, G.field, f"{g.name}·{G.name}")


def sample_points(
    n: int,
    count: int,
    seed: int,
    im_range: Tuple[float, float] = SAMPLE_IM_RANGE,
    re_range: Tuple[float, float] = SAMPLE_RE_RANGE,
) -> np.ndarray:
    """Seeded sample points of shape (count, n) with uniform real and imaginary parts."""
    if im_range[0] <= 0:
        raise ValidationError(f"imaginary range must be positive, got {im_range}")
    rng = np.random.default_rng(seed)
    re = rng.uniform(re_range[0], re_range[1], size=(count, n))
    im = rng.uniform(im_range[0], im_range[1], size=(count, n))
    return re + 1j * im
