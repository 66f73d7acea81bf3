"""
Polynomial Fourier expansions (PFEs) of components of matrix-valued functions.

A PFE is a finite sum of terms

    a · τ^t · e^{2πi (v + u)·τ},

where u ∈ ℂⁿ is an exponent shift, t ∈ ℕⁿ a multidegree and v ∈ Λ_H* a dual lattice vector,
stored through its integer dual coordinates.

The expansion pipeline turns a column g = (g_1, …, g_r) with g(τ + v_i) = A_i g(τ) into PFEs:

1. :func:`~hilbert_mvf.linalg.sbtsd` gives A_i = T B_i T⁻¹ and unipotent factors S_i;
2. P(τ) = exp(Σ (M⁻¹τ)_i log S_i) satisfies P(τ + v_t) = P(τ) S_t, so h = P T⁻¹ g is
   twisted periodic with the block eigenvalues;
3. every h_k is expanded by a discrete Fourier transform over the fundamental cell;
4. g = T P⁻¹ h is expanded symbolically in τ and the terms are canonicalized.
"""
from __future__ import annotations

import cmath
import itertools
import logging
import math
import warnings
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from math import comb
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    AliasingWarning,
    LatticeError,
    NotTwistedPeriodicError,
    NotUnitriangularError,
    TranslationLawError,
    ValidationError,
)
from .lattice import DualVector, TranslationLattice, axis_periods, enumerate_dual
from .linalg import SBTSDOptions, SBTSDResult, as_cmatrix, sbtsd, triangular_side, unipotent_log
from .theory_types import (
    CHUNK_SIZE,
    CMatrix,
    DEFAULT_DUAL_BOUND,
    DEFAULT_GRID,
    DEFAULT_SEED,
    DFT_RESOLUTION,
    DROP_TOL,
    DualCoords,
    Multidegree,
    NYQUIST_WARN,
    PIPELINE_COEFFICIENT_TOL,
    SAMPLE_IM_RANGE,
    SAMPLE_RE_RANGE,
    ScalarFunction,
    TOL_GEQ,
    TOL_PERIODIC,
    U_DECIMALS,
    U_SNAP,
)

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# Matrix polynomials and P(τ)
# ---------------------------------------------------------------------------


def _monomials(batch: np.ndarray, degree: Multidegree) -> np.ndarray:
    value = np.ones(batch.shape[0], dtype=np.complex128)
    for j, power in enumerate(degree):
        for _ in range(power):
            value = value * batch[:, j]
    return value


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """Σ_t τ^t C_t with matrix coefficients C_t, stored as a map multidegree → matrix."""

    n: int
    shape: Tuple[int, int]
    coefficients: Mapping[Multidegree, CMatrix] = dc_field(default_factory=dict)

    @classmethod
    def constant(cls, matrix: object, n: int) -> "MatrixPolynomial":
        C = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
        return cls(n, C.shape, {tuple(0 for _ in range(n)): C})

    @classmethod
    def linear(cls, matrices: Sequence[CMatrix]) -> "MatrixPolynomial":
        """Σ_j τ_j C_j."""
        n = len(matrices)
        coeffs = {}
        for j, C in enumerate(matrices):
            degree = tuple(1 if k == j else 0 for k in range(n))
            coeffs[degree] = np.asarray(C, dtype=np.complex128)
        return cls(n, matrices[0].shape, coeffs)

    @property
    def degree(self) -> int:
        return max((sum(t) for t in self.coefficients), default=0)

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        coeffs = {t: C.copy() for t, C in self.coefficients.items()}
        for t, C in other.coefficients.items():
            coeffs[t] = coeffs[t] + C if t in coeffs else C.copy()
        return MatrixPolynomial(self.n, self.shape, coeffs)

    def __mul__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        coeffs: Dict[Multidegree, CMatrix] = {}
        for t1, C1 in self.coefficients.items():
            for t2, C2 in other.coefficients.items():
                t = tuple(a + b for a, b in zip(t1, t2))
                product = C1 @ C2
                coeffs[t] = coeffs[t] + product if t in coeffs else product
        return MatrixPolynomial(self.n, (self.shape[0], other.shape[1]), _prune(coeffs))

    def scale(self, factor: complex) -> "MatrixPolynomial":
        return MatrixPolynomial(self.n, self.shape, {t: factor * C for t, C in self.coefficients.items()})

    def left(self, matrix: CMatrix) -> "MatrixPolynomial":
        """Multiply every coefficient by a constant matrix on the left."""
        return MatrixPolynomial(self.n, (matrix.shape[0], self.shape[1]), {t: matrix @ C for t, C in self.coefficients.items()})

    def __call__(self, tau: np.ndarray) -> np.ndarray:
        arr = np.asarray(tau, dtype=np.complex128)
        batch = arr[None, :] if arr.ndim == 1 else arr
        out = np.zeros((batch.shape[0],) + tuple(self.shape), dtype=np.complex128)
        for t, C in sorted(self.coefficients.items()):
            out += _monomials(batch, t)[:, None, None] * C[None]
        return out[0] if arr.ndim == 1 else out

    @classmethod
    def exp_nilpotent(cls, N: "MatrixPolynomial") -> "MatrixPolynomial":
        """exp N = Σ_{k<r} N^k/k! for N with nilpotent coefficients that commute."""
        r = N.shape[0]
        result = cls.constant(np.eye(r), N.n)
        power = cls.constant(np.eye(r), N.n)
        for k in range(1, r):
            power = (power * N).scale(1.0 / k)
            result = result + power
        return result


def _prune(coeffs: Dict[Multidegree, CMatrix]) -> Dict[Multidegree, CMatrix]:
    return {t: C for t, C in coeffs.items() if np.any(C != 0)}


@dataclass(frozen=True, eq=False)
class PolyMatrixP:
    """P(τ) = exp(Σ_i (M⁻¹τ)_i L_i) for commuting strictly triangular L_i = log S_i."""

    logs: Tuple[CMatrix, ...]
    M: np.ndarray
    M_inv: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "M_inv", np.linalg.inv(self.M))

    @property
    def size(self) -> int:
        return self.logs[0].shape[0]

    def _linear_form(self, sign: float = 1.0) -> MatrixPolynomial:
        n = self.M.shape[0]
        per_variable = [sign * sum(self.M_inv[i, j] * self.logs[i] for i in range(n)) for j in range(n)]
        return MatrixPolynomial.linear(per_variable)

    @cached_property
    def _forward(self) -> MatrixPolynomial:
        return MatrixPolynomial.exp_nilpotent(self._linear_form(1.0))

    @cached_property
    def _backward(self) -> MatrixPolynomial:
        return MatrixPolynomial.exp_nilpotent(self._linear_form(-1.0))

    def polynomial(self) -> MatrixPolynomial:
        """P as a matrix polynomial in τ."""
        return self._forward

    def inverse_polynomial(self) -> MatrixPolynomial:
        return self._backward

    def __call__(self, tau: np.ndarray) -> np.ndarray:
        return self.polynomial()(tau)

    def inverse(self, tau: np.ndarray) -> np.ndarray:
        return self.inverse_polynomial()(tau)


def build_P(S_list: Sequence[object], M: np.ndarray) -> PolyMatrixP:
    """Build P(τ) from unitriangular S_1..S_n and the lattice basis matrix M.

    Raises:
        NotUnitriangularError: some S_i is not unitriangular.
        ValidationError: sizes disagree or the count differs from n.
    """
    mats = [as_cmatrix(S) for S in S_list]
    M = np.asarray(M, dtype=float)
    if len(mats) != M.shape[0]:
        raise ValidationError(f"need {M.shape[0]} unipotent factors, got {len(mats)}")
    if any(S.shape != mats[0].shape for S in mats):
        raise ValidationError("unipotent factors have different sizes")
    for idx, S in enumerate(mats):
        if triangular_side(S) is None:
            raise NotUnitriangularError(f"factor {idx} is not unitriangular")
    return PolyMatrixP(tuple(unipotent_log(S) for S in mats), M)


# ---------------------------------------------------------------------------
# Expansion data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PFETerm:
    """One term a · τ^t · e^{2πi (v + u)·τ}; v is given by its dual coordinates."""

    u: Tuple[complex, ...]
    t: Multidegree
    v: DualCoords
    a: complex


@dataclass(frozen=True, eq=False)
class PolynomialFourierExpansion:
    """A finite polynomial Fourier expansion over a translation lattice."""

    lattice: TranslationLattice
    terms: Tuple[PFETerm, ...] = ()
    canonical: bool = False

    def __call__(self, tau: np.ndarray) -> np.ndarray:
        return evaluate_pfe(self, tau)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def shifts(self) -> List[Tuple[complex, ...]]:
        """The distinct exponent shifts u (the set U) in term order."""
        seen: Dict[Tuple[complex, ...], None] = {}
        for term in self.terms:
            seen.setdefault(term.u, None)
        return list(seen)

    def max_degree(self, u: Optional[Tuple[complex, ...]] = None) -> Multidegree:
        """Coordinatewise maximum of t over the terms (with shift u when given)."""
        degrees = [term.t for term in self.terms if u is None or term.u == u]
        if not degrees:
            return tuple(0 for _ in range(self.lattice.n))
        return tuple(int(x) for x in np.max(np.array(degrees), axis=0))

    def __add__(self, other: "PolynomialFourierExpansion") -> "PolynomialFourierExpansion":
        if other.lattice != self.lattice:
            raise ValidationError("expansions over different lattices")
        return PolynomialFourierExpansion(self.lattice, self.terms + other.terms, False)


def evaluate_pfe(E: PolynomialFourierExpansion, tau: np.ndarray) -> Union[complex, np.ndarray]:
    """Σ a τ^t e^{2πi (v + u)·τ} at a point (complex) or a batch (array of shape (m,))."""
    arr = np.asarray(tau, dtype=np.complex128)
    batch = arr[None, :] if arr.ndim == 1 else arr
    total = np.zeros(batch.shape[0], dtype=np.complex128)
    D = E.lattice.D
    for term in E.terms:
        freq = D @ np.asarray(term.v, dtype=float) + np.asarray(term.u, dtype=np.complex128)
        total += term.a * _monomials(batch, term.t) * np.exp(TWO_PI_I * (batch @ freq))
    return complex(total[0]) if arr.ndim == 1 else total


def expansion_handle(E: PolynomialFourierExpansion) -> ScalarFunction:
    """Scalar batch evaluator of an expansion."""

    def handle(batch: np.ndarray) -> np.ndarray:
        return np.atleast_1d(evaluate_pfe(E, np.atleast_2d(batch)))

    return handle


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------


def _canonical_shift(L: TranslationLattice, u: Sequence[complex]) -> Tuple[Tuple[float, ...], Tuple[int, ...]]:
    """Rounded lattice coordinates w of the reduced shift and the integer offset k."""
    w = np.asarray(u, dtype=np.complex128) @ L.M
    k = np.floor(w.real + U_SNAP).astype(int)
    reduced_re = [max(0.0, round(float(x), U_DECIMALS)) + 0.0 for x in (w.real - k)]
    reduced_im = [round(float(x), U_DECIMALS) + 0.0 for x in w.imag]
    return tuple(reduced_re + reduced_im), tuple(int(x) for x in k)


def canonicalize(E: PolynomialFourierExpansion, drop_tol: float = DROP_TOL) -> PolynomialFourierExpansion:
    """Reduce shifts modulo Λ_H*, merge equal terms, drop tiny coefficients and sort.

    The lattice coordinates u·M are moved into [0, 1) and rounded; the integer part moves into
    the dual coordinates of v, so the total frequency v + u is unchanged.
    """
    L = E.lattice
    n = L.n
    real_parts: Dict[tuple, List[float]] = defaultdict(list)
    imag_parts: Dict[tuple, List[float]] = defaultdict(list)
    for term in E.terms:
        w_key, k = _canonical_shift(L, term.u)
        v = tuple(int(m) + kk for m, kk in zip(term.v, k))
        key = (w_key, tuple(term.t), v)
        real_parts[key].append(float(np.real(term.a)))
        imag_parts[key].append(float(np.imag(term.a)))
    terms = []
    for key in sorted(real_parts):
        w_key, t, v = key
        a = complex(math.fsum(real_parts[key]), math.fsum(imag_parts[key]))
        if abs(a) < drop_tol:
            continue
        w = np.array(w_key[:n]) + 1j * np.array(w_key[n:])
        u = tuple(complex(x) for x in w @ L.M_inv)
        terms.append(PFETerm(u, t, v, a))
    return PolynomialFourierExpansion(L, tuple(terms), True)


def holomorphic_at_infinity(E: PolynomialFourierExpansion, tol: float = TOL_GEQ) -> Tuple[bool, List[PFETerm]]:
    """Check v_k + Re(u_k) ≥ −tol in every coordinate for every nonzero term.

    Returns:
        tuple: (holomorphic, violating terms).
    """
    violations = []
    for term in E.terms:
        if term.a == 0:
            continue
        total = E.lattice.D @ np.asarray(term.v, dtype=float) + np.real(np.asarray(term.u, dtype=np.complex128))
        if np.any(total < -tol):
            violations.append(term)
    return not violations, violations


# ---------------------------------------------------------------------------
# Weak derivatives
# ---------------------------------------------------------------------------


def _shift_phase(phase: complex) -> complex:
    """e^{2πi·phase}, exactly 1 when the phase is an integer to 1e-9."""
    if abs(phase.imag) <= 1e-12 and abs(phase.real - round(phase.real)) <= 1e-9:
        return 1.0 + 0.0j
    return cmath.exp(TWO_PI_I * phase)


def _shifted_difference(
    g: Union[PolynomialFourierExpansion, ScalarFunction],
    shift: np.ndarray,
    u: Sequence[complex],
) -> Union[PolynomialFourierExpansion, ScalarFunction]:
    u_arr = np.asarray(u, dtype=np.complex128)
    lam = cmath.exp(TWO_PI_I * complex(u_arr @ shift))
    if not isinstance(g, PolynomialFourierExpansion):

        def derivative(batch: np.ndarray) -> np.ndarray:
            batch = np.atleast_2d(np.asarray(batch, dtype=np.complex128))
            return np.asarray(g(batch + shift[None, :])) / lam - np.asarray(g(batch))

        return derivative

    L = g.lattice
    terms: List[PFETerm] = []
    for term in g.terms:
        total = L.D @ np.asarray(term.v, dtype=float) + np.asarray(term.u, dtype=np.complex128)
        factor = _shift_phase(complex((total - u_arr) @ shift))
        ranges = [range(tj + 1) for tj in term.t]
        for s in itertools.product(*ranges):
            binom = 1.0 + 0.0j
            for j, (tj, sj) in enumerate(zip(term.t, s)):
                binom *= comb(tj, sj) * shift[j] ** (tj - sj)
            coef = term.a * factor * binom
            if tuple(s) == tuple(term.t):
                coef -= term.a
            if coef != 0:
                terms.append(PFETerm(term.u, tuple(s), term.v, coef))
    return canonicalize(PolynomialFourierExpansion(L, tuple(terms)))


def weak_derivative(
    g: Union[PolynomialFourierExpansion, ScalarFunction],
    direction: int,
    u: Sequence[complex],
    lattice: Optional[TranslationLattice] = None,
) -> Union[PolynomialFourierExpansion, ScalarFunction]:
    """d_{i,u} g(τ) = g(τ + v_i)/e^{2πi u·v_i} − g(τ).

    Expansions are differentiated term by term through the binomial expansion of (τ + v_i)^t;
    function handles yield a new handle. Handles need ``lattice``.
    """
    L = g.lattice if isinstance(g, PolynomialFourierExpansion) else lattice
    if L is None:
        raise ValidationError("weak_derivative of a function handle needs a lattice")
    if not 0 <= direction < L.n:
        raise ValidationError(f"direction {direction} out of range for n = {L.n}")
    return _shifted_difference(g, L.M[:, direction], u)


def axis_weak_derivative(
    g: Union[PolynomialFourierExpansion, ScalarFunction],
    axis: int,
    u: Sequence[complex],
    lattice: Optional[TranslationLattice] = None,
) -> Union[PolynomialFourierExpansion, ScalarFunction]:
    """d'_{i,u} g(τ) = g(τ + h_i e_i)/e^{2πi u·h_i e_i} − g(τ), using the axis period h_i.

    Raises:
        LatticeError: the lattice has no period along the axis (every axis when n ≥ 2).
    """
    L = g.lattice if isinstance(g, PolynomialFourierExpansion) else lattice
    if L is None:
        raise ValidationError("axis_weak_derivative of a function handle needs a lattice")
    period = axis_periods(L)[axis]
    if period is None:
        raise LatticeError(f"no multiple of e_{axis + 1} lies in {L!r}")
    shift = np.zeros(L.n)
    shift[axis] = period
    return _shifted_difference(g, shift, u)


# ---------------------------------------------------------------------------
# Twisted Fourier extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtractionConfig:
    """Quadrature parameters for Fourier extraction.

    Attributes
    ----------
    y0 : tuple of float, optional
        Height of the sampling contour (default (1, …, 1)).
    grid : int
        Samples per axis; a power of two ≥ 16.
    dual_bound : float
        Box bound max_j |v_j| on the extracted dual vectors.
    tol_periodic : float
        Relative tolerance of the periodicity probe.
    resolution : float
        Raw DFT magnitudes below ``resolution · max|DFT|`` are reported as 0.
    probe_count : int
        Random probe points for the periodicity check.
    seed : int
        Seed of the probe points.
    workers : int
        Threads used to evaluate the sampling grid.
    """

    y0: Optional[Tuple[float, ...]] = None
    grid: int = DEFAULT_GRID
    dual_bound: float = DEFAULT_DUAL_BOUND
    tol_periodic: float = TOL_PERIODIC
    resolution: float = DFT_RESOLUTION
    probe_count: int = 5
    seed: int = DEFAULT_SEED
    workers: int = 1

    def __post_init__(self) -> None:
        if self.grid < 16 or self.grid & (self.grid - 1):
            raise ValidationError(f"grid must be a power of two >= 16, got {self.grid}")
        if self.dual_bound < 0:
            raise ValidationError(f"dual bound must be >= 0, got {self.dual_bound}")
        if self.y0 is not None and any(y <= 0 for y in self.y0):
            raise ValidationError(f"contour height must be positive, got {self.y0}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")

    def height(self, n: int) -> np.ndarray:
        if self.y0 is None:
            return np.ones(n)
        if len(self.y0) != n:
            raise ValidationError(f"contour height of length {len(self.y0)} for n = {n}")
        return np.asarray(self.y0, dtype=float)


@dataclass(frozen=True, eq=False)
class FourierCoefficients:
    """Coefficients a_v of f(τ) = Σ_v a_v e^{2πi (v + u)·τ} over the enumerated dual vectors."""

    lattice: TranslationLattice
    u: Tuple[complex, ...]
    coefficients: Mapping[DualCoords, complex]
    noise_floor: float
    nyquist_magnitude: float

    def __getitem__(self, v: Union[DualVector, Sequence[int]]) -> complex:
        coords = v.coords if isinstance(v, DualVector) else tuple(int(m) for m in v)
        return self.coefficients.get(coords, 0j)

    def items(self) -> Iterable[Tuple[DualCoords, complex]]:
        return self.coefficients.items()

    def nonzero(self, tol: float = 0.0) -> Dict[DualCoords, complex]:
        return {v: a for v, a in self.coefficients.items() if abs(a) > tol}

    def to_expansion(self, t: Optional[Multidegree] = None) -> PolynomialFourierExpansion:
        degree = t if t is not None else tuple(0 for _ in range(self.lattice.n))
        terms = tuple(PFETerm(self.u, degree, v, a) for v, a in self.coefficients.items() if a != 0)
        return PolynomialFourierExpansion(self.lattice, terms)


def sampling_grid(L: TranslationLattice, config: ExtractionConfig) -> np.ndarray:
    """Points M·(j/N) + i·y0 for j ∈ {0..N−1}ⁿ in C order, shape (Nⁿ, n)."""
    N = config.grid
    axes = np.meshgrid(*[np.arange(N) / N for _ in range(L.n)], indexing="ij")
    s = np.stack([a.reshape(-1) for a in axes], axis=1)
    return s @ L.M.T + 1j * config.height(L.n)[None, :]


def evaluate_in_chunks(f: Callable[[np.ndarray], np.ndarray], points: np.ndarray, workers: int = 1) -> np.ndarray:
    """Evaluate a batch function over fixed-size chunks, concatenated in chunk order."""
    chunks = [points[i : i + CHUNK_SIZE] for i in range(0, points.shape[0], CHUNK_SIZE)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda chunk: np.asarray(f(chunk)), chunks))
    else:
        parts = [np.asarray(f(chunk)) for chunk in chunks]
    return np.concatenate(parts, axis=0)


def probe_points(n: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    re = rng.uniform(*SAMPLE_RE_RANGE, size=(count, n))
    im = rng.uniform(*SAMPLE_IM_RANGE, size=(count, n))
    return re + 1j * im


def _coefficients_from_samples(
    samples: np.ndarray,
    points: np.ndarray,
    L: TranslationLattice,
    u: np.ndarray,
    config: ExtractionConfig,
) -> FourierCoefficients:
    N, n = config.grid, L.n
    untwisted = samples * np.exp(-TWO_PI_I * (points @ u))
    dft = np.fft.fftn(untwisted.reshape((N,) * n)) / float(N**n)
    magnitude = np.abs(dft)
    peak = float(magnitude.max()) if magnitude.size else 0.0
    floor = config.resolution * peak
    shell = np.zeros_like(magnitude, dtype=bool)
    for axis in range(n):
        index = [slice(None)] * n
        index[axis] = N // 2
        shell[tuple(index)] = True
    nyquist = float(magnitude[shell].max())
    if nyquist > NYQUIST_WARN:
        msg = f"Nyquist-shell magnitude {nyquist:.3g} exceeds {NYQUIST_WARN:g}; grid N={N} may alias"
        logger.warning(msg)
        warnings.warn(msg, AliasingWarning, stacklevel=3)
    height = config.height(n)
    coefficients: Dict[DualCoords, complex] = {}
    duals = enumerate_dual(L, config.dual_bound)
    if duals and max(abs(m) for d in duals for m in d.coords) >= N // 2:
        warnings.warn(f"dual bound {config.dual_bound} reaches the Nyquist index of grid N={N}", AliasingWarning, stacklevel=3)
    for dual in duals:
        raw = dft[tuple(m % N for m in dual.coords)]
        if abs(raw) < floor or raw == 0:
            coefficients[dual.coords] = 0j
            continue
        coefficients[dual.coords] = complex(raw * math.exp(2 * math.pi * float(dual.real @ height)))
    return FourierCoefficients(L, tuple(complex(x) for x in u), coefficients, floor, nyquist)


def twisted_fourier_extract(
    f: ScalarFunction,
    L: TranslationLattice,
    mu: Sequence[complex],
    config: ExtractionConfig = ExtractionConfig(),
) -> FourierCoefficients:
    """Fourier coefficients of f with f(τ + v_i) = e^{2πiμ_i} f(τ).

    The function is untwisted by e^{−2πi u·τ} with u = μM⁻¹, sampled over the fundamental cell
    at height y0, and transformed with an n-dimensional FFT. Coefficients are corrected by
    e^{2π v·y0}.

    Raises:
        NotTwistedPeriodicError: the periodicity probe fails.
    """
    mu_arr = np.asarray(mu, dtype=np.complex128).reshape(-1)
    if mu_arr.shape[0] != L.n:
        raise ValidationError(f"exponent of length {mu_arr.shape[0]} for n = {L.n}")
    u = mu_arr @ L.M_inv
    probes = probe_points(L.n, config.probe_count, config.seed)
    base = np.asarray(f(probes), dtype=np.complex128)
    for i in range(L.n):
        shifted = np.asarray(f(probes + L.M[:, i][None, :]), dtype=np.complex128)
        expected = np.exp(TWO_PI_I * mu_arr[i]) * base
        scale = np.maximum(1.0, np.maximum(np.abs(base), np.abs(shifted)))
        worst = float(np.max(np.abs(shifted - expected) / scale))
        if worst > config.tol_periodic:
            raise NotTwistedPeriodicError(
                f"not twisted-periodic with given mu along v_{i + 1}: residual {worst:.3g} exceeds {config.tol_periodic:g}"
            )
    points = sampling_grid(L, config)
    samples = evaluate_in_chunks(f, points, config.workers).reshape(-1)
    return _coefficients_from_samples(samples, points, L, u, config)


# ---------------------------------------------------------------------------
# Expansion pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LogarithmicBasis:
    """SBTSD data, P(τ) and exponent shifts for a column transforming under A_1..A_n.

    ``h(τ) = P(τ) T⁻¹ g(τ)`` satisfies ``h_k(τ + v_i) = λ_{i,k} h_k(τ)``.
    """

    lattice: TranslationLattice
    decomposition: SBTSDResult
    P: PolyMatrixP
    component_block: Tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.component_block)

    def exponent(self, k: int) -> np.ndarray:
        """μ of component k (length n)."""
        return self.decomposition.exponents[:, self.component_block[k]]

    def shift(self, k: int) -> np.ndarray:
        """u = μM⁻¹ of component k."""
        return self.exponent(k) @ self.lattice.M_inv

    def eigenvalues(self, k: int) -> np.ndarray:
        return self.decomposition.eigenvalues[:, self.component_block[k]]

    def h(self, g_values: np.ndarray, batch: np.ndarray) -> np.ndarray:
        """h at a batch of points from g values of shape (m, r); returns shape (m, r)."""
        P = self.P(batch)
        l = g_values @ self.decomposition.T_inv.T
        return np.einsum("mab,mb->ma", P, l)


def prepare_pipeline(
    translations: Sequence[object],
    L: TranslationLattice,
    options: SBTSDOptions = SBTSDOptions(),
) -> LogarithmicBasis:
    """Decompose the translation matrices and build P."""
    mats = [as_cmatrix(A) for A in translations]
    if len(mats) != L.n:
        raise ValidationError(f"need {L.n} translation matrices, got {len(mats)}")
    decomposition = sbtsd(mats, options)
    P = build_P(decomposition.S, L.M)
    blocks = tuple(j for j, m in enumerate(decomposition.block_sizes) for _ in range(m))
    return LogarithmicBasis(L, decomposition, P, blocks)


def check_translation_law(
    g: Callable[[np.ndarray], np.ndarray],
    translations: Sequence[CMatrix],
    L: TranslationLattice,
    config: ExtractionConfig,
) -> float:
    """Largest relative residual of g(τ + v_i) = A_i g(τ) at the probe points."""
    probes = probe_points(L.n, config.probe_count, config.seed)
    base = g(probes)
    worst = 0.0
    for i, A in enumerate(translations):
        shifted = g(probes + L.M[:, i][None, :])
        expected = base @ np.asarray(A).T
        scale = max(1.0, float(np.abs(base).max()), float(np.abs(shifted).max()))
        worst = max(worst, float(np.abs(shifted - expected).max()) / scale)
    return worst


def expansion_pipeline(
    components: Sequence[ScalarFunction],
    translations: Sequence[object],
    L: TranslationLattice,
    config: ExtractionConfig = ExtractionConfig(),
    coefficient_tol: float = PIPELINE_COEFFICIENT_TOL,
    options: SBTSDOptions = SBTSDOptions(),
) -> List[PolynomialFourierExpansion]:
    """Polynomial Fourier expansions of g_1..g_r with g(τ + v_i) = A_i g(τ).

    Args:
        components: Scalar batch evaluators g_1..g_r.
        translations: A_1..A_n.
        L: The translation lattice.
        config: Extraction quadrature.
        coefficient_tol: Terms below this magnitude are dropped as extraction noise.
        options: SBTSD tolerances.

    Returns:
        list: one canonical expansion per component.

    Raises:
        TranslationLawError: the column does not satisfy the translation law.
    """
    mats = [as_cmatrix(A) for A in translations]
    r = len(components)
    if any(A.shape != (r, r) for A in mats):
        raise ValidationError(f"translation matrices must be {r}x{r}")

    def column(batch: np.ndarray) -> np.ndarray:
        return np.stack([np.asarray(gk(batch), dtype=np.complex128).reshape(-1) for gk in components], axis=1)

    residual = check_translation_law(column, mats, L, config)
    if residual > config.tol_periodic:
        raise TranslationLawError(f"translation law residual {residual:.3g} exceeds {config.tol_periodic:g}")

    basis = prepare_pipeline(mats, L, options)
    logger.info("expansion pipeline: r=%d, blocks=%s", r, basis.decomposition.block_sizes)
    points = sampling_grid(L, config)
    g_values = evaluate_in_chunks(column, points, config.workers)
    h_values = basis.h(g_values, points)
    extracted = [
        _coefficients_from_samples(h_values[:, k], points, L, basis.shift(k), config) for k in range(r)
    ]

    inverse = basis.P.inverse_polynomial().left(basis.decomposition.T)
    return assemble_expansions(L, inverse, extracted, coefficient_tol)


def assemble_expansions(
    L: TranslationLattice,
    transform: MatrixPolynomial,
    components: Sequence[FourierCoefficients],
    coefficient_tol: float = PIPELINE_COEFFICIENT_TOL,
) -> List[PolynomialFourierExpansion]:
    """Canonical expansions of g = Q(τ)h from a matrix polynomial Q and expansions of h_1..h_r.

    Products below ``coefficient_tol`` in magnitude are dropped.
    """
    r = len(components)
    expansions = []
    for a in range(r):
        terms = []
        for t, C in sorted(transform.coefficients.items()):
            for k in range(r):
                weight = C[a, k]
                if weight == 0:
                    continue
                u = components[k].u
                for v, coef in components[k].items():
                    value = weight * coef
                    if abs(value) >= coefficient_tol:
                        terms.append(PFETerm(u, t, v, complex(value)))
        expansions.append(canonicalize(PolynomialFourierExpansion(L, tuple(terms))))
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("component %d: %d terms", a, len(expansions[-1]))
    return expansions
