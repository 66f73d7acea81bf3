"""
Exact arithmetic in F = ℚ or a real quadratic field ℚ(√d) and in its ring of integers O_F.

Elements are stored as rational coordinates (a, b) meaning a + bω, where ω = √d for
d ≡ 2, 3 (mod 4) and ω = (1 + √d)/2 for d ≡ 1 (mod 4). Over ℚ the second coordinate is
always folded into the first. Embeddings σ_j(ω) are kept as mpmath reals at the working
precision and only converted to doubles at the numerical boundary.

Only the norm-Euclidean fields d ∈ {2, 3, 5, 13} are supported, so Euclidean division by
norm rounding always terminates and every coprime row completes to SL₂(O_F).

Besides the scalar API there are vectorized helpers (``batch_*``) that work on integer
coordinate arrays; coset enumeration runs them over hundreds of thousands of rows at once.
"""
from __future__ import annotations

import logging
import os
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

import mpmath
import numpy as np
from sympy import factorint

from .errors import (
    ConfigError,
    DeterminantError,
    FieldArithmeticError,
    FieldMismatchError,
    UnsupportedFieldError,
    ValidationError,
)
from .theory_types import (
    DEFAULT_PRECISION,
    EUCLIDEAN_DISCRIMINANTS,
    MIN_PRECISION,
    PRECISION_ENV,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

_FUNDAMENTAL_UNITS = {2: (1, 1), 3: (2, 1), 5: (0, 1), 13: (1, 1)}
_SPEC_RE = re.compile(r"^\s*Q\s*\(\s*sqrt\s*:\s*(\d+)\s*\)\s*$", re.IGNORECASE)


def working_precision() -> int:
    """Return the working precision in decimal digits (``HMVF_PRECISION`` or the default)."""
    raw = os.environ.get(PRECISION_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_PRECISION
    try:
        digits = int(raw)
    except ValueError:
        raise ConfigError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None
    if digits < MIN_PRECISION:
        raise ConfigError(f"{PRECISION_ENV}={digits} is below the minimum of {MIN_PRECISION} digits")
    return digits


@dataclass(frozen=True, eq=False)
class Field:
    """F = ℚ (``d is None``) or ℚ(√d) together with the data of its integral basis {1, ω}.

    Attributes:
        d: Squarefree discriminant parameter, or None for ℚ.
        precision: Decimal digits carried by the embedding values.
        degree: n = [F:ℚ] ∈ {1, 2}.
        omega_trace: t with ω² = t·ω + omega_const.
        omega_const: constant term of that relation.
        sigma: σ_j(ω) as mpmath reals (for ℚ, the nominal value 1).
    """

    d: Optional[int]
    precision: int
    degree: int = dc_field(init=False)
    omega_trace: int = dc_field(init=False)
    omega_const: int = dc_field(init=False)
    sigma: Tuple[mpmath.mpf, ...] = dc_field(init=False, repr=False)
    sigma_float: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self) -> None:
        with mpmath.workdps(self.precision):
            if self.d is None:
                degree, t, c0 = 1, 0, 0
                sigma: Tuple[mpmath.mpf, ...] = (mpmath.mpf(1),)
            elif self.d % 4 == 1:
                degree, t, c0 = 2, 1, (self.d - 1) // 4
                root = mpmath.sqrt(self.d)
                sigma = ((1 + root) / 2, (1 - root) / 2)
            else:
                degree, t, c0 = 2, 0, self.d
                root = mpmath.sqrt(self.d)
                sigma = (root, -root)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "omega_trace", t)
        object.__setattr__(self, "omega_const", c0)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "sigma_float", np.array([float(s) for s in sigma]))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and self.d == other.d

    def __hash__(self) -> int:
        return hash(("Field", self.d))

    @property
    def is_rational(self) -> bool:
        return self.d is None

    @property
    def spec_string(self) -> str:
        """CLI/config spelling: ``"Q"`` or ``"Q(sqrt:d)"``."""
        return "Q" if self.d is None else f"Q(sqrt:{self.d})"

    @property
    def name(self) -> str:
        return "ℚ" if self.d is None else f"ℚ(√{self.d})"

    def element(self, a: Rational = 0, b: Rational = 0) -> "FieldElement":
        """Return a + bω."""
        return FieldElement(self, Fraction(a), Fraction(b))

    def from_int(self, a: Rational) -> "FieldElement":
        return self.element(a, 0)

    @property
    def zero(self) -> "FieldElement":
        return self.element(0, 0)

    @property
    def one(self) -> "FieldElement":
        return self.element(1, 0)

    @property
    def omega(self) -> "FieldElement":
        """The integral-basis generator ω (equal to 1 over ℚ)."""
        return self.element(0, 1) if self.degree == 2 else self.one

    @property
    def integral_basis(self) -> Tuple["FieldElement", ...]:
        return (self.one, self.omega) if self.degree == 2 else (self.one,)

    @property
    def fundamental_unit(self) -> Optional["FieldElement"]:
        """Precomputed fundamental unit (None over ℚ, whose unit group is ±1)."""
        if self.d is None:
            return None
        return self.element(*_FUNDAMENTAL_UNITS[self.d])

    def integers_in_box(self, bound: float) -> Tuple[np.ndarray, np.ndarray]:
        """Coordinates (a, b) of all x ∈ O_F with max_j |σ_j(x)| ≤ bound, sorted lexicographically."""
        if bound < 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        slack = 1e-12 * max(1.0, bound)
        if self.degree == 1:
            top = int(np.floor(bound + slack))
            a = np.arange(-top, top + 1, dtype=np.int64)
            return a, np.zeros_like(a)
        s1, s2 = self.sigma_float
        b_max = int(np.floor(2.0 * bound / abs(s1 - s2) + slack)) + 1
        a_parts, b_parts = [], []
        for b in range(-b_max, b_max + 1):
            lo = max(-bound - b * s1, -bound - b * s2)
            hi = min(bound - b * s1, bound - b * s2)
            if hi < lo - slack:
                continue
            a = np.arange(int(np.ceil(lo - slack)), int(np.floor(hi + slack)) + 1, dtype=np.int64)
            a_parts.append(a)
            b_parts.append(np.full_like(a, b))
        if not a_parts:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        a_all = np.concatenate(a_parts)
        b_all = np.concatenate(b_parts)
        emb = batch_embed(self, a_all, b_all)
        keep = np.all(np.abs(emb) <= bound + slack, axis=1)
        a_all, b_all = a_all[keep], b_all[keep]
        order = np.lexsort((b_all, a_all))
        return a_all[order], b_all[order]

    def __repr__(self) -> str:
        return f"Field({self.name})"


@dataclass(frozen=True, eq=False)
class FieldElement:
    """Immutable element a + bω of F with exact rational coordinates."""

    field: Field
    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        a, b = Fraction(self.a), Fraction(self.b)
        if self.field.degree == 1:
            a, b = a + b, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    # -- coercion -------------------------------------------------------
    def _coerce(self, other: object) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine elements of {self.field.name} and {other.field.name}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FieldElement(self.field, Fraction(other), Fraction(0))
        raise TypeError(f"unsupported operand type for field arithmetic: {type(other).__name__}")

    # -- ring structure -------------------------------------------------
    def __add__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        return FieldElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, -self.a, -self.b)

    def __sub__(self, other: object) -> "FieldElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> "FieldElement":
        return self._coerce(other) - self

    def __mul__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        a, b = _mul_coords(self.field, self.a, self.b, o.a, o.b)
        return FieldElement(self.field, a, b)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero in field")
        n = o._self_conj_norm()
        num = self * o.conjugate()
        return FieldElement(self.field, num.a / n, num.b / n)

    def __rtruediv__(self, other: object) -> "FieldElement":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "FieldElement":
        if not isinstance(exponent, int):
            raise TypeError(f"field powers need an integer exponent, got {type(exponent).__name__}")
        base = self if exponent >= 0 else self.field.one / self
        result = self.field.one
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __eq__(self, other: object) -> bool:
        try:
            o = self._coerce(other)
        except (TypeError, FieldMismatchError):
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self) -> int:
        return hash((self.field.d, self.a, self.b))

    # -- invariants -----------------------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def conjugate(self) -> "FieldElement":
        """Galois conjugate (identity over ℚ)."""
        if self.field.degree == 1:
            return self
        return FieldElement(self.field, self.a + self.b * self.field.omega_trace, -self.b)

    def _self_conj_norm(self) -> Fraction:
        a, _ = _mul_coords(self.field, self.a, self.b, *_conj_coords(self.field, self.a, self.b))
        return a

    def norm(self) -> Fraction:
        """Field norm σ_1(x)…σ_n(x) as an exact rational."""
        if self.field.degree == 1:
            return self.a
        return self._self_conj_norm()

    def trace(self) -> Fraction:
        if self.field.degree == 1:
            return self.a
        return 2 * self.a + self.b * self.field.omega_trace

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    @property
    def coords(self) -> Tuple[int, int]:
        """Integer coordinates (a, b); only valid for elements of O_F."""
        if not self.is_integral():
            raise ValidationError(f"{self!r} is not in O_F")
        return int(self.a), int(self.b)

    def embed(self) -> Tuple[mpmath.mpf, ...]:
        """ι_F(x) = (σ_1(x), …, σ_n(x)) at the field's working precision."""
        with mpmath.workdps(self.field.precision):
            a = mpmath.mpf(self.a.numerator) / self.a.denominator
            b = mpmath.mpf(self.b.numerator) / self.b.denominator
            if self.field.degree == 1:
                return (a,)
            return tuple(a + b * s for s in self.field.sigma)

    def embed_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.embed()])

    def __repr__(self) -> str:
        if self.field.degree == 1 or self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}ω"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}ω"


def _mul_coords(F: Field, a1: Fraction, b1: Fraction, a2: Fraction, b2: Fraction) -> Tuple[Fraction, Fraction]:
    bb = b1 * b2
    return a1 * a2 + F.omega_const * bb, a1 * b2 + a2 * b1 + F.omega_trace * bb


def _conj_coords(F: Field, a: Fraction, b: Fraction) -> Tuple[Fraction, Fraction]:
    if F.degree == 1:
        return a, b
    return a + b * F.omega_trace, -b


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _cached_field(d: Optional[int], precision: int) -> Field:
    F = Field(d, precision)
    logger.info("Created field %s at %d digits", F.name, precision)
    return F


def make_field(spec: Union[str, int, None]) -> Field:
    """Build ℚ (``"rational"``, ``"Q"`` or None) or ℚ(√d) for a supported squarefree d.

    Args:
        spec: The marker for ℚ, an integer d, or a CLI spelling ``"Q(sqrt:d)"``.

    Returns:
        Field: The field at the current working precision.

    Raises:
        ValidationError: d is not a squarefree integer ≥ 2.
        UnsupportedFieldError: d is squarefree but outside {2, 3, 5, 13}.
    """
    precision = working_precision()
    if spec is None or (isinstance(spec, str) and spec.strip().lower() in {"rational", "q"}):
        return _cached_field(None, precision)
    if isinstance(spec, str):
        return make_field(_parse_discriminant(spec))
    if isinstance(spec, bool) or not isinstance(spec, int):
        raise TypeError(f"field spec must be 'rational', a string or an int, got {type(spec).__name__}")
    if spec < 2:
        raise ValidationError(f"d must be a squarefree integer >= 2, got {spec}")
    if any(e > 1 for e in factorint(spec).values()):
        raise ValidationError(f"d = {spec} is not squarefree")
    if spec not in EUCLIDEAN_DISCRIMINANTS:
        raise UnsupportedFieldError(
            f"unsupported field Q(sqrt {spec}): only d in {EUCLIDEAN_DISCRIMINANTS} are norm-Euclidean here"
        )
    return _cached_field(spec, precision)


def _parse_discriminant(text: str) -> int:
    match = _SPEC_RE.match(text)
    if match is None:
        raise ValidationError(f"cannot parse field spec {text!r}; expected 'Q' or 'Q(sqrt:d)'")
    return int(match.group(1))


def parse_field_spec(text: str) -> Field:
    """Parse the CLI/config field spelling ``"Q"`` or ``"Q(sqrt:5)"``."""
    return make_field(text)


def embed(F: Field, x: FieldElement) -> Tuple[mpmath.mpf, ...]:
    """ι_F(x) = (σ_1(x), …, σ_n(x))."""
    if x.field != F:
        raise FieldMismatchError(f"element of {x.field.name} embedded into {F.name}")
    return x.embed()


# ---------------------------------------------------------------------------
# Euclidean algorithm
# ---------------------------------------------------------------------------


def _round_quotient(x: FieldElement, y: FieldElement) -> FieldElement:
    q = x / y
    return x.field.element(round(q.a), round(q.b))


def _euclid_step(x: FieldElement, y: FieldElement) -> Tuple[FieldElement, FieldElement]:
    """Return (q, r) with x = q·y + r and |N(r)| < |N(y)|."""
    q = _round_quotient(x, y)
    r = x - q * y
    target = abs(y.norm())
    if abs(r.norm()) < target:
        return q, r
    # nearest-integer rounding reduces the norm for every supported d; neighbours are a fallback
    F = x.field
    best = None
    for da in (-1, 0, 1):
        for db in (-1, 0, 1) if F.degree == 2 else (0,):
            cand = q + F.element(da, db)
            rem = x - cand * y
            if abs(rem.norm()) < target and (best is None or abs(rem.norm()) < abs(best[1].norm())):
                best = (cand, rem)
    if best is None:
        raise FieldArithmeticError(f"division of {x!r} by {y!r} does not reduce the norm in {F.name}")
    return best


def euclid_gcd(F: Field, a: FieldElement, b: FieldElement) -> Tuple[FieldElement, FieldElement, FieldElement]:
    """Extended Euclid in O_F: return (g, x, y) with x·a + y·b = g and (g) = (a, b).

    Raises:
        ValidationError: both inputs are zero or not integral.
        FieldArithmeticError: a division step failed to reduce the norm.
    """
    a, b = F.one * a, F.one * b
    if a.is_zero() and b.is_zero():
        raise ValidationError("euclid_gcd needs (a, b) != (0, 0)")
    if not (a.is_integral() and b.is_integral()):
        raise ValidationError("euclid_gcd works in O_F; got a non-integral input")
    r0, r1 = a, b
    s0, s1 = F.one, F.zero
    t0, t1 = F.zero, F.one
    while not r1.is_zero():
        q, r2 = _euclid_step(r0, r1)
        r0, r1 = r1, r2
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


def complete_row(F: Field, c: FieldElement, d: FieldElement) -> "SL2Matrix":
    """Complete a coprime bottom row (c, d) to an element of SL₂(O_F).

    The top row is normalized so that the lattice coordinates of a/c lie in [0, 1) when c ≠ 0,
    and so that b = 0 when c = 0.
    """
    g, x, y = euclid_gcd(F, c, d)
    if not g.is_unit():
        raise ValidationError(f"row ({c!r}, {d!r}) does not generate the unit ideal")
    ginv = F.one / g
    a, b = y * ginv, -(x * ginv)
    if c.is_zero():
        a, b = F.one / d, F.zero
    else:
        ratio = a / c
        k = F.element(_floor(ratio.a), _floor(ratio.b))
        a, b = a - k * c, b - k * d
    return SL2Matrix(a, b, c, d)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


# ---------------------------------------------------------------------------
# SL₂(O_F)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SL2Matrix:
    """γ = (a b; c d) ∈ SL₂(O_F), acting on 𝓗ⁿ through the embeddings."""

    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: FieldElement

    def __post_init__(self) -> None:
        F = self.a.field
        for entry in (self.b, self.c, self.d):
            if entry.field != F:
                raise FieldMismatchError("SL2Matrix entries from different fields")
        if not all(e.is_integral() for e in (self.a, self.b, self.c, self.d)):
            raise ValidationError("SL2Matrix entries must lie in O_F")
        det = self.a * self.d - self.b * self.c
        if det != 1:
            raise DeterminantError(f"determinant {det!r} != 1")

    @property
    def field(self) -> Field:
        return self.a.field

    @property
    def bottom_row(self) -> Tuple[FieldElement, FieldElement]:
        return self.c, self.d

    def __matmul__(self, other: "SL2Matrix") -> "SL2Matrix":
        return SL2Matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "SL2Matrix":
        return SL2Matrix(self.d, -self.b, -self.c, self.a)

    def is_translation(self) -> bool:
        return self.c.is_zero() and self.a == 1 and self.d == 1

    def embedded(self) -> np.ndarray:
        """Array of shape (4, n): rows σ(a), σ(b), σ(c), σ(d) as doubles."""
        return np.stack([x.embed_float() for x in (self.a, self.b, self.c, self.d)])

    @classmethod
    def identity(cls, F: Field) -> "SL2Matrix":
        return cls(F.one, F.zero, F.zero, F.one)

    @classmethod
    def S(cls, F: Field) -> "SL2Matrix":
        """The involution (0 −1; 1 0)."""
        return cls(F.zero, -F.one, F.one, F.zero)

    @classmethod
    def T(cls, F: Field, a: Union[FieldElement, int] = 1) -> "SL2Matrix":
        """Translation T^a = (1 a; 0 1)."""
        return cls(F.one, F.one * a, F.zero, F.one)

    def __repr__(self) -> str:
        return f"SL2Matrix([[{self.a!r}, {self.b!r}], [{self.c!r}, {self.d!r}]])"


def translation_generators(F: Field) -> Tuple[SL2Matrix, ...]:
    """T^1 and (for quadratic F) T^ω."""
    return tuple(SL2Matrix.T(F, x) for x in F.integral_basis)


# ---------------------------------------------------------------------------
# Vectorized integer helpers
# ---------------------------------------------------------------------------


def batch_multiply(F: Field, xa: np.ndarray, xb: np.ndarray, ya: np.ndarray, yb: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Coordinatewise product of integer coordinate arrays."""
    bb = xb * yb
    return xa * ya + F.omega_const * bb, xa * yb + ya * xb + F.omega_trace * bb


def batch_conjugate(F: Field, xa: np.ndarray, xb: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if F.degree == 1:
        return xa, xb
    return xa + F.omega_trace * xb, -xb


def batch_norm(F: Field, xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """Field norms of integer coordinate arrays."""
    if F.degree == 1:
        return xa.copy()
    return batch_conj_product(F, xa, xb)


def batch_conj_product(F: Field, xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """x·conj(x) elementwise: x² over ℚ, N(x) over a quadratic field."""
    return batch_multiply(F, xa, xb, *batch_conjugate(F, xa, xb))[0]


def batch_embed(F: Field, xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """Embeddings of coordinate arrays as an array of shape (K, n)."""
    xa = np.asarray(xa, dtype=np.float64)
    if F.degree == 1:
        return xa[:, None]
    xb = np.asarray(xb, dtype=np.float64)
    return xa[:, None] + xb[:, None] * F.sigma_float[None, :]


def batch_ext_gcd(
    F: Field, xa: np.ndarray, xb: np.ndarray, ya: np.ndarray, yb: np.ndarray
) -> Tuple[np.ndarray, ...]:
    """Vectorized :func:`euclid_gcd` over coordinate arrays.

    Uses the same nearest-integer quotient rule as the scalar version.

    Returns:
        tuple: (ga, gb, sa, sb, ta, tb) with s·x + t·y = g elementwise.

    Raises:
        FieldArithmeticError: some division step failed to reduce the norm.
    """
    r0 = [np.array(xa, dtype=np.int64), np.array(xb, dtype=np.int64)]
    r1 = [np.array(ya, dtype=np.int64), np.array(yb, dtype=np.int64)]
    size = r0[0].shape[0]
    s0 = [np.ones(size, dtype=np.int64), np.zeros(size, dtype=np.int64)]
    s1 = [np.zeros(size, dtype=np.int64), np.zeros(size, dtype=np.int64)]
    t0 = [np.zeros(size, dtype=np.int64), np.zeros(size, dtype=np.int64)]
    t1 = [np.ones(size, dtype=np.int64), np.zeros(size, dtype=np.int64)]
    active = (r1[0] != 0) | (r1[1] != 0)
    steps = 0
    while active.any():
        idx = np.nonzero(active)[0]
        ya_, yb_ = r1[0][idx], r1[1][idx]
        n1 = batch_conj_product(F, ya_, yb_)
        pa, pb = batch_multiply(F, r0[0][idx], r0[1][idx], *batch_conjugate(F, ya_, yb_))
        qa = np.rint(pa / n1).astype(np.int64)
        qb = np.rint(pb / n1).astype(np.int64)
        ma, mb = batch_multiply(F, qa, qb, ya_, yb_)
        ra, rb = r0[0][idx] - ma, r0[1][idx] - mb
        if np.any(np.abs(batch_conj_product(F, ra, rb)) >= np.abs(n1)):
            raise FieldArithmeticError(f"vectorized Euclidean step failed to reduce the norm in {F.name}")
        for old, new, (da, db) in ((s0, s1, batch_multiply(F, qa, qb, s1[0][idx], s1[1][idx])),
                                    (t0, t1, batch_multiply(F, qa, qb, t1[0][idx], t1[1][idx]))):
            na, nb = old[0][idx] - da, old[1][idx] - db
            old[0][idx], old[1][idx] = new[0][idx], new[1][idx]
            new[0][idx], new[1][idx] = na, nb
        r0[0][idx], r0[1][idx] = ya_, yb_
        r1[0][idx], r1[1][idx] = ra, rb
        active[idx] = (ra != 0) | (rb != 0)
        steps += 1
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("batch_ext_gcd: %d rows in %d steps", size, steps)
    return r0[0], r0[1], s0[0], s0[1], t0[0], t0[1]
