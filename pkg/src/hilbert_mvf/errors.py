"""
Exception hierarchy for hilbert_mvf.

Every error raised by the library derives from :class:`HMVFError` and falls in one of three
categories, which the command line maps to exit codes:

- :class:`ValidationError` (exit code 2): malformed or out-of-range input.
- :class:`NumericalError` (exit code 3): a computation could not meet its tolerance.
- :class:`AssumptionError` (exit code 4): valid input that violates a mathematical assumption
  (e.g. a non-unitary representation handed to the Poincaré series).
"""
from __future__ import annotations


class HMVFError(Exception):
    """Base class of all library errors."""

    exit_code = 1


class ValidationError(HMVFError, ValueError):
    """Input failed validation."""

    exit_code = 2


class NumericalError(HMVFError, ArithmeticError):
    """A numerical procedure failed or exceeded its tolerance."""

    exit_code = 3


class AssumptionError(HMVFError):
    """Input violates an assumption of the construction."""

    exit_code = 4


class UnsupportedFieldError(ValidationError):
    """Field outside ℚ and the norm-Euclidean set ℚ(√d), d ∈ {2, 3, 5, 13}."""


class DeterminantError(ValidationError):
    """A matrix expected in SL₂(O_F) has determinant different from 1."""


class FieldMismatchError(ValidationError):
    """Objects attached to different fields were combined."""


class NotPrimeError(ValidationError):
    """Element is not a prime of O_F."""


class UndefinedEvaluationError(ValidationError):
    """A representation was evaluated outside its domain of definition."""


class LatticeError(ValidationError):
    """Invalid lattice data or a lattice property that does not exist."""


class ConfigError(ValidationError):
    """Invalid job configuration."""


class FieldArithmeticError(NumericalError):
    """Euclidean division failed to reduce the norm."""


class NonCommutingError(NumericalError):
    """Family expected to commute does not."""


class SingularMatrixError(NumericalError):
    """Matrix expected to be invertible is (numerically) singular."""


class ClusteringError(NumericalError):
    """Eigenvalue clusters are inconsistent with the computed kernel dimensions."""


class NotUnitriangularError(NumericalError):
    """Matrix expected to be unitriangular is not."""


class NotTwistedPeriodicError(NumericalError):
    """Function does not satisfy the stated twisted periodicity."""


class TranslationLawError(NumericalError):
    """Column of functions does not satisfy g(τ + v_i) = A_i g(τ)."""


class PoincareDomainError(NumericalError):
    """A Poincaré summand overflowed (τ too close to the real axis)."""


class NotUnitaryError(AssumptionError):
    """Matrix or representation image is not unitary."""


class AssumptionViolation(AssumptionError):
    """Generic violation of the Poincaré series assumptions."""


class AliasingWarning(UserWarning):
    """Fourier extraction grid is too coarse for the sampled function."""


class ConvergenceWarning(UserWarning):
    """Truncated sums did not decrease monotonically."""


def exit_code_for(exc: BaseException) -> int:
    """Return the CLI exit code for an exception (1 for anything unexpected)."""
    if isinstance(exc, HMVFError):
        return exc.exit_code
    return 1
