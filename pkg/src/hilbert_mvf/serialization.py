"""
JSON codec for matrices, lattices, expansions and reports.

Real numbers are written as decimal strings with 17 significant digits, which round-trips every
IEEE double exactly. Complex numbers are ``[re, im]`` pairs of such strings. Readers also accept
plain JSON numbers.
"""
from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ValidationError
from .field import make_field
from .lattice import TranslationLattice, translation_lattice
from .linalg import SBTSDResult
from .pfe import PFETerm, PolynomialFourierExpansion
from .theory_types import SIGNIFICANT_DIGITS

logger = logging.getLogger(__name__)

JSONValue = Union[None, bool, int, float, str, List[Any], Dict[str, Any]]


def real_to_str(x: float) -> str:
    return f"{float(x):.{SIGNIFICANT_DIGITS}g}"


def real_from_json(x: Union[str, int, float]) -> float:
    if isinstance(x, bool) or not isinstance(x, (str, int, float)):
        raise ValidationError(f"expected a decimal string or number, got {x!r}")
    try:
        return float(x)
    except ValueError as exc:
        raise ValidationError(f"not a decimal number: {x!r}") from exc


def complex_to_json(z: complex) -> List[str]:
    z = complex(z)
    return [real_to_str(z.real), real_to_str(z.imag)]


def complex_from_json(value: Any) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(real_from_json(value[0]), real_from_json(value[1]))
    return complex(real_from_json(value), 0.0)


def matrix_to_json(A: np.ndarray) -> List[List[List[str]]]:
    A = np.atleast_2d(np.asarray(A, dtype=np.complex128))
    return [[complex_to_json(z) for z in row] for row in A]


def matrix_from_json(value: Any) -> np.ndarray:
    """Parse ``[[[re, im], ...], ...]`` (entries may also be bare reals)."""
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        raise ValidationError(f"a matrix must be a non-empty list of rows, got {type(value).__name__}")
    width = len(value[0])
    if any(len(row) != width for row in value):
        raise ValidationError("matrix rows have different lengths")
    return np.array([[complex_from_json(z) for z in row] for row in value], dtype=np.complex128)


def matrices_from_json(value: Any) -> List[np.ndarray]:
    if isinstance(value, Mapping):
        value = value.get("matrices")
    if not isinstance(value, list) or not value:
        raise ValidationError("expected a non-empty list of matrices")
    return [matrix_from_json(m) for m in value]


def real_matrix_to_json(A: np.ndarray) -> List[List[str]]:
    return [[real_to_str(x) for x in row] for row in np.atleast_2d(A)]


def lattice_to_json(L: TranslationLattice) -> Dict[str, Any]:
    return {
        "field": L.field.spec_string,
        "basis_integer_coords": [list(a.coords[: L.n]) for a in L.basis],
        "M": real_matrix_to_json(L.M),
        "D": real_matrix_to_json(L.D),
    }


def lattice_from_json(value: Mapping[str, Any]) -> TranslationLattice:
    """Rebuild a lattice; M and D are recomputed and must match the stored values."""
    try:
        F = make_field(value["field"])
        first = value["basis_integer_coords"][0]
    except (KeyError, IndexError, TypeError) as exc:
        raise ValidationError(f"malformed lattice document: {exc}") from exc
    scale = F.element(*(int(x) for x in first))
    L = translation_lattice(F, scale)
    if "M" in value:
        stored = np.array([[real_from_json(x) for x in row] for row in value["M"]])
        if stored.shape != L.M.shape or not np.allclose(stored, L.M, rtol=1e-14, atol=1e-14):
            raise ValidationError("stored lattice basis does not match the field and scale")
    return L


def pfe_to_json(E: PolynomialFourierExpansion) -> Dict[str, Any]:
    return {
        "lattice": lattice_to_json(E.lattice),
        "terms": [
            {
                "u": [complex_to_json(x) for x in term.u],
                "t": [int(x) for x in term.t],
                "v": [int(x) for x in term.v],
                "a": complex_to_json(term.a),
            }
            for term in E.terms
        ],
        "canonical": bool(E.canonical),
    }


def pfe_from_json(value: Mapping[str, Any]) -> PolynomialFourierExpansion:
    try:
        L = lattice_from_json(value["lattice"])
        terms = tuple(
            PFETerm(
                tuple(complex_from_json(x) for x in term["u"]),
                tuple(int(x) for x in term["t"]),
                tuple(int(x) for x in term["v"]),
                complex_from_json(term["a"]),
            )
            for term in value["terms"]
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed expansion document: {exc}") from exc
    for term in terms:
        if not (len(term.u) == len(term.t) == len(term.v) == L.n):
            raise ValidationError(f"expansion term {term} does not match n = {L.n}")
    return PolynomialFourierExpansion(L, terms, bool(value.get("canonical", False)))


def sbtsd_to_json(result: SBTSDResult, family: Optional[Sequence[np.ndarray]] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "block_sizes": list(result.block_sizes),
        "eigenvalues": [[complex_to_json(z) for z in row] for row in result.eigenvalues],
        "exponents": [[complex_to_json(z) for z in row] for row in result.exponents],
        "T": matrix_to_json(result.T),
        "B": [matrix_to_json(B) for B in result.B],
        "S": [matrix_to_json(S) for S in result.S],
    }
    if family is not None:
        doc["residual"] = real_to_str(result.residual(family))
    return doc


def to_jsonable(obj: Any) -> JSONValue:
    """Convert dataclasses, numpy values and complex numbers into plain JSON values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [to_jsonable(x) for x in obj]
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return real_to_str(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(complex(obj))
    if isinstance(obj, Path):
        return str(obj)
    return obj


def make_report(command: str, result: Any, *, seed: int, config_hash: str) -> Dict[str, Any]:
    """The envelope every CLI command emits."""
    from . import __version__

    return {
        "hilbert_mvf_version": __version__,
        "seed": int(seed),
        "config_hash": config_hash,
        "command": command,
        "result": to_jsonable(result),
    }


def dumps(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=False, ensure_ascii=False)


def write_json(document: Any, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(document) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)


def read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
