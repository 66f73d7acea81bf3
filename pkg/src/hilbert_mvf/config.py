"""
Job configuration documents for the command line.

A job file is UTF-8 JSON with up to six sections::

    {
      "field": {"spec": "Q(sqrt:5)"},
      "lattice": {"scale": [1, 0]},
      "rep": {"spec": "permmod:2"},
      "weight": {"rows": "3,3"},
      "poincare": {"nu": [[1, 0]], "bound": 20, "tau": [0.1, 1.5, -0.2, 1.3]},
      "extraction": {"grid": 64, "dual_bound": 8}
    }

Every key is optional; missing keys take the library defaults. Unknown sections or keys raise
:class:`~hilbert_mvf.errors.ConfigError`, and numbers are range-checked on load.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Type, TypeVar, Union

from .errors import ConfigError
from .pfe import ExtractionConfig
from .theory_types import (
    DEFAULT_DUAL_BOUND,
    DEFAULT_GRID,
    DFT_RESOLUTION,
    PIPELINE_COEFFICIENT_TOL,
    TOL_PERIODIC,
)

logger = logging.getLogger(__name__)

S = TypeVar("S")


@dataclass(frozen=True)
class FieldSection:
    spec: str = "Q"


@dataclass(frozen=True)
class LatticeSection:
    scale: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.scale is not None:
            object.__setattr__(self, "scale", tuple(int(x) for x in self.scale))
            if not any(self.scale):
                raise ConfigError("lattice.scale must be nonzero")


@dataclass(frozen=True)
class RepSection:
    spec: str = "trivial:1"


@dataclass(frozen=True)
class WeightSection:
    rows: Optional[str] = None


@dataclass(frozen=True)
class PoincareSection:
    nu: Optional[Tuple[Tuple[int, ...], ...]] = None
    bound: float = 10.0
    bounds: Optional[Tuple[float, ...]] = None
    tau: Optional[Tuple[float, ...]] = None
    lambdas: Tuple[float, ...] = (2.0, 4.0, 8.0)
    eisenstein: bool = False
    original_basis: bool = False

    def __post_init__(self) -> None:
        if self.nu is not None:
            rows = self.nu if self.nu and isinstance(self.nu[0], (list, tuple)) else (self.nu,)
            object.__setattr__(self, "nu", tuple(tuple(int(x) for x in row) for row in rows))
        if self.bound <= 0:
            raise ConfigError(f"poincare.bound must be positive, got {self.bound}")
        if self.bounds is not None:
            object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
            if any(b <= 0 for b in self.bounds):
                raise ConfigError(f"poincare.bounds must be positive, got {self.bounds}")
        if self.tau is not None:
            object.__setattr__(self, "tau", tuple(float(x) for x in self.tau))
            if len(self.tau) % 2:
                raise ConfigError("poincare.tau needs 2n numbers (re, im per coordinate)")
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        if any(lam < 1 for lam in self.lambdas):
            raise ConfigError(f"poincare.lambdas must be >= 1, got {self.lambdas}")


@dataclass(frozen=True)
class ExtractionSection:
    y0: Optional[Tuple[float, ...]] = None
    grid: int = DEFAULT_GRID
    dual_bound: float = DEFAULT_DUAL_BOUND
    tol_periodic: float = TOL_PERIODIC
    resolution: float = DFT_RESOLUTION
    probe_count: int = 5
    coefficient_tol: float = PIPELINE_COEFFICIENT_TOL

    def __post_init__(self) -> None:
        if self.y0 is not None:
            object.__setattr__(self, "y0", tuple(float(y) for y in self.y0))
        if self.grid < 16 or self.grid & (self.grid - 1):
            raise ConfigError(f"extraction.grid must be a power of two >= 16, got {self.grid}")
        if self.dual_bound < 0:
            raise ConfigError(f"extraction.dual_bound must be >= 0, got {self.dual_bound}")
        for name in ("tol_periodic", "resolution", "coefficient_tol"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigError(f"extraction.{name} must lie in (0, 1), got {getattr(self, name)}")
        if self.probe_count < 1:
            raise ConfigError(f"extraction.probe_count must be >= 1, got {self.probe_count}")

    def to_extraction_config(self, *, seed: int, workers: int = 1) -> ExtractionConfig:
        return ExtractionConfig(
            y0=self.y0,
            grid=self.grid,
            dual_bound=self.dual_bound,
            tol_periodic=self.tol_periodic,
            resolution=self.resolution,
            probe_count=self.probe_count,
            seed=seed,
            workers=workers,
        )


_SECTIONS: Dict[str, Type[Any]] = {
    "field": FieldSection,
    "lattice": LatticeSection,
    "rep": RepSection,
    "weight": WeightSection,
    "poincare": PoincareSection,
    "extraction": ExtractionSection,
}


def _build_section(name: str, cls: Type[S], values: Any) -> S:
    if not isinstance(values, Mapping):
        raise ConfigError(f"section {name!r} must be an object, got {type(values).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}  # type: ignore[arg-type]
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in section {name!r}; expected some of {sorted(known)}")
    try:
        return cls(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value in section {name!r}: {exc}") from exc


@dataclass(frozen=True)
class JobConfig:
    """A parsed job document; CLI flags override it through :meth:`override`."""

    field: FieldSection = FieldSection()
    lattice: LatticeSection = LatticeSection()
    rep: RepSection = RepSection()
    weight: WeightSection = WeightSection()
    poincare: PoincareSection = PoincareSection()
    extraction: ExtractionSection = ExtractionSection()

    @classmethod
    def from_dict(cls, document: Any) -> "JobConfig":
        if not isinstance(document, Mapping):
            raise ConfigError(f"a job document must be a JSON object, got {type(document).__name__}")
        unknown = sorted(set(document) - set(_SECTIONS))
        if unknown:
            raise ConfigError(f"unknown section(s) {unknown}; expected some of {sorted(_SECTIONS)}")
        sections = {name: _build_section(name, _SECTIONS[name], document[name]) for name in document}
        return cls(**sections)

    def to_dict(self) -> Dict[str, Any]:
        return {name: dataclasses.asdict(getattr(self, name)) for name in _SECTIONS}

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """sha256 of the canonical JSON form."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def override(self, section: str, **values: Any) -> "JobConfig":
        """Replace the non-None ``values`` in one section."""
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section {section!r}")
        changes = {k: v for k, v in values.items() if v is not None}
        if not changes:
            return self
        current = dataclasses.asdict(getattr(self, section))
        current.update(changes)
        return dataclasses.replace(self, **{section: _build_section(section, _SECTIONS[section], current)})


def load_config(path: Union[str, Path, None]) -> JobConfig:
    """Read a job document; ``None`` gives the defaults."""
    if path is None:
        return JobConfig()
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    config = JobConfig.from_dict(document)
    logger.info("loaded config %s (sha256 %s)", path, config.digest()[:12])
    return config
