"""
Command-line interface: ``hmvf`` (or ``python -m hilbert_mvf``).

Every command prints one JSON report (or writes it to ``--output``)::

    {"hilbert_mvf_version": ..., "seed": ..., "config_hash": ..., "command": ..., "result": ...}

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 violated assumption.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import JobConfig, load_config
from .errors import HMVFError, NumericalError, ValidationError, exit_code_for
from .field import Field, SL2Matrix, make_field
from .lattice import axis_periods, enumerate_dual, translation_lattice
from .linalg import SBTSDOptions, commuting_residual, sbtsd
from .modfun import WeightMatrix, constant_handle, parse_weight, sample_points, transformation_residual
from .pfe import expansion_pipeline, holomorphic_at_infinity, twisted_fourier_extract
from .poincare import (
    PoincareSpec,
    convergence_diagnostic,
    cusp_limit_check,
    eval_poincare,
    make_poincare_spec,
    poincare_handle,
    residual_representation,
)
from .rep import parse_rep_spec, random_sl2
from .reporting import Table, convergence_table, cusp_table, print_table, residual_table, write_table
from .serialization import (
    dumps,
    lattice_to_json,
    make_report,
    matrices_from_json,
    matrix_to_json,
    pfe_to_json,
    read_json,
    sbtsd_to_json,
    write_json,
)
from .synthetic import synthetic_jordan, synthetic_twisted
from .theory_types import DEFAULT_SEED

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    command: str
    result: Dict[str, Any]
    table: Optional[Table] = None
    exit_code: int = 0


# ---------------------------------------------------------------------------
# Argument parsing helpers
# ---------------------------------------------------------------------------


def _floats(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse numbers from {text!r}") from exc


def _int_rows(text: str) -> Tuple[Tuple[int, ...], ...]:
    try:
        return tuple(tuple(int(x) for x in row.split(",")) for row in text.split(";") if row.strip())
    except ValueError as exc:
        raise ValidationError(f"cannot parse integer rows from {text!r}") from exc


def parse_tau(values: Sequence[float], n: int) -> np.ndarray:
    """2n numbers (re, im per coordinate) → a point of 𝓗ⁿ."""
    if len(values) != 2 * n:
        raise ValidationError(f"tau needs {2 * n} numbers for n = {n}, got {len(values)}")
    arr = np.asarray(values, dtype=float).reshape(n, 2)
    return arr[:, 0] + 1j * arr[:, 1]


def parse_word(text: str, F: Field) -> SL2Matrix:
    """Parse a generator word such as ``S*T1*T2^-1``."""
    result = SL2Matrix.identity(F)
    for token in text.replace(" ", "").split("*"):
        name, _, power = token.partition("^")
        if name == "S":
            gamma = SL2Matrix.S(F)
        elif name in ("T", "T1"):
            gamma = SL2Matrix.T(F, 1)
        elif name == "T2" and F.degree == 2:
            gamma = SL2Matrix.T(F, F.omega)
        else:
            raise ValidationError(f"unknown generator {name!r} in word {text!r} over {F.name}")
        try:
            k = int(power) if power else 1
        except ValueError as exc:
            raise ValidationError(f"bad exponent {power!r} in word {text!r}") from exc
        step = gamma if k >= 0 else gamma.inverse()
        for _ in range(abs(k)):
            result = result @ step
    return result


def _apply_overrides(config: JobConfig, args: argparse.Namespace) -> JobConfig:
    get = lambda name: getattr(args, name, None)  # noqa: E731
    config = config.override("field", spec=get("field"))
    config = config.override("rep", spec=get("rep"))
    config = config.override("weight", rows=get("weight"))
    scale = get("scale")
    config = config.override("lattice", scale=tuple(int(x) for x in _floats(scale)) if scale else None)
    config = config.override(
        "poincare",
        nu=_int_rows(get("nu")) if get("nu") else None,
        bound=get("bound") if not isinstance(get("bound"), list) else None,
        bounds=_floats(get("bounds")) if get("bounds") else None,
        tau=_floats(get("tau")) if get("tau") else None,
        lambdas=_floats(get("lambdas")) if get("lambdas") else None,
        eisenstein=True if get("eisenstein") else None,
        original_basis=True if get("original_basis") else None,
    )
    config = config.override("extraction", grid=get("grid"), dual_bound=get("dual_bound"))
    return config


def _spec_from_config(config: JobConfig) -> PoincareSpec:
    F = make_field(config.field.spec)
    rep = parse_rep_spec(config.rep.spec, F)
    pc = config.poincare
    default = 4 if pc.eisenstein else 3
    weight = parse_weight(config.weight.rows, F.degree) if config.weight.rows else WeightMatrix.uniform(default, F.degree)
    return make_poincare_spec(F, rep, weight, pc.nu, pc.bound, eisenstein=pc.eisenstein)


def _tau_from_config(config: JobConfig, n: int) -> np.ndarray:
    if config.poincare.tau is None:
        return 1.5j * np.ones(n)
    return parse_tau(config.poincare.tau, n)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_sbtsd(args: argparse.Namespace, config: JobConfig) -> CommandResult:
    family = matrices_from_json(read_json(args.input))
    result = sbtsd(family, SBTSDOptions())
    return CommandResult("sbtsd", sbtsd_to_json(result, family))


def cmd_lattice_info(args: argparse.Namespace, config: JobConfig) -> CommandResult:
    F = make_field(config.field.spec)
    scale = F.element(*config.lattice.scale[: F.degree]) if config.lattice.scale else None
    L = translation_lattice(F, scale)
    duals = enumerate_dual(L, args.dual_bound if args.dual_bound is not None else 1.0)
    return CommandResult(
        "lattice info",
        {
            "lattice": lattice_to_json(L),
            "axis_periods": list(axis_periods(L)),
            "dual_vectors": [list(v.coords) for v in duals],
        },
    )


def cmd_rep_check(args: argparse.Namespace, config: JobConfig) -> CommandResult:
    F = make_field(config.field.spec)
    rep = parse_rep_spec(config.rep.spec, F)
    L = translation_lattice(F)
    rng = np.random.default_rng(args.seed)
    pairs = [(random_sl2(F, rng), random_sl2(F, rng)) for _ in range(args.pairs)]
    images = rep.translation_images(L)
    return CommandResult(
        "rep check",
        {
            "kind": rep.kind,
            "dimension": rep.dimension,
            "unitary": rep.is_unitary,
            "homomorphism_residual": rep.homomorphism_residual(pairs),
            "translation_commuting_residual": commuting_residual(images),
            "translation_images": [matrix_to_json(A) for A in images],
        },
    )


def cmd_poincare(args: argparse.Namespace, config: JobConfig) -> CommandResult:
    spec = _spec_from_config(config)
    pc = config.poincare
    base = {"blocks": list(spec.block_sizes), "mu": spec.mu, "nu": spec.nu, "weight": [list(r) for r in spec.weight.rows]}
    if args.action == "eval":
        tau = _tau_from_config(config, spec.n)
        value = eval_poincare(spec, tau, workers=args.threads, original_basis=pc.original_basis)
        return CommandResult("poincare eval", {**base, "tau": tau, "value": matrix_to_json(value), "B": spec.bound, "deltas": []})
    if args.action == "converge":
        tau = _tau_from_config(config, spec.n)
        bounds = pc.bounds or (spec.bound / 4, spec.bound / 2, spec.bound)
        report = convergence_diagnostic(spec, tau, bounds, workers=args.threads)
        value = report.rows[-1].value
        if pc.original_basis:
            value = spec.T @ value
        result = {**base, "tau": tau, "value": matrix_to_json(value), "B": list(bounds), "deltas": report.deltas, "monotone": report.monotone}
        return CommandResult("poincare converge", result, convergence_table(report))
    magnitudes = cusp_limit_check(spec, pc.lambdas, workers=args.threads)
    decreasing = all(b < a for a, b in zip(magnitudes, magnitudes[1:]))
    result = {**base, "lambdas": list(pc.lambdas), "magnitudes": magnitudes, "decreasing": decreasing}
    return CommandResult("poincare cusp", result, cusp_table(pc.lambdas, magnitudes))


def cmd_verify(args: argparse.Namespace, config: JobConfig) -> CommandResult:
    words = [w for w in args.gamma.split(",") if w.strip()]
    bounds: List[Optional[float]] = list(args.bound) if args.bound else [config.poincare.bound]
    entries: List[Tuple[str, Optional[float], float]] = []
    if args.source == "constant":
        F = make_field(config.field.spec)
        G = constant_handle(np.ones((1, 1)), F)
        rho = G.representation
        samples = sample_points(F.degree, args.samples, args.seed)
        for word in words:
            entries.append((word, None, transformation_residual(G, rho, parse_word(word, F), samples)))
    else:
        spec = _spec_from_config(config)
        samples = sample_points(spec.n, args.samples, args.seed)
        for B in bounds:
            current = spec.with_bound(B)
            G = poincare_handle(current, workers=args.threads)
            rho = residual_representation(current)
            for word in words:
                entries.append((word, B, transformation_residual(G, rho, parse_word(word, spec.field), samples)))
    final_bound = bounds[-1] if args.source != "constant" else None
    worst = max((res for _, B, res in entries if B == final_bound), default=0.0)
    decreasing = {}
    for word in words:
        series = [res for w, _, res in entries if w == word]
        decreasing[word] = all(b < a for a, b in zip(series, series[1:]))
    result = {
        "source": args.source,
        "samples": args.samples,
        "residuals": [{"gamma": w, "bound": B, "residual": res} for w, B, res in entries],
        "decreasing": decreasing,
        "max_residual": worst,
        "tol": args.tol,
        "passed": worst <= args.tol,
    }
    code = 0 if worst <= args.tol else NumericalError.exit_code
    if code:
        logger.error("transformation residual %.3g exceeds --tol %g", worst, args.tol)
    return CommandResult("verify", result, residual_table(entries), code)


def _memoized_column(column: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    cache: Dict[str, Any] = {}

    def evaluate(batch: np.ndarray) -> np.ndarray:
        key = batch.tobytes()
        if cache.get("key") != key:
            cache["key"], cache["value"] = key, column(batch)
        return cache["value"]

    return evaluate


def cmd_expand(args: argparse.Namespace, config: JobConfig) -> CommandResult:
    rng = np.random.default_rng(args.seed)
    extraction = config.extraction.to_extraction_config(seed=args.seed, workers=args.threads)
    F = make_field(config.field.spec)
    L = translation_lattice(F)
    result: Dict[str, Any] = {"source": args.source}
    if args.source == "synthetic-twisted":
        sample = synthetic_twisted(L, rng)
        coefficients = twisted_fourier_extract(sample, L, sample.mu, extraction)
        expansions = [coefficients.to_expansion()]
        result["max_coefficient_error"] = max(abs(coefficients[v] - a) for v, a in sample.coefficients.items())
    elif args.source == "synthetic-jordan":
        sample = synthetic_jordan(L, rng)
        expansions = expansion_pipeline(
            sample.components(), sample.translations, L, extraction, config.extraction.coefficient_tol
        )
        result["block_sizes"] = list(sample.block_sizes)
        result["source_terms"] = [len(E) for E in sample.source]
    else:
        spec = _spec_from_config(config)
        handle = poincare_handle(spec, workers=args.threads)
        column = _memoized_column(lambda batch: handle(batch)[:, :, 0])
        components = [lambda batch, a=a: column(batch)[:, a] for a in range(spec.r)]
        translations = residual_representation(spec).translation_images(spec.lattice)
        expansions = expansion_pipeline(components, translations, spec.lattice, extraction, config.extraction.coefficient_tol)
    holomorphy = []
    for a, E in enumerate(expansions):
        ok, violations = holomorphic_at_infinity(E)
        holomorphy.append({"component": a, "holomorphic": ok, "violations": len(violations)})
    result["expansions"] = [pfe_to_json(E) for E in expansions]
    result["holomorphy"] = holomorphy
    if args.output_dir:
        out = Path(args.output_dir)
        for a, E in enumerate(expansions):
            write_json(pfe_to_json(E), out / f"component_{a}.json")
    return CommandResult("expand", result)


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def _add_poincare_flags(p: argparse.ArgumentParser, *, repeat_bound: bool = False) -> None:
    p.add_argument("--field", help='Field spec: "Q" or "Q(sqrt:d)" with d in {2, 3, 5, 13}.')
    p.add_argument("--rep", help='Representation: "trivial:r", "permmod:p", "permmod:a,b" or "custom:file.json".')
    p.add_argument("--weight", help='Weight rows, e.g. "3,3" or "3,3;4,4".')
    p.add_argument("--nu", help='Dual coordinates of nu, one row per block separated by ";" (or one row for all).')
    if repeat_bound:
        p.add_argument("--bound", type=float, action="append", help="Truncation bound B (repeatable).")
    else:
        p.add_argument("--bound", type=float, help="Truncation bound B.")
    p.add_argument("--eisenstein", action="store_true", help="Use nu = 0 (Eisenstein mode).")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmvf", description="Matrix-valued Hilbert modular forms toolkit.")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"Seed for every random choice (default: {DEFAULT_SEED}).")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads (default: 1).")
    parser.add_argument("--config", help="Job configuration JSON; flags override it.")
    parser.add_argument("--output", help="Write the JSON report here instead of stdout.")
    parser.add_argument("--csv", help="Write the diagnostics table of the command as CSV.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sbtsd", help="Simultaneously block-triangularize commuting matrices.")
    p.add_argument("input", help='JSON file with a list of matrices [[[re, im], ...], ...] or {"matrices": [...]}.')
    p.set_defaults(handler=cmd_sbtsd)

    p = sub.add_parser("expand", help="Polynomial Fourier expansions of a column.")
    p.add_argument("--source", choices=["synthetic-jordan", "synthetic-twisted", "poincare"], default="synthetic-jordan")
    p.add_argument("--output-dir", help="Write one expansion file per component here.")
    p.add_argument("--grid", type=int, help="Samples per axis (power of two >= 16).")
    p.add_argument("--dual-bound", type=float, help="Box bound on extracted dual vectors.")
    _add_poincare_flags(p)
    p.set_defaults(handler=cmd_expand)

    p = sub.add_parser("verify", help="Transformation-law residuals.")
    p.add_argument("--source", choices=["poincare", "constant"], default="poincare")
    p.add_argument("--gamma", default="S,T1", help='Comma-separated generator words, e.g. "S,T1,T2,S*T1".')
    p.add_argument("--samples", type=int, default=5, help="Number of sample points.")
    p.add_argument("--tol", type=float, default=1e-2, help="Largest accepted residual at the final bound.")
    _add_poincare_flags(p, repeat_bound=True)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("poincare", help="Evaluate and diagnose truncated Poincaré series.")
    p.add_argument("action", choices=["eval", "converge", "cusp"])
    _add_poincare_flags(p)
    p.add_argument("--bounds", help='Ascending bounds for "converge", e.g. "5,10,20".')
    p.add_argument("--tau", help="Point as 2n numbers: re1,im1,re2,im2,...")
    p.add_argument("--lambdas", help='Heights for "cusp", e.g. "2,4,8".')
    p.add_argument("--original-basis", action="store_true", help="Report T·G_B instead of G_B.")
    p.set_defaults(handler=cmd_poincare)

    p = sub.add_parser("lattice", help="Translation lattice data.")
    p.add_argument("action", choices=["info"])
    p.add_argument("--field")
    p.add_argument("--scale", help='Scale element as integer coordinates "a,b".')
    p.add_argument("--dual-bound", type=float, help="List dual vectors with real coordinates in this box (default 1).")
    p.set_defaults(handler=cmd_lattice_info)

    p = sub.add_parser("rep", help="Representation checks.")
    p.add_argument("action", choices=["check"])
    p.add_argument("--field")
    p.add_argument("--rep")
    p.add_argument("--pairs", type=int, default=10, help="Random pairs for the homomorphism residual.")
    p.set_defaults(handler=cmd_rep_check)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        if args.threads < 1:
            raise ValidationError(f"--threads must be >= 1, got {args.threads}")
        config = _apply_overrides(load_config(args.config), args)
        outcome = args.handler(args, config)
    except HMVFError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    report = make_report(outcome.command, outcome.result, seed=args.seed, config_hash=config.digest())
    if args.output:
        write_json(report, args.output)
    else:
        print(dumps(report))
    if outcome.table is not None:
        headers, rows = outcome.table
        if args.csv:
            write_table(args.csv, headers, rows)
        elif args.verbose:
            print_table(headers, rows, file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
