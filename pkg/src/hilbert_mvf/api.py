"""
Public API of hilbert_mvf.

Import from this module (or the package) for a stable interface::

    import hilbert_mvf as hm
    F = hm.make_field("Q(sqrt:5)")
    spec = hm.make_poincare_spec(F, hm.perm_rep_mod_p(F, 2), (3, 3), nu=[1, 0], bound=10)
    G = hm.eval_poincare(spec, [1.5j, 1.3j])

Exports:
    - fields: make_field, Field, FieldElement, SL2Matrix, euclid_gcd, complete_row, embed
    - lattices: translation_lattice, TranslationLattice, DualVector, enumerate_dual, axis_periods
    - linear algebra: sbtsd, SBTSDOptions, SBTSDResult, commuting_residual, unitary_simdiag
    - representations: trivial_rep, perm_rep_mod_p, translation_rep, parse_rep_spec
    - modular functions: MatrixFunctionHandle, WeightMatrix, automorphy_J, slash,
      transformation_residual, scalar_module_action
    - expansions: build_P, twisted_fourier_extract, expansion_pipeline, canonicalize,
      holomorphic_at_infinity, weak_derivative
    - Poincaré series: make_poincare_spec, enumerate_cosets, eval_poincare,
      convergence_diagnostic, cusp_limit_check, eisenstein_q_series
    - JSON: pfe_to_json, pfe_from_json, lattice_to_json, lattice_from_json
"""
from .errors import (
    AliasingWarning,
    AssumptionError,
    ConvergenceWarning,
    HMVFError,
    NumericalError,
    ValidationError,
)
from .field import Field, FieldElement, SL2Matrix, complete_row, embed, euclid_gcd, make_field, translation_generators
from .lattice import DualVector, TranslationLattice, axis_periods, enumerate_dual, translation_lattice
from .linalg import (
    SBTSDOptions,
    SBTSDResult,
    commuting_residual,
    nilpotent_exp,
    sbtsd,
    unipotent_log,
    unitary_simdiag,
)
from .modfun import (
    MatrixFunctionHandle,
    WeightMatrix,
    automorphy_J,
    automorphy_j,
    constant_handle,
    mobius,
    parse_weight,
    sample_points,
    scalar_module_action,
    slash,
    transformation_residual,
)
from .pfe import (
    ExtractionConfig,
    PFETerm,
    PolynomialFourierExpansion,
    axis_weak_derivative,
    build_P,
    canonicalize,
    evaluate_pfe,
    expansion_pipeline,
    holomorphic_at_infinity,
    twisted_fourier_extract,
    weak_derivative,
)
from .poincare import (
    PoincareSpec,
    absolute_sum,
    convergence_diagnostic,
    cusp_limit_check,
    eisenstein_q_series,
    enumerate_cosets,
    eval_poincare,
    make_poincare_spec,
    poincare_handle,
    poincare_term,
    residual_representation,
)
from .rep import Representation, parse_rep_spec, perm_rep_mod_p, random_sl2, translation_rep, trivial_rep
from .serialization import lattice_from_json, lattice_to_json, pfe_from_json, pfe_to_json

__all__ = [
    "AliasingWarning", "AssumptionError", "ConvergenceWarning", "HMVFError", "NumericalError", "ValidationError",
    "Field", "FieldElement", "SL2Matrix", "complete_row", "embed", "euclid_gcd", "make_field", "translation_generators",
    "DualVector", "TranslationLattice", "axis_periods", "enumerate_dual", "translation_lattice",
    "SBTSDOptions", "SBTSDResult", "commuting_residual", "nilpotent_exp", "sbtsd", "unipotent_log", "unitary_simdiag",
    "MatrixFunctionHandle", "WeightMatrix", "automorphy_J", "automorphy_j", "constant_handle", "mobius",
    "parse_weight", "sample_points", "scalar_module_action", "slash", "transformation_residual",
    "ExtractionConfig", "PFETerm", "PolynomialFourierExpansion", "axis_weak_derivative", "build_P", "canonicalize",
    "evaluate_pfe", "expansion_pipeline", "holomorphic_at_infinity", "twisted_fourier_extract", "weak_derivative",
    "PoincareSpec", "absolute_sum", "convergence_diagnostic", "cusp_limit_check", "eisenstein_q_series",
    "enumerate_cosets", "eval_poincare", "make_poincare_spec", "poincare_handle", "poincare_term",
    "residual_representation",
    "Representation", "parse_rep_spec", "perm_rep_mod_p", "random_sl2", "translation_rep", "trivial_rep",
    "lattice_from_json", "lattice_to_json", "pfe_from_json", "pfe_to_json",
]
