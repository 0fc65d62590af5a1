"""Quantum block spin-flip dynamics on bipartite systems."""

from ._core import (
    BellDiagonalParams,
    BipartiteDims,
    ClosedFormDual,
    CorrelationReport,
    DensityExperimentStats,
    DensityMatrix,
    OnsetRow,
    PptReport,
    QuasiAbelianDiagnosis,
    SeparableDecomposition,
    SeparableTerm,
    Side,
    SpinFlipModel,
    abelian_decomposition_from_zeros,
    bell_reference,
    build_model,
    closed_form_dual,
    cond_expectation,
    correlation,
    correlation_report,
    correlation_series_terms,
    decomposition_equivalence,
    density_experiment,
    dual_map,
    entanglement_onset,
    factorization_criterion,
    factorized_value,
    generator,
    heisenberg_semigroup,
    liouville_inner,
    perturb_nondegenerate,
    perturb_nonfactorizable,
    ppt_check,
    quasi_abelian_diagnose,
    random_separable,
    schrodinger_semigroup,
    separation_bound,
    sqrt_separable,
)

__all__ = [
    "BellDiagonalParams",
    "BipartiteDims",
    "ClosedFormDual",
    "CorrelationReport",
    "DensityExperimentStats",
    "DensityMatrix",
    "OnsetRow",
    "PptReport",
    "QuasiAbelianDiagnosis",
    "SeparableDecomposition",
    "SeparableTerm",
    "Side",
    "SpinFlipModel",
    "abelian_decomposition_from_zeros",
    "bell_reference",
    "build_model",
    "closed_form_dual",
    "cond_expectation",
    "correlation",
    "correlation_report",
    "correlation_series_terms",
    "decomposition_equivalence",
    "density_experiment",
    "dual_map",
    "entanglement_onset",
    "factorization_criterion",
    "factorized_value",
    "generator",
    "heisenberg_semigroup",
    "liouville_inner",
    "perturb_nondegenerate",
    "perturb_nonfactorizable",
    "ppt_check",
    "quasi_abelian_diagnose",
    "random_separable",
    "schrodinger_semigroup",
    "separation_bound",
    "sqrt_separable",
]
