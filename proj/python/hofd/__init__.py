"""Sensitivity analysis for statistically dependent inputs.

The package wraps a C++ core that builds a hierarchically orthogonal
function basis on a sample, fits a sparse surrogate to the response, and
splits the response variance into generalized, possibly negative, shares
that always sum to one.
"""

from ._core import (
    ComponentSet,
    CoefficientVector,
    ConfigError,
    DataError,
    DesignMatrix,
    FitConfig,
    FitTraceEvent,
    GramMatrix,
    HofdBasis,
    HogsConfig,
    IndexEntry,
    InputModel,
    LarsBreakpoint,
    NumericalError,
    PipelineResult,
    RunConfig,
    Sample,
    SensitivityReport,
    SubsetIndex,
    assemble_design,
    build_hogs_basis,
    check_hierarchical_orthogonality,
    estimate_indices,
    evaluate_basis,
    fit,
    fit_foba,
    fit_lars,
    fit_ols,
    fit_ridge,
    gram_matrix,
    input_model_by_name,
    load_run_config,
    make_sample,
    model_response,
    reconstruct_components,
    run_pipeline,
    toy_input_model,
    toy_response,
    vessel_input_model,
    vessel_response,
)

__all__ = [
    "ComponentSet",
    "CoefficientVector",
    "ConfigError",
    "DataError",
    "DesignMatrix",
    "FitConfig",
    "FitTraceEvent",
    "GramMatrix",
    "HofdBasis",
    "HogsConfig",
    "IndexEntry",
    "InputModel",
    "LarsBreakpoint",
    "NumericalError",
    "PipelineResult",
    "RunConfig",
    "Sample",
    "SensitivityReport",
    "SubsetIndex",
    "analyze",
    "assemble_design",
    "build_hogs_basis",
    "check_hierarchical_orthogonality",
    "estimate_indices",
    "evaluate_basis",
    "fit",
    "fit_foba",
    "fit_lars",
    "fit_ols",
    "fit_ridge",
    "gram_matrix",
    "input_model_by_name",
    "load_run_config",
    "make_sample",
    "model_response",
    "reconstruct_components",
    "run_pipeline",
    "toy_input_model",
    "toy_response",
    "vessel_input_model",
    "vessel_response",
]


def analyze(X, y, *, family="hermite", levels=5, max_order=2, method="foba",
            **fit_options):
    """One-call variance decomposition of a response sample.

    Builds the hierarchical basis on ``X``, fits ``y`` with the requested
    method, and returns the :class:`SensitivityReport`.  ``levels`` may be an
    int (same number of functions for every input) or a per-input list.
    Extra keyword arguments set the matching :class:`FitConfig` fields.
    """
    import numpy as np

    sample = Sample()
    sample.X = np.ascontiguousarray(X, dtype=float)
    sample.y = np.ascontiguousarray(y, dtype=float).reshape(-1)
    sample.has_response = True

    basis_config = HogsConfig()
    basis_config.family = family
    basis_config.levels = [levels] if isinstance(levels, int) else list(levels)
    basis_config.max_order = max_order

    fit_config = FitConfig()
    fit_config.method = method
    for key, value in fit_options.items():
        if not hasattr(fit_config, key):
            raise TypeError(f"unknown fit option {key!r}")
        setattr(fit_config, key, value)

    basis = build_hogs_basis(sample.X, basis_config)
    design = assemble_design(basis, sample)
    coef = fit(design, fit_config)
    return estimate_indices(reconstruct_components(design, coef))
