"""Normalized principal components for approximate factor models."""

from ._core import (
    ConfigError,
    DegeneracyError,
    EigenSystem,
    FactorEstimate,
    LimitObjects,
    ModelConfig,
    NumericalError,
    SyntheticPanel,
    ValidationError,
    draw_loadings,
    estimate_from_panel,
    fit_loglog_slope,
    fix_signs,
    idio_covariance,
    limit_objects,
    normalized_pcs,
    npc_coefficients,
    pc_loadings,
    population_covariances,
    rotation_h,
    run_suite,
    sample_covariance,
    simulate_panel,
    suite_names,
    top_r_eigs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
