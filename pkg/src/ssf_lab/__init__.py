"""Numerical laboratory for spectral shift functions of discrete Anderson models.

Builds finite-volume lattice Hamiltonians with surface or bulk disorder,
computes their spectral shift functions exactly as integer step functions,
verifies the trace-formula, norm-bound, invariance, chain-rule, product and
averaging identities they satisfy, and estimates the associated limit
objects (surface-state density and functional, integrated density of states)
by reproducible Monte Carlo.
"""
from .bounds import (
    BoundReport,
    TestFunction,
    check_chain_rule,
    check_chn_lp_bound,
    check_invariance_principle,
    check_rank_bound,
    check_schatten_product,
    check_spectral_averaging,
    check_trace_formula,
    gaussian_test_function,
    polynomial_test_function,
    resolvent_scaling_study,
    standard_sweep,
)
from .ensemble import (
    EnsembleResult,
    FunctionalEstimate,
    HolderReport,
    LambdaGrid,
    bump_function,
    default_grid,
    estimate_bulk_ids,
    estimate_surface_density,
    estimate_surface_functional,
    holder_modulus,
    weak_limit_monitor,
)
from .model import (
    DIRICHLET,
    PERIODIC,
    DiagonalPotential,
    DisorderSpec,
    LatticeBox,
    SurfaceGeometry,
    SymmetricOperator,
    add_potential,
    build_box_laplacian,
    bulk_box,
    derive_seed,
    sample_bulk_potential,
    sample_surface_potential,
    split_potential,
)
from .spectral import (
    MarginError,
    Spectrum,
    StepFunction,
    banded_eigenvalues,
    counting_function,
    eigen_decompose,
    rank,
    resolvent_power,
    schatten_quasi_norm,
    singular_values,
    spectral_shift,
    ssf_from_eigenvalues,
    step_integrate,
    step_lp_norm,
    step_sup_gap,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DIRICHLET",
    "PERIODIC",
    "LatticeBox",
    "SymmetricOperator",
    "DiagonalPotential",
    "DisorderSpec",
    "SurfaceGeometry",
    "build_box_laplacian",
    "bulk_box",
    "derive_seed",
    "sample_surface_potential",
    "sample_bulk_potential",
    "split_potential",
    "add_potential",
    "MarginError",
    "Spectrum",
    "StepFunction",
    "eigen_decompose",
    "banded_eigenvalues",
    "counting_function",
    "spectral_shift",
    "ssf_from_eigenvalues",
    "step_integrate",
    "step_lp_norm",
    "step_sup_gap",
    "singular_values",
    "schatten_quasi_norm",
    "rank",
    "resolvent_power",
    "BoundReport",
    "TestFunction",
    "polynomial_test_function",
    "gaussian_test_function",
    "check_trace_formula",
    "check_chn_lp_bound",
    "check_rank_bound",
    "check_invariance_principle",
    "check_chain_rule",
    "check_schatten_product",
    "check_spectral_averaging",
    "resolvent_scaling_study",
    "standard_sweep",
    "LambdaGrid",
    "default_grid",
    "EnsembleResult",
    "FunctionalEstimate",
    "HolderReport",
    "bump_function",
    "estimate_surface_density",
    "estimate_surface_functional",
    "estimate_bulk_ids",
    "holder_modulus",
    "weak_limit_monitor",
]
