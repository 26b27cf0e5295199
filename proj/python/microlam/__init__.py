"""Optimal rank-3 laminate energy bounds, laminate reconstruction, unit cell
mapping and inverse homogenization for multi-load plane elasticity."""

from microlam._core import (
    FeasibilityResiduals,
    Homogenizer,
    IterationRecord,
    LoadSet,
    MaterialPair,
    MomentSolution,
    MomentSolverOptions,
    MomentVector,
    OracleResult,
    ParallelogramCell,
    PeriodicFilter,
    Rank3Laminate,
    StressCase,
    StripeFamily,
    TopOptConfig,
    TopOptResult,
    build_cell,
    complementary_energy,
    effective_compliance,
    example_loadset_shear_uniaxial,
    example_loadset_three_uniaxial,
    grid_search_oracle,
    heaviside_project,
    homogeneous_start,
    isotropic_stiffness_voigt,
    laminate_moments,
    layer_widths,
    moment_feasibility,
    moment_matrix,
    optimize_cell,
    optimize_moments,
    point_is_solid,
    random_start,
    rasterize_cell,
    reconstruct_laminate,
    stripe_union_area,
    width_bisection,
)

__all__ = [
    "FeasibilityResiduals",
    "Homogenizer",
    "IterationRecord",
    "LoadSet",
    "MaterialPair",
    "MomentSolution",
    "MomentSolverOptions",
    "MomentVector",
    "OracleResult",
    "ParallelogramCell",
    "PeriodicFilter",
    "Rank3Laminate",
    "StressCase",
    "StripeFamily",
    "TopOptConfig",
    "TopOptResult",
    "build_cell",
    "complementary_energy",
    "effective_compliance",
    "example_loadset_shear_uniaxial",
    "example_loadset_three_uniaxial",
    "grid_search_oracle",
    "heaviside_project",
    "homogeneous_start",
    "isotropic_stiffness_voigt",
    "laminate_moments",
    "layer_widths",
    "moment_feasibility",
    "moment_matrix",
    "optimize_cell",
    "optimize_moments",
    "point_is_solid",
    "random_start",
    "rasterize_cell",
    "reconstruct_laminate",
    "stripe_union_area",
    "width_bisection",
]
