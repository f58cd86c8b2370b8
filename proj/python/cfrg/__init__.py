"""Numerical laboratory for CMC conformal constraint data on the flat 3-torus."""

from cfrg._core import (
    ConformalBackground,
    ConformalData,
    ConvergenceError,
    HarmonicMode,
    InitialDataSet,
    IoError,
    Lattice,
    MismatchError,
    ScalarField,
    SymTensorField,
    TTWaveMode,
    ValidationError,
    bounds_sweep,
    build_initial_data,
    conformal_transfer,
    constant_root,
    convergence_study,
    default_tolerance,
    degeneration_study,
    dump_scalar_field,
    exceedance_radius,
    gradient_norm_squared,
    hamiltonian_residual,
    harmonic_field,
    integrate,
    k_norm_squared,
    laplacian,
    load_scalar_field,
    make_tt_field,
    momentum_residual,
    nonexistence_report,
    norm_squared,
    obstruction_check,
    radial_shoot,
    rayleigh_quotient,
    residual,
    run_json,
    scalar_curvature,
    scaling_transform,
    solve_monotone,
    solve_newton,
    sub_super_bounds,
    table_scan,
    trace_k,
    tt_check,
    unit_min_tt_base,
    yamabe_sign,
)

__all__ = [name for name in dir() if not name.startswith("_")]
