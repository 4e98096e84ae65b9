"""Dissipative logarithmic Schrodinger dynamics under continuous measurement.

Library + CLI for evolving a one-dimensional wave packet whose equation
of motion combines a measurement-resolution term and a friction term
(both logarithmic), extracting Bohmian trajectories, and checking the
numerics against the exact Gaussian (Gausson) reduction and its
transition time constant tau_B = 1/kappa.
"""

__version__ = "0.1.0"

from .analytic import (
    GaussonState,
    WidthSeries,
    bohmian_trajectories_analytic,
    classical_trajectory,
    density_gausson,
    integrate_width,
    quantum_force_gausson,
    quantum_potential_gausson,
    stationary_width_residual,
    velocity_field_analytic,
)
from .bohmian import TrajectoryEnsemble, advance_ensemble, sample_initial_positions, velocity_field_numeric
from .diagnostics import (
    ComparisonReport,
    DiagnosticsRecord,
    compare_runs,
    continuity_residual,
    diagnostics_series,
    excess_kurtosis,
    expectation,
    measured_width,
)
from .params import (
    DimensionlessParams,
    PhysicalParams,
    Scales,
    bohmian_time_constant,
    bohmian_time_constant_approx,
    gausson_kappa,
    nondimensionalize,
    redimensionalize,
    solver_params,
)
from .pde import Grid, WavepacketState, compute_wc, compute_wf, evolve, init_gaussian, step, unwrap_phase

__all__ = [
    "__version__",
    "GaussonState",
    "WidthSeries",
    "bohmian_trajectories_analytic",
    "classical_trajectory",
    "density_gausson",
    "integrate_width",
    "quantum_force_gausson",
    "quantum_potential_gausson",
    "stationary_width_residual",
    "velocity_field_analytic",
    "TrajectoryEnsemble",
    "advance_ensemble",
    "sample_initial_positions",
    "velocity_field_numeric",
    "ComparisonReport",
    "DiagnosticsRecord",
    "compare_runs",
    "continuity_residual",
    "diagnostics_series",
    "excess_kurtosis",
    "expectation",
    "measured_width",
    "DimensionlessParams",
    "PhysicalParams",
    "Scales",
    "bohmian_time_constant",
    "bohmian_time_constant_approx",
    "gausson_kappa",
    "nondimensionalize",
    "redimensionalize",
    "solver_params",
    "Grid",
    "WavepacketState",
    "compute_wc",
    "compute_wf",
    "evolve",
    "init_gaussian",
    "step",
    "unwrap_phase",
]
