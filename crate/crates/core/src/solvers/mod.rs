//! One-dimensional and radial-mode exterior problems.

mod convergence;
mod interval;
mod resonance;

pub use convergence::{convergence_point, convergence_study, ConvergenceCase, ConvergenceRow, ConvergenceTable};
pub use interval::{
    assemble_1d, dtn_1d, evaluate_1d, shape_functions, solve_1d, solve_scattering_1d, Assembled1D, BoundaryCondition, DofMap, Exterior,
    Interval1DProblem, ScatteringReport, Source,
};
pub use resonance::{
    hankel_polynomial, leading_hankel_root, resonances_slab, resonances_sphere_mode, resonances_sphere_mode_with, slab_reference,
    spherical_hankel_roots, tail_fraction, ModeProblem, ResonanceOptions, SlabConfig, DEFAULT_EIG_TOL, DEFAULT_TAIL_THRESHOLD,
};
