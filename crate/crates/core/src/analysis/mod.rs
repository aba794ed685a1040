//! Steady-state and quasi-static analysis of identified models.

mod quasi_static;
mod steady;

pub use quasi_static::{
    attracting_test, loop_orientation, quasi_static_solve, signed_area, spectral_radius, Branch,
    LoopOrientation, QuasiStaticCurve, SINGULAR_DENOMINATOR,
};
pub use steady::{
    build_continuum_constraint, check_assumption, steady_state_analyze, sum_linear_output_params,
    SteadyState, SteadyStateReport, DEFAULT_TOL_EQ,
};
