//! Linear ODEs with coefficients in the algebra:
//! `sum_i (a_i * psi^(i) + psi^(i) * b_i) = f`.

mod global;
mod interface;
mod spec;

pub use global::{
    operator, residual, sample_solution, solve_bvp_global, solve_ivp_global, Existence,
    GeneralizedSolution, IntervalSolution, Residual, SampleRow, SolveOptions, CHECK_POINTS,
    CONSISTENCY_TOL,
};
pub use interface::{apply_operator, build_interface_system, classify, Classification, Dims, InterfaceSystem};
pub use spec::{
    expand_divergence, validate, BoundaryRow, Condition, DivergenceJson, DivergenceTerm, Endpoint,
    ProblemJson, ProblemSpec, Regime, ValidationReport, LEADING_SAMPLES, LEADING_TOL,
};
