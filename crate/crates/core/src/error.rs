use thiserror::Error;

use crate::smooth_fn::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {estimate:e})")]
    Quadrature { lo: f64, hi: f64, estimate: f64 },
    #[error("integration step size collapsed at x = {x}")]
    StepSizeCollapse { x: f64 },
    #[error("regularization width {eps} is not below half the minimal breakpoint gap {gap}")]
    EpsTooLarge { eps: f64, gap: f64 },
    #[error("leading coefficient vanishes at x = {x}: equation is not sectionally regular")]
    SectionallySingular { x: f64 },
    #[error("degenerate interface at x = {x}: a_n(x-) + b_n(x+) = 0")]
    DegenerateInterface { x: f64 },
    #[error("invalid problem: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
