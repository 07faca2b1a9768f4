//! Piecewise-smooth distributions with an intrinsic associative product, and
//! linear ODEs whose coefficients live in that algebra.
//!
//! The algebra consists of distributions of the form
//! `sum_i f_i chi_(x_i, x_i+1) + sum_ij c_ij delta^(j)(x - x_i)` with smooth
//! pieces `f_i`. The star product multiplies every Dirac term on the left by
//! the right lateral piece of the other factor and on the right by its left
//! lateral piece, which makes products such as `H * delta` well defined
//! (`H * delta = 0`, `delta * H = delta`).
//!
//! Modules, bottom up:
//! - [`smooth_fn`]: expression trees, parser, exact derivatives and jets.
//! - [`dist_algebra`]: the algebra itself.
//! - [`regularization`]: mollified approximations and weak-limit checks.
//! - [`ode`]: adaptive Runge-Kutta integration of the smooth sub-problems.
//! - [`solver`]: interface conditions, classification, IVP/BVP assembly.
//! - [`beam`]: cracked clamped Euler-Bernoulli beam.

pub mod beam;
pub mod dist_algebra;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod regularization;
pub mod smooth_fn;
pub mod solver;

pub use error::Error;

/// Scalar field used throughout; coefficients may be complex.
pub type Scalar = num_complex::Complex64;

pub(crate) fn re(v: f64) -> Scalar {
    Scalar::new(v, 0.0)
}

pub(crate) fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}
