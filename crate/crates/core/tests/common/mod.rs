#![allow(dead_code)]

use distrode::dist_algebra::{DeltaPart, DistA};
use distrode::smooth_fn::SmoothExpr;
use distrode::solver::ProblemSpec;
use distrode::Scalar;
use rand::Rng;

pub const POINTS: [f64; 3] = [-1.0, 0.0, 1.0];

fn coef<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-2.0..2.0)
}

/// Cubic polynomial, `a sin(bx + c)` or `a exp(bx)`.
pub fn random_piece<R: Rng>(rng: &mut R) -> SmoothExpr {
    let x = SmoothExpr::x();
    match rng.random_range(0..3) {
        0 => (0..4).fold(SmoothExpr::zero(), |acc, k| {
            SmoothExpr::add(acc, SmoothExpr::scale(coef(rng), SmoothExpr::powi(x.clone(), k)))
        }),
        1 => SmoothExpr::scale(
            coef(rng),
            SmoothExpr::sin(SmoothExpr::add(
                SmoothExpr::scale(coef(rng), x),
                SmoothExpr::real(coef(rng)),
            )),
        ),
        _ => SmoothExpr::scale(coef(rng), SmoothExpr::exp(SmoothExpr::scale(coef(rng), x))),
    }
}

/// Random element with breakpoints and deltas (order at most 3) drawn from
/// `points`.
pub fn random_dist_at<R: Rng>(rng: &mut R, points: &[f64]) -> DistA {
    let bps: Vec<f64> = points.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
    let pieces = (0..=bps.len()).map(|_| random_piece(rng)).collect();
    let mut d = DeltaPart::new();
    for &x in points {
        if rng.random_bool(0.4) {
            let order = rng.random_range(0..4);
            d.insert(x, order, Scalar::new(coef(rng), 0.0));
        }
    }
    DistA::from_parts(bps, pieces, d).unwrap()
}

pub fn random_dist<R: Rng>(rng: &mut R) -> DistA {
    random_dist_at(rng, &POINTS)
}

/// Broad, unit-scale test functions.
pub fn test_functions() -> Vec<SmoothExpr> {
    [
        "exp(-1*x^2/4)",
        "x*exp(-1*x^2/4)",
        "exp(-1*(x - 0.5)^2/4)",
        "sin(x/2)*exp(-1*x^2/8)",
        "(1 - x^2/8)*exp(-1*x^2/8)",
    ]
    .iter()
    .map(|s| distrode::smooth_fn::parse_expr(s).unwrap())
    .collect()
}

fn re(v: f64) -> Scalar {
    Scalar::new(v, 0.0)
}

/// `psi'' + (k^2 + alpha delta''') * psi = 0` on [-3, 3].
pub fn example(k: f64, alpha: f64) -> ProblemSpec {
    let a0 = DistA::smooth(SmoothExpr::real(k * k)).add(&DistA::delta_scaled(0.0, 3, re(alpha)));
    ProblemSpec::new(
        2,
        vec![a0],
        vec![DistA::zero(), DistA::zero(), DistA::smooth(SmoothExpr::one())],
        SmoothExpr::zero(),
        (-3.0, 3.0),
        vec![],
    )
    .unwrap()
}

/// Random spec with constant-coefficient smooth parts and Dirac terms of
/// order up to `max_delta` at 0. The leading coefficients stay positive.
pub fn random_spec<R: Rng>(rng: &mut R, n: usize, max_delta: usize) -> ProblemSpec {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..=n {
        let (ca, cb) = if i == n {
            (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0))
        } else {
            (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        };
        let mut da = DeltaPart::new();
        let mut db = DeltaPart::new();
        if i < n && rng.random_bool(0.5) {
            da.insert(0.0, rng.random_range(0..=max_delta), re(rng.random_range(-0.5..0.5)));
        }
        if i < n && rng.random_bool(0.3) {
            db.insert(0.0, rng.random_range(0..=max_delta), re(rng.random_range(-0.5..0.5)));
        }
        a.push(DistA::from_parts(vec![], vec![SmoothExpr::real(ca)], da).unwrap());
        b.push(DistA::from_parts(vec![], vec![SmoothExpr::real(cb)], db).unwrap());
    }
    ProblemSpec::new(n, a, b, SmoothExpr::sin(SmoothExpr::x()), (-1.5, 1.5), vec![]).unwrap()
}

/// Splits a smooth coefficient between the two sides of the product.
pub fn split_coeff(c: &SmoothExpr, style: usize) -> (DistA, DistA) {
    match style {
        // left coefficient on the left half, right coefficient on the right
        0 => (
            DistA::heaviside_minus(0.2).star(&DistA::smooth(c.clone())).unwrap(),
            DistA::heaviside(0.2).star(&DistA::smooth(c.clone())).unwrap(),
        ),
        // false breakpoint: same formula on both sides
        1 => (
            DistA::piecewise(vec![-0.4], vec![c.clone(), c.clone()]).unwrap(),
            DistA::zero(),
        ),
        _ => (
            DistA::smooth(SmoothExpr::scale(0.3, c.clone())),
            DistA::smooth(SmoothExpr::scale(0.7, c.clone())),
        ),
    }
}

