//! Smooth regularizations `F+eps(x) = F_eps(x - eps)`, `F-eps(x) = F_eps(x + eps)`
//! of elements of the algebra, and numerical weak-limit checks.
//!
//! `F_eps` blends lateral pieces across each collar `[x_i - eps, x_i + eps]`
//! with the integrated bump kernel and replaces every Dirac term
//! `c delta^(j)(x - x_i)` by `c v^(j)(x - x_i)`, where `v` is the unit-mass
//! bump supported in the collar. Outside the collars `F_eps` is the piecewise
//! part itself.

use std::sync::{Arc, OnceLock};

use crate::dist_algebra::DistA;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::quadrature;
use crate::smooth_fn::{EvalError, JetFn, SmoothExpr};
use crate::{binom, re, Scalar};

const CDF_CELLS: usize = 2048;

/// Below this value of `1 - t^2` the profile underflows to exactly zero.
const PROFILE_FLOOR: f64 = 1.0 / 720.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegSide {
    Plus,
    Minus,
}

fn profile_expr() -> &'static SmoothExpr {
    static P: OnceLock<SmoothExpr> = OnceLock::new();
    P.get_or_init(|| {
        let t = SmoothExpr::x();
        let one_minus = SmoothExpr::sub(SmoothExpr::one(), SmoothExpr::powi(t, 2));
        SmoothExpr::exp(SmoothExpr::neg(SmoothExpr::div(SmoothExpr::one(), one_minus)))
    })
}

/// `exp(-1/(1 - t^2))` on `|t| < 1`, zero elsewhere.
fn profile(t: f64) -> f64 {
    let w = 1.0 - t * t;
    if w <= PROFILE_FLOOR {
        0.0
    } else {
        (-1.0 / w).exp()
    }
}

fn profile_jet(t: f64, maxk: usize) -> Vec<Scalar> {
    if 1.0 - t * t <= PROFILE_FLOOR {
        return vec![re(0.0); maxk + 1];
    }
    profile_expr()
        .eval_jet(t, maxk)
        .expect("profile is smooth inside its support")
}

struct CdfTable {
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
    mass: f64,
}

fn cdf_table() -> &'static CdfTable {
    static T: OnceLock<CdfTable> = OnceLock::new();
    T.get_or_init(|| {
        let h = 2.0 / CDF_CELLS as f64;
        let nodes: Vec<f64> = (0..=CDF_CELLS).map(|k| -1.0 + h * k as f64).collect();
        let mut cumulative = vec![0.0; CDF_CELLS + 1];
        for k in 0..CDF_CELLS {
            let cell = quadrature::kronrod_fixed(|t| Ok(re(profile(t))), nodes[k], nodes[k + 1])
                .expect("profile evaluation is infallible")
                .re;
            cumulative[k + 1] = cumulative[k] + cell;
        }
        let mass = cumulative[CDF_CELLS];
        CdfTable {
            nodes,
            cumulative,
            mass,
        }
    })
}

/// `integral_{-1}^{1} exp(-1/(1 - t^2)) dt`.
pub fn bump_normalizer() -> f64 {
    cdf_table().mass
}

/// Fraction of the unit-mass profile's mass on `(-inf, t]`.
fn std_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let tab = cdf_table();
    let k = (((t + 1.0) / 2.0 * CDF_CELLS as f64) as usize).min(CDF_CELLS - 1);
    let partial = quadrature::kronrod_fixed(|s| Ok(re(profile(s))), tab.nodes[k], t)
        .expect("profile evaluation is infallible")
        .re;
    (tab.cumulative[k] + partial) / tab.mass
}

/// Unit-mass bump `v(x) = phi((x - x0)/eps) / (N eps)` supported in
/// `[x0 - eps, x0 + eps]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpKernel {
    pub x0: f64,
    pub eps: f64,
}

pub fn bump_mollifier(x0: f64, eps: f64) -> BumpKernel {
    BumpKernel { x0, eps }
}

impl BumpKernel {
    pub fn value(&self, x: f64) -> f64 {
        profile((x - self.x0) / self.eps) / (bump_normalizer() * self.eps)
    }

    /// Derivatives `0..=maxk` at `x`.
    pub fn derivatives(&self, x: f64, maxk: usize) -> Vec<Scalar> {
        let t = (x - self.x0) / self.eps;
        let base = 1.0 / (bump_normalizer() * self.eps);
        profile_jet(t, maxk)
            .into_iter()
            .enumerate()
            .map(|(j, v)| v * (base / self.eps.powi(j as i32)))
            .collect()
    }

    /// `integral_{-inf}^{x} v`.
    pub fn cdf(&self, x: f64) -> f64 {
        std_cdf((x - self.x0) / self.eps)
    }

    pub fn expr(&self) -> SmoothExpr {
        SmoothExpr::opaque(Arc::new(*self))
    }
}

impl JetFn for BumpKernel {
    fn jet(&self, x: f64, maxk: usize) -> std::result::Result<Vec<Scalar>, EvalError> {
        Ok(self.derivatives(x, maxk))
    }

    fn label(&self) -> String {
        format!("bump[{}, {}]", self.x0, self.eps)
    }
}

/// Smooth regularization of a [`DistA`] at width `eps`, shifted per side.
#[derive(Clone, Debug)]
pub struct RegularizedFn {
    base: DistA,
    eps: f64,
    side: RegSide,
}

pub fn regularize(f: &DistA, eps: f64, side: RegSide) -> Result<RegularizedFn> {
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("regularization width must be positive, got {eps}")));
    }
    let gap = f
        .breakpoints()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if eps >= gap / 2.0 {
        return Err(Error::EpsTooLarge { eps, gap });
    }
    Ok(RegularizedFn {
        base: f.clone(),
        eps,
        side,
    })
}

impl RegularizedFn {
    pub fn base(&self) -> &DistA {
        &self.base
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn side(&self) -> RegSide {
        self.side
    }

    fn shift(&self) -> f64 {
        match self.side {
            RegSide::Plus => -self.eps,
            RegSide::Minus => self.eps,
        }
    }

    /// Collar edges `[x_i - eps, x_i + eps]` after the side shift.
    pub fn collar_edges(&self) -> Vec<f64> {
        let s = -self.shift();
        self.base
            .breakpoints()
            .iter()
            .flat_map(|&x| [x - self.eps + s, x + self.eps + s])
            .collect()
    }

    /// Derivatives `0..=maxk` of the unshifted `F_eps` at `y`.
    fn unshifted_jet(&self, y: f64, maxk: usize) -> std::result::Result<Vec<Scalar>, EvalError> {
        let bps = self.base.breakpoints();
        let pieces = self.base.pieces();
        let eps = self.eps;
        // collar containing y, if any
        let k = bps.partition_point(|&b| b + eps < y);
        let mut out = if k < bps.len() && y >= bps[k] - eps {
            let kern = bump_mollifier(bps[k], eps);
            let left = pieces[k].eval_jet(y, maxk)?;
            let right = pieces[k + 1].eval_jet(y, maxk)?;
            let mut s = vec![re(kern.cdf(y))];
            if maxk > 0 {
                s.extend(kern.derivatives(y, maxk - 1));
            }
            (0..=maxk)
                .map(|m| {
                    let mut v = left[m];
                    for j in 0..=m {
                        v += s[j] * (right[m - j] - left[m - j]) * binom(m, j);
                    }
                    v
                })
                .collect::<Vec<_>>()
        } else {
            let idx = bps.partition_point(|&b| b < y);
            pieces[idx].eval_jet(y, maxk)?
        };
        for t in self.base.deltas().terms() {
            if (y - t.x).abs() >= eps {
                continue;
            }
            let kd = bump_mollifier(t.x, eps).derivatives(y, maxk + t.order);
            for (m, slot) in out.iter_mut().enumerate() {
                *slot += t.coef * kd[m + t.order];
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, x: f64) -> Result<Scalar> {
        Ok(self.unshifted_jet(x + self.shift(), 0)?[0])
    }

    pub fn expr(&self) -> SmoothExpr {
        SmoothExpr::opaque(Arc::new(self.clone()))
    }
}

impl JetFn for RegularizedFn {
    fn jet(&self, x: f64, maxk: usize) -> std::result::Result<Vec<Scalar>, EvalError> {
        self.unshifted_jet(x + self.shift(), maxk)
    }

    fn label(&self) -> String {
        format!("reg[{:?}, {}]", self.side, self.eps)
    }
}

/// Pairing window for test functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Support {
    fn default() -> Self {
        Support { lo: -16.0, hi: 16.0 }
    }
}

/// `|<F_eps psi, t> - <F * psi, t>|` on the plus side and
/// `|<F_eps psi, t> - <psi * F, t>|` on the minus side.
pub fn weak_residual(
    f: &DistA,
    psi: &DistA,
    t: &SmoothExpr,
    eps: f64,
    side: RegSide,
    support: Support,
) -> Result<f64> {
    let reg = regularize(f, eps, side)?;
    let approx = DistA::smooth(reg.expr()).star(psi)?;
    let mut splits = reg.collar_edges();
    splits.extend(f.breakpoints());
    let lhs = approx.pair_with_test_split(t, support.lo, support.hi, &splits)?;
    let limit = match side {
        RegSide::Plus => f.star(psi)?,
        RegSide::Minus => psi.star(f)?,
    };
    let rhs = limit.pair_with_test(t, support.lo, support.hi)?;
    Ok((lhs - rhs).norm())
}

/// `|<F_eps, t> - <F, t>|`.
pub fn distributional_residual(
    f: &DistA,
    t: &SmoothExpr,
    eps: f64,
    side: RegSide,
    support: Support,
) -> Result<f64> {
    weak_residual(f, &DistA::smooth(SmoothExpr::one()), t, eps, side, support).and_then(|_| {
        let reg = regularize(f, eps, side)?;
        let mut splits = reg.collar_edges();
        splits.extend(f.breakpoints());
        let lhs = DistA::smooth(reg.expr()).pair_with_test_split(t, support.lo, support.hi, &splits)?;
        let rhs = f.pair_with_test(t, support.lo, support.hi)?;
        Ok((lhs - rhs).norm())
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub residual: f64,
    /// `log(r_k / r_{k-1}) / log(eps_k / eps_{k-1})`; `None` for the first
    /// row or when either residual is zero.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub side: RegSide,
    pub rows: Vec<ConvergenceRow>,
}

/// Slack for treating residuals at the quadrature floor as non-increasing.
pub const MONOTONE_SLACK: f64 = 1e-10;

impl ConvergenceReport {
    pub fn is_nonincreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].residual <= w[0].residual + MONOTONE_SLACK)
    }

    pub fn final_residual(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.residual)
    }

    /// Least-squares slope of `log r` against `log eps` over rows with
    /// positive residuals.
    pub fn fitted_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.residual > 0.0)
            .map(|r| (r.eps.ln(), r.residual.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,residual,slope\n");
        for r in &self.rows {
            let slope = r.slope.map_or("nan".to_string(), |v| format!("{v:.16e}"));
            s.push_str(&format!("{:.16e},{:.16e},{}\n", r.eps, r.residual, slope));
        }
        s
    }
}

/// Weak residuals along a decreasing schedule of widths.
pub fn convergence_report(
    f: &DistA,
    psi: &DistA,
    t: &SmoothExpr,
    schedule: &[f64],
    side: RegSide,
    mode: ExecMode,
) -> Result<ConvergenceReport> {
    if schedule.is_empty() {
        return Err(Error::Invalid("empty regularization schedule".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("schedule must be strictly decreasing".into()));
    }
    let residuals = exec::try_map(mode, schedule, |&eps| {
        weak_residual(f, psi, t, eps, side, Support::default())
    })?;
    let rows = schedule
        .iter()
        .zip(&residuals)
        .enumerate()
        .map(|(k, (&eps, &residual))| {
            let slope = (k > 0 && residual > 0.0 && residuals[k - 1] > 0.0)
                .then(|| (residual / residuals[k - 1]).ln() / (eps / schedule[k - 1]).ln());
            ConvergenceRow {
                eps,
                residual,
                slope,
            }
        })
        .collect();
    Ok(ConvergenceReport { side, rows })
}

/// `2^-lo, ..., 2^-hi`.
pub fn dyadic_schedule(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|k| 0.5f64.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth_fn::parse_expr;

    fn gauss() -> SmoothExpr {
        parse_expr("exp(-1*x^2/4)").unwrap()
    }

    #[test]
    fn normalizer_matches_midpoint_sum() {
        // independent composite midpoint rule
        let n = 400_000;
        let h = 2.0 / n as f64;
        let mid: f64 = (0..n)
            .map(|k| {
                let t = -1.0 + h * (k as f64 + 0.5);
                (-1.0 / (1.0 - t * t)).exp()
            })
            .sum::<f64>()
            * h;
        assert!((bump_normalizer() - mid).abs() < 1e-11);
        assert!((bump_normalizer() - 0.443993816168).abs() < 1e-11);
    }

    #[test]
    fn kernel_mass_support_symmetry() {
        let k = bump_mollifier(0.3, 0.01);
        let mass = quadrature::integrate_real(|x| k.value(x), 0.29, 0.31, &[]).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        assert_eq!(k.value(0.3 + 1.01 * 0.01), 0.0);
        assert_eq!(k.value(0.3 - 1.01 * 0.01), 0.0);
        for d in [0.001, 0.004, 0.0099] {
            assert_eq!(k.value(0.3 + d), k.value(0.3 - d));
        }
        assert!((k.cdf(0.3) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn kernel_derivative_matches_difference() {
        let k = bump_mollifier(0.0, 0.5);
        let h = 1e-6;
        for x in [-0.3, 0.1, 0.42] {
            let d = k.derivatives(x, 1)[1].re;
            let fd = (k.value(x + h) - k.value(x - h)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-6 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn heaviside_outside_collars() {
        let eps = 0.01;
        let r = regularize(&DistA::heaviside(0.0), eps, RegSide::Plus).unwrap();
        assert_eq!(r.evaluate(-eps / 2.0).unwrap(), re(0.0));
        assert_eq!(r.evaluate(3.0 * eps).unwrap(), re(1.0));
    }

    #[test]
    fn delta_mass_and_moment() {
        let eps = 0.05;
        let r = regularize(&DistA::delta(0.0, 0), eps, RegSide::Minus).unwrap();
        let mass = quadrature::integrate_real(|x| r.evaluate(x).unwrap().re, -1.0, 1.0, &r.collar_edges()).unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
        let r = regularize(&DistA::delta(0.0, 1), eps, RegSide::Plus).unwrap();
        let m1 = quadrature::integrate_real(|x| x * r.evaluate(x).unwrap().re, -1.0, 1.0, &r.collar_edges()).unwrap();
        assert!((m1 + 1.0).abs() < 1e-6);
    }

    #[test]
    fn exact_outside_collars() {
        let f = DistA::piecewise(
            vec![-1.0, 0.5],
            vec![parse_expr("sin(x)").unwrap(), parse_expr("x^2").unwrap(), parse_expr("exp(x)").unwrap()],
        )
        .unwrap();
        let eps = 0.1;
        for side in [RegSide::Plus, RegSide::Minus] {
            let r = regularize(&f, eps, side).unwrap();
            let s = if side == RegSide::Plus { eps } else { -eps };
            for x in [-3.0, -0.5, 0.0, 2.0] {
                let want = f.lateral_value(x - s, crate::dist_algebra::Side::Right).unwrap();
                assert!((r.evaluate(x).unwrap() - want).norm() <= 1e-14 * (1.0 + want.norm()));
            }
        }
    }

    #[test]
    fn eps_too_large() {
        let f = DistA::heaviside(0.0).add(&DistA::heaviside(1.0));
        assert!(matches!(
            regularize(&f, 0.5, RegSide::Plus),
            Err(Error::EpsTooLarge { .. })
        ));
        assert!(regularize(&f, 0.49, RegSide::Plus).is_ok());
    }

    #[test]
    fn product_limits() {
        let h = DistA::heaviside(0.0);
        let d = DistA::delta(0.0, 0);
        let t = gauss();
        for eps in [0.1, 0.01] {
            let plus = weak_residual(&h, &d, &t, eps, RegSide::Plus, Support::default()).unwrap();
            assert!(plus < 1e-12);
            let minus = weak_residual(&h, &d, &t, eps, RegSide::Minus, Support::default()).unwrap();
            assert!(minus < 1e-12);
        }
        let constant = DistA::smooth(SmoothExpr::real(3.0));
        let r = weak_residual(&constant, &h, &t, 0.01, RegSide::Plus, Support::default()).unwrap();
        assert!(r < 1e-8);
        // the side shift alone leaves a first-order error for varying F
        let smooth = DistA::smooth(parse_expr("sin(x)").unwrap());
        let rep = convergence_report(&smooth, &h, &t, &dyadic_schedule(3, 10), RegSide::Plus, ExecMode::auto()).unwrap();
        assert!(rep.is_nonincreasing());
        assert!((rep.fitted_slope().unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn schedule_report() {
        let h = DistA::heaviside(0.0);
        let d1 = DistA::delta(0.0, 1);
        let rep = convergence_report(&h, &d1, &gauss(), &dyadic_schedule(3, 10), RegSide::Minus, ExecMode::auto()).unwrap();
        assert!(rep.is_nonincreasing());
        assert!(rep.final_residual() < 1e-3);
        assert!(rep.to_csv().starts_with("eps,residual,slope\n"));
        let dh = convergence_report(&DistA::delta(0.0, 0), &h, &gauss(), &dyadic_schedule(3, 10), RegSide::Plus, ExecMode::auto()).unwrap();
        assert!(dh.is_nonincreasing());
        assert!(dh.final_residual() < 1e-3);
        assert!(convergence_report(&h, &d1, &gauss(), &[], RegSide::Plus, ExecMode::auto()).is_err());
    }
}
