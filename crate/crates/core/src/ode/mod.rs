//! Smooth linear ODEs `sum_i c_i(x) psi^(i) = f(x)` on a closed interval.

pub mod dop853;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::smooth_fn::{EvalError, JetFn, SmoothExpr};
use crate::{binom, re, Scalar};
pub use dop853::{Rhs, Tolerances, Trajectory};

/// Coefficients `c_0..c_n` and right-hand side of a smooth linear ODE.
#[derive(Clone, Debug)]
pub struct SmoothOde {
    pub coeffs: Vec<SmoothExpr>,
    pub rhs: SmoothExpr,
}

impl SmoothOde {
    pub fn new(coeffs: Vec<SmoothExpr>, rhs: SmoothExpr) -> Self {
        assert!(coeffs.len() >= 2, "order must be at least 1");
        SmoothOde { coeffs, rhs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn homogeneous(&self) -> SmoothOde {
        SmoothOde {
            coeffs: self.coeffs.clone(),
            rhs: SmoothExpr::zero(),
        }
    }

    /// Full jet `psi, psi', ..., psi^(maxk)` at `x` from the state
    /// `psi^(0..n)`; orders `>= n` come from the differentiated equation.
    pub fn jet_from_state(&self, x: f64, state: &[Scalar], maxk: usize) -> Result<Vec<Scalar>> {
        let n = self.order();
        let mut d: Vec<Scalar> = state.to_vec();
        if maxk < n {
            d.truncate(maxk + 1);
            return Ok(d);
        }
        let extra = maxk - n;
        let cj: Vec<Vec<Scalar>> = self
            .coeffs
            .iter()
            .map(|c| c.eval_jet(x, extra))
            .collect::<std::result::Result<_, _>>()?;
        let fj = self.rhs.eval_jet(x, extra)?;
        let lead = cj[n][0];
        if lead == re(0.0) {
            return Err(Error::SectionallySingular { x });
        }
        for r in 0..=extra {
            let mut acc = fj[r];
            for (i, c) in cj.iter().enumerate() {
                for s in 0..=r {
                    if i == n && s == r {
                        continue;
                    }
                    acc -= c[r - s] * d[i + s] * binom(r, s);
                }
            }
            d.push(acc / lead);
        }
        Ok(d)
    }
}

impl Rhs for SmoothOde {
    fn eval(&self, x: f64, y: &[Scalar], dy: &mut [Scalar]) -> Result<()> {
        let n = self.order();
        dy[..n - 1].copy_from_slice(&y[1..n]);
        let mut acc = self.rhs.evaluate(x)?;
        for i in 0..n {
            acc -= self.coeffs[i].evaluate(x)? * y[i];
        }
        let lead = self.coeffs[n].evaluate(x)?;
        if lead == re(0.0) {
            return Err(Error::SectionallySingular { x });
        }
        dy[n - 1] = acc / lead;
        Ok(())
    }
}

/// Dense numeric solution on `[lo, hi]`, integrated outward from an anchor.
#[derive(Debug)]
pub struct SolutionFn {
    ode: Arc<SmoothOde>,
    pub lo: f64,
    pub hi: f64,
    pub anchor: f64,
    left: Trajectory,
    right: Trajectory,
    tol: Tolerances,
}

impl SolutionFn {
    pub fn order(&self) -> usize {
        self.ode.order()
    }

    pub fn ode(&self) -> &SmoothOde {
        &self.ode
    }

    /// `psi^(0..n)` at `x`.
    pub fn state(&self, x: f64) -> Result<Vec<Scalar>> {
        if x < self.anchor {
            self.left.state_at(&*self.ode, x, self.tol)
        } else {
            self.right.state_at(&*self.ode, x, self.tol)
        }
    }

    pub fn jet_at(&self, x: f64, maxk: usize) -> Result<Vec<Scalar>> {
        let s = self.state(x)?;
        self.ode.jet_from_state(x, &s, maxk)
    }

    /// Largest mismatch of `psi^(k)(b) - psi^(k)(a) = integral_a^b psi^(k+1)`
    /// over the cells of a uniform check mesh, for every `k < n`, relative to
    /// the size of the jet. The top derivative comes from the equation, so
    /// this measures how well the numeric states satisfy it.
    pub fn check_residual(&self, points: usize) -> Result<f64> {
        let n = self.order();
        let m = points.max(2);
        let xs: Vec<f64> = (0..m)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (m - 1) as f64)
            .collect();
        let jets: Vec<Vec<Scalar>> = xs.iter().map(|&x| self.jet_at(x, n)).collect::<Result<_>>()?;
        let scale: Vec<f64> = (0..=n)
            .map(|k| jets.iter().map(|j| j[k].norm()).fold(0.0, f64::max))
            .collect();
        let mut worst: f64 = 0.0;
        for c in 0..m - 1 {
            let (a, b) = (xs[c], xs[c + 1]);
            for k in 0..n {
                let integral = crate::quadrature::kronrod_fixed(|x| Ok(self.jet_at(x, k + 1)?[k + 1]), a, b)?;
                let diff = jets[c + 1][k] - jets[c][k] - integral;
                let denom = scale[k] + (b - a) * scale[k + 1];
                if denom > 0.0 {
                    worst = worst.max(diff.norm() / denom);
                }
            }
        }
        Ok(worst)
    }
}

impl JetFn for SolutionFn {
    fn jet(&self, x: f64, maxk: usize) -> std::result::Result<Vec<Scalar>, EvalError> {
        self.jet_at(x, maxk).map_err(|e| EvalError::Numeric(e.to_string()))
    }

    fn label(&self) -> String {
        format!("ode[{}, {}]", self.lo, self.hi)
    }
}

/// Solves the IVP with `psi^(j)(x0) = c[j]` on `[lo, hi]`.
pub fn solve_smooth_ivp(
    ode: &SmoothOde,
    lo: f64,
    hi: f64,
    x0: f64,
    c: &[Scalar],
    tol: Tolerances,
) -> Result<SolutionFn> {
    solve_shared(Arc::new(ode.clone()), lo, hi, x0, c, tol)
}

fn solve_shared(ode: Arc<SmoothOde>, lo: f64, hi: f64, x0: f64, c: &[Scalar], tol: Tolerances) -> Result<SolutionFn> {
    let n = ode.order();
    if c.len() != n {
        return Err(Error::Invalid(format!("initial data needs {n} values, got {}", c.len())));
    }
    if !(lo <= x0 && x0 <= hi) {
        return Err(Error::Invalid(format!("anchor {x0} outside [{lo}, {hi}]")));
    }
    let left = dop853::integrate(&*ode, x0, c, lo, tol)?;
    let right = dop853::integrate(&*ode, x0, c, hi, tol)?;
    Ok(SolutionFn {
        ode,
        lo,
        hi,
        anchor: x0,
        left,
        right,
        tol,
    })
}

/// `n` homogeneous solutions with unit jets at the anchor plus one
/// particular solution with zero jet there.
#[derive(Clone, Debug)]
pub struct FundamentalSystem {
    pub basis: Vec<Arc<SolutionFn>>,
    pub particular: Arc<SolutionFn>,
}

pub fn fundamental_system(
    ode: &SmoothOde,
    lo: f64,
    hi: f64,
    anchor: f64,
    tol: Tolerances,
    mode: ExecMode,
) -> Result<FundamentalSystem> {
    let n = ode.order();
    let hom = Arc::new(ode.homogeneous());
    let full = Arc::new(ode.clone());
    let jobs: Vec<usize> = (0..=n).collect();
    let mut sols = exec::try_map(mode, &jobs, |&j| {
        let mut c = vec![re(0.0); n];
        if j < n {
            c[j] = re(1.0);
            solve_shared(Arc::clone(&hom), lo, hi, anchor, &c, tol)
        } else {
            solve_shared(Arc::clone(&full), lo, hi, anchor, &c, tol)
        }
    })?;
    let particular = Arc::new(sols.pop().expect("n + 1 solves"));
    Ok(FundamentalSystem {
        basis: sols.into_iter().map(Arc::new).collect(),
        particular,
    })
}

impl FundamentalSystem {
    pub fn order(&self) -> usize {
        self.basis.len()
    }

    /// Matrix of basis jets `Phi[j][k] = phi_k^(j)(x)` and the particular
    /// jet, both up to order `maxk`.
    pub fn jets(&self, x: f64, maxk: usize) -> Result<(Vec<Vec<Scalar>>, Vec<Scalar>)> {
        let cols: Vec<Vec<Scalar>> = self
            .basis
            .iter()
            .map(|b| b.jet_at(x, maxk))
            .collect::<Result<_>>()?;
        let rows = (0..=maxk).map(|j| cols.iter().map(|c| c[j]).collect()).collect();
        Ok((rows, self.particular.jet_at(x, maxk)?))
    }

    /// Wronskian `phi_k^(j)(anchor)`.
    pub fn wronskian(&self, x: f64) -> Result<Vec<Vec<Scalar>>> {
        Ok(self.jets(x, self.order() - 1)?.0)
    }

    /// `particular + sum_k z_k phi_k` as an opaque smooth function.
    pub fn combine(&self, z: &[Scalar]) -> SmoothExpr {
        SmoothExpr::opaque(Arc::new(Combination {
            parts: self.basis.iter().cloned().zip(z.iter().copied()).collect(),
            particular: Arc::clone(&self.particular),
        }))
    }
}

#[derive(Debug)]
struct Combination {
    parts: Vec<(Arc<SolutionFn>, Scalar)>,
    particular: Arc<SolutionFn>,
}

impl JetFn for Combination {
    fn jet(&self, x: f64, maxk: usize) -> std::result::Result<Vec<Scalar>, EvalError> {
        let mut out = self.particular.jet(x, maxk)?;
        for (f, c) in &self.parts {
            if *c == re(0.0) {
                continue;
            }
            for (o, v) in out.iter_mut().zip(f.jet(x, maxk)?) {
                *o += v * c;
            }
        }
        Ok(out)
    }

    fn label(&self) -> String {
        format!("solution[{}, {}]", self.particular.lo, self.particular.hi)
    }
}
