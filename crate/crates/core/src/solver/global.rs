//! Global linear assembly over all regular intervals.
//!
//! Each interval carries `n` coordinates in its fundamental system. Interface
//! rows couple neighbours; initial or boundary rows close the system. One
//! minimum-norm SVD solve then decides existence and uniqueness at once.

use serde::{Deserialize, Serialize};

use super::interface::{apply_operator, build_interface_system, InterfaceSystem};
use super::spec::{expand_divergence, validate, BoundaryRow, Endpoint, ProblemSpec, ValidationReport};
use crate::dist_algebra::{DeltaPart, DistA, Side};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::linalg::{self, CMatrix, CVector};
use crate::ode::{fundamental_system, FundamentalSystem, SmoothOde, Tolerances};
use crate::smooth_fn::SmoothExpr;
use crate::{re, Scalar};

/// Relative residual above which the assembled system counts as inconsistent.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Check points per regular interval for [`residual`].
pub const CHECK_POINTS: usize = 65;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    Unique,
    AffineFamily(usize),
    None,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: Tolerances,
    pub mode: ExecMode,
    pub consistency_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: Tolerances::default(),
            mode: ExecMode::auto(),
            consistency_tol: CONSISTENCY_TOL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntervalSolution {
    pub lo: f64,
    pub hi: f64,
    pub system: FundamentalSystem,
    /// Coordinates in `system`.
    pub z: CVector,
}

impl IntervalSolution {
    pub fn jet(&self, x: f64, maxk: usize) -> Result<Vec<Scalar>> {
        let (phi, p) = self.system.jets(x, maxk)?;
        Ok((0..=maxk)
            .map(|j| p[j] + phi[j].iter().zip(self.z.iter()).map(|(a, b)| a * b).sum::<Scalar>())
            .collect())
    }

    pub fn expr(&self) -> SmoothExpr {
        self.system.combine(self.z.as_slice())
    }
}

#[derive(Clone, Debug)]
pub struct GeneralizedSolution {
    pub n: usize,
    pub domain: (f64, f64),
    pub validation: ValidationReport,
    pub intervals: Vec<IntervalSolution>,
    pub interfaces: Vec<InterfaceSystem>,
    pub delta: DeltaPart,
    pub existence: Existence,
    /// Null-space basis of the assembled system, in stacked interval
    /// coordinates; empty unless the solution is an affine family.
    pub kernel: CMatrix,
    pub relative_residual: f64,
}

impl GeneralizedSolution {
    /// Index of the interval to the given side of `x`.
    pub fn interval_index(&self, x: f64, side: Side) -> usize {
        let last = self.intervals.len() - 1;
        let k = self.intervals.partition_point(|iv| match side {
            Side::Left => iv.hi < x,
            Side::Right => iv.hi <= x,
        });
        k.min(last)
    }

    /// Lateral jet `psi^(0..=maxk)` at `x`.
    pub fn jet(&self, x: f64, side: Side, maxk: usize) -> Result<Vec<Scalar>> {
        self.intervals[self.interval_index(x, side)].jet(x, maxk)
    }

    /// `psi = sum_t H_t psi_t + Delta` as an element of the algebra.
    pub fn to_dist(&self) -> Result<DistA> {
        let bps = self.interfaces.iter().map(|s| s.x0).collect();
        let pieces = self.intervals.iter().map(IntervalSolution::expr).collect();
        DistA::from_parts(bps, pieces, self.delta.clone())
    }

    /// Same solution with interval `t`'s coordinates shifted by `dz`; the
    /// Dirac part is recomputed from the interface functionals.
    pub fn perturbed(&self, t: usize, dz: &[Scalar]) -> Result<GeneralizedSolution> {
        let mut out = self.clone();
        for (z, d) in out.intervals[t].z.iter_mut().zip(dz) {
            *z += d;
        }
        out.delta = dirac_part(&out.intervals, &out.interfaces, self.n)?;
        Ok(out)
    }
}

fn lateral_jets(iv: &IntervalSolution, x: f64, n: usize) -> Result<CVector> {
    Ok(CVector::from_vec(iv.jet(x, n - 1)?))
}

fn dirac_part(intervals: &[IntervalSolution], interfaces: &[InterfaceSystem], n: usize) -> Result<DeltaPart> {
    let mut out = DeltaPart::new();
    for (s, sys) in interfaces.iter().enumerate() {
        let minus = lateral_jets(&intervals[s], sys.x0, n)?;
        let plus = lateral_jets(&intervals[s + 1], sys.x0, n)?;
        out = out.add(&sys.dirac_part(&minus, &plus));
    }
    Ok(out)
}

/// Extra rows supplied by the initial or boundary condition, each as
/// `(interval, coefficient row over that interval's coordinates, rhs)`.
type ConditionRows = Vec<(usize, Vec<Scalar>, Scalar)>;

fn prepare(spec: &ProblemSpec) -> Result<ProblemSpec> {
    if spec.divergence.is_empty() {
        Ok(spec.clone())
    } else {
        expand_divergence(spec)
    }
}

fn assemble(
    spec: &ProblemSpec,
    anchors: &[f64],
    condition: impl Fn(&[FundamentalSystem], &[(f64, f64)]) -> Result<ConditionRows>,
    opts: SolveOptions,
) -> Result<GeneralizedSolution> {
    let validation = validate(spec)?;
    let n = spec.n;
    let intervals = validation.intervals.clone();
    let points = validation.interface_points.clone();
    let interfaces = exec::try_map(opts.mode, &points, |&x| build_interface_system(spec, x))?;
    let jobs: Vec<usize> = (0..intervals.len()).collect();
    let systems = exec::try_map(opts.mode, &jobs, |&t| {
        let (lo, hi) = intervals[t];
        let ode = SmoothOde::new(spec.interval_coeffs(lo, hi), spec.f.clone());
        fundamental_system(&ode, lo, hi, anchors[t], opts.tol, ExecMode::Sequential)
    })?;

    let extra = condition(&systems, &intervals)?;
    let cols = n * intervals.len();
    let nrows = n * points.len() + extra.len();
    let mut m = CMatrix::zeros(nrows, cols);
    let mut rhs = CVector::zeros(nrows);
    for (s, sys) in interfaces.iter().enumerate() {
        let x = sys.x0;
        let (phi_m, p_m) = systems[s].jets(x, n - 1)?;
        let (phi_p, p_p) = systems[s + 1].jets(x, n - 1)?;
        let to_mat = |rows: &[Vec<Scalar>]| CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let (phi_m, phi_p) = (to_mat(&phi_m), to_mat(&phi_p));
        let (p_m, p_p) = (CVector::from_vec(p_m), CVector::from_vec(p_p));
        let left = -(&sys.a * &phi_m);
        let right = &sys.b * &phi_p;
        m.view_mut((n * s, n * s), (n, n)).copy_from(&left);
        m.view_mut((n * s, n * (s + 1)), (n, n)).copy_from(&right);
        let r = &sys.c - &sys.b * &p_p + &sys.a * &p_m;
        rhs.rows_mut(n * s, n).copy_from(&r);
    }
    for (i, (t, row, v)) in extra.iter().enumerate() {
        let r = n * points.len() + i;
        for (j, c) in row.iter().enumerate() {
            m[(r, n * t + j)] = *c;
        }
        rhs[r] = *v;
    }

    let ls = linalg::solve_min_norm(&m, &rhs);
    let existence = if !ls.consistent(opts.consistency_tol) {
        Existence::None
    } else if ls.nullity() > 0 {
        Existence::AffineFamily(ls.nullity())
    } else {
        Existence::Unique
    };
    let ivs: Vec<IntervalSolution> = systems
        .into_iter()
        .zip(&intervals)
        .enumerate()
        .map(|(t, (system, &(lo, hi)))| IntervalSolution {
            lo,
            hi,
            system,
            z: ls.x.rows(n * t, n).into_owned(),
        })
        .collect();
    let delta = dirac_part(&ivs, &interfaces, n)?;
    Ok(GeneralizedSolution {
        n,
        domain: spec.domain,
        validation,
        intervals: ivs,
        interfaces,
        delta,
        existence,
        kernel: if existence == Existence::None {
            CMatrix::zeros(cols, 0)
        } else {
            ls.kernel
        },
        relative_residual: ls.relative_residual,
    })
}

/// Solves with `psi^(j)(x0) = c[j]`, `j < n`, at a regular point `x0`.
pub fn solve_ivp_global(spec: &ProblemSpec, x0: f64, c: &[Scalar], opts: SolveOptions) -> Result<GeneralizedSolution> {
    let spec = prepare(spec)?;
    let n = spec.n;
    if c.len() != n {
        return Err(Error::Invalid(format!("initial data needs {n} values, got {}", c.len())));
    }
    let (lo, hi) = spec.domain;
    if !(lo <= x0 && x0 <= hi) {
        return Err(Error::Invalid(format!("x0 = {x0} outside the domain")));
    }
    if spec.interface_points().contains(&x0) {
        return Err(Error::Invalid(format!("x0 = {x0} is a singular point")));
    }
    let intervals = spec.intervals();
    let home = intervals.partition_point(|iv| iv.1 < x0);
    let anchors: Vec<f64> = intervals
        .iter()
        .enumerate()
        .map(|(t, &(l, h))| if t == home { x0 } else { 0.5 * (l + h) })
        .collect();
    let cond = |_: &[FundamentalSystem], _: &[(f64, f64)]| -> Result<ConditionRows> {
        // The home system has unit jets at x0, so the rows are z = C.
        Ok((0..n)
            .map(|j| {
                let mut row = vec![re(0.0); n];
                row[j] = re(1.0);
                (home, row, c[j])
            })
            .collect())
    };
    assemble(&spec, &anchors, cond, opts)
}

/// Solves with the given endpoint jet rows.
pub fn solve_bvp_global(spec: &ProblemSpec, rows: &[BoundaryRow], opts: SolveOptions) -> Result<GeneralizedSolution> {
    let spec = prepare(spec)?;
    let n = spec.n;
    if let Some(r) = rows.iter().find(|r| r.jet_order >= n) {
        return Err(Error::Invalid(format!("boundary jet order {} must be below {n}", r.jet_order)));
    }
    let intervals = spec.intervals();
    let anchors: Vec<f64> = intervals.iter().map(|&(l, h)| 0.5 * (l + h)).collect();
    let cond = |sys: &[FundamentalSystem], ivs: &[(f64, f64)]| -> Result<ConditionRows> {
        let last = ivs.len() - 1;
        rows.iter()
            .map(|r| {
                let (t, x) = match r.endpoint {
                    Endpoint::Lo => (0, ivs[0].0),
                    Endpoint::Hi => (last, ivs[last].1),
                };
                let (phi, p) = sys[t].jets(x, n - 1)?;
                Ok((t, phi[r.jet_order].clone(), re(r.value) - p[r.jet_order]))
            })
            .collect()
    };
    assemble(&spec, &anchors, cond, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// Sup of the regular part over the check mesh, relative to the
    /// largest individual term.
    pub piecewise_sup: f64,
    /// Largest Dirac coefficient, relative to the largest Dirac coefficient
    /// of an individual term.
    pub delta_norm: f64,
}

/// Plugs the solution back into the equation through the algebra.
pub fn residual(spec: &ProblemSpec, sol: &GeneralizedSolution) -> Result<Residual> {
    let spec = prepare(spec)?;
    let (lo, hi) = spec.domain;
    let psi = sol.to_dist()?;
    let mut terms = Vec::with_capacity(spec.n + 1);
    let mut d = psi.clone();
    for i in 0..=spec.n {
        if i > 0 {
            d = d.derivative(1)?;
        }
        let ai = spec.a[i].restrict(lo, hi);
        let bi = spec.b[i].restrict(lo, hi);
        terms.push(apply_single(&ai, &bi, &d)?);
    }
    let mut total = DistA::smooth(SmoothExpr::neg(spec.f.clone()));
    for t in &terms {
        total = total.add(t);
    }

    let mut reg = 0.0f64;
    let mut reg_scale = 0.0f64;
    for iv in &sol.intervals {
        let mid = 0.5 * (iv.lo + iv.hi);
        for s in 0..CHECK_POINTS {
            let x = iv.lo + (iv.hi - iv.lo) * s as f64 / (CHECK_POINTS - 1) as f64;
            reg = reg.max(total.piece_at(mid, Side::Right).evaluate(x)?.norm());
            reg_scale = reg_scale.max(spec.f.evaluate(x)?.norm());
            for t in &terms {
                reg_scale = reg_scale.max(t.piece_at(mid, Side::Right).evaluate(x)?.norm());
            }
        }
    }
    let delta_scale = terms.iter().map(|t| t.deltas().max_abs()).fold(0.0, f64::max);
    let rel = |v: f64, s: f64| if s > 0.0 { v / s } else { v };
    Ok(Residual {
        piecewise_sup: rel(reg, reg_scale),
        delta_norm: rel(total.deltas().max_abs(), delta_scale),
    })
}

fn apply_single(a: &DistA, b: &DistA, d: &DistA) -> Result<DistA> {
    Ok(a.star(d)?.add(&d.star(b)?))
}

/// Convenience wrapper used by tests and the CLI.
pub fn operator(spec: &ProblemSpec, psi: &DistA) -> Result<DistA> {
    let spec = prepare(spec)?;
    apply_operator(&spec.a, &spec.b, psi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRow {
    pub x: f64,
    /// Set at interface points, where both lateral values are reported.
    pub side: Option<Side>,
    /// `psi^(0..n)`.
    pub jet: Vec<Scalar>,
}

/// Values and derivatives `0..n-1` on a mesh; mesh points outside the
/// domain are skipped.
pub fn sample_solution(sol: &GeneralizedSolution, mesh: &[f64]) -> Result<Vec<SampleRow>> {
    let (lo, hi) = sol.domain;
    let points: Vec<f64> = sol.interfaces.iter().map(|s| s.x0).collect();
    let mut out = Vec::with_capacity(mesh.len());
    for &x in mesh {
        if x < lo || x > hi {
            continue;
        }
        if points.contains(&x) {
            for side in [Side::Left, Side::Right] {
                out.push(SampleRow {
                    x,
                    side: Some(side),
                    jet: sol.jet(x, side, sol.n - 1)?,
                });
            }
        } else {
            out.push(SampleRow {
                x,
                side: None,
                jet: sol.jet(x, Side::Right, sol.n - 1)?,
            });
        }
    }
    Ok(out)
}
