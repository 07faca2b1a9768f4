//! Cracked two-segment clamped-clamped Euler-Bernoulli beam.
//!
//! The beam occupies `[-L, L]` with flexural stiffness `A` on the left and
//! `B` on the right; a crack at 0 enters as Dirac terms in the stiffness:
//! `[(A H_- - 2ALK0 delta) * w'' + w'' * (B H - 2BLK1 delta)]'' = C`.

use serde::{Deserialize, Serialize};

use crate::dist_algebra::{DistA, Side};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::solver::{
    self, BoundaryRow, DivergenceTerm, Endpoint, Existence, GeneralizedSolution, ProblemSpec, Residual,
    SolveOptions,
};
use crate::smooth_fn::SmoothExpr;
use crate::{re, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "K0")]
    pub k0: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
}

impl BeamSpec {
    pub fn new(a: f64, b: f64, l: f64, c: f64, k0: f64, k1: f64) -> Self {
        BeamSpec { a, b, l, c, k0, k1 }
    }

    pub fn check(&self) -> Result<()> {
        let all = [self.a, self.b, self.l, self.c, self.k0, self.k1];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("beam parameters must be finite".into()));
        }
        if self.a <= 0.0 || self.b <= 0.0 || self.l <= 0.0 {
            return Err(Error::Invalid("A, B and L must be positive".into()));
        }
        if self.k0 < 0.0 || self.k1 < 0.0 {
            return Err(Error::Invalid("crack intensities K0, K1 must be non-negative".into()));
        }
        Ok(())
    }

    /// Left and right stiffness coefficients.
    pub fn stiffness(&self) -> (DistA, DistA) {
        let crack = |s: f64, k: f64| DistA::delta_scaled(0.0, 0, re(-2.0 * s * self.l * k));
        (
            DistA::heaviside_minus(0.0).scale(self.a).add(&crack(self.a, self.k0)),
            DistA::heaviside(0.0).scale(self.b).add(&crack(self.b, self.k1)),
        )
    }
}

/// The eight integration constants of the two quartic pieces
/// `w_±(x) = C/(24 A_±) x^4 + α_±/6 x^3 + β_±/2 x^2 + γ_± x + ε_±`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamConstants {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub eps_minus: f64,
    pub eps_plus: f64,
}

impl BeamConstants {
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.alpha_minus,
            self.alpha_plus,
            self.beta_minus,
            self.beta_plus,
            self.gamma_minus,
            self.gamma_plus,
            self.eps_minus,
            self.eps_plus,
        ]
    }

    /// Largest deviation from `other`, each constant measured relative to
    /// `max(|value|, natural scale)`. The natural scale `|C| L^p / A_±`
    /// of a constant multiplying `x^(3-p)` keeps constants that vanish by
    /// symmetry (α_± when A = B) from dividing by zero.
    pub fn max_rel_diff(&self, other: &BeamConstants, spec: &BeamSpec) -> f64 {
        let scale = natural_scales(spec);
        self.as_array()
            .iter()
            .zip(other.as_array())
            .zip(scale)
            .map(|((x, y), s)| (x - y).abs() / y.abs().max(s))
            .fold(0.0, f64::max)
    }
}

fn natural_scales(spec: &BeamSpec) -> [f64; 8] {
    let c = spec.c.abs().max(f64::MIN_POSITIVE);
    let mut out = [0.0; 8];
    for p in 0..4 {
        out[2 * p] = c * spec.l.powi(p as i32 + 1) / spec.a;
        out[2 * p + 1] = c * spec.l.powi(p as i32 + 1) / spec.b;
    }
    out
}

/// `S = CL(A² − 34AB + B²) / (A² + 14AB + B² + 8(A²K0 + B²K1))`.
pub fn s_parameter(spec: &BeamSpec) -> f64 {
    let (a, b, l, c) = (spec.a, spec.b, spec.l, spec.c);
    c * l * (a * a - 34.0 * a * b + b * b) / (a * a + 14.0 * a * b + b * b + 8.0 * (a * a * spec.k0 + b * b * spec.k1))
}

/// Integration constants in closed form.
pub fn beam_closed_form(spec: &BeamSpec) -> BeamConstants {
    let (a, b, l, c) = (spec.a, spec.b, spec.l, spec.c);
    let s = s_parameter(spec);
    let alpha = (b - a) * (3.0 * l * c + s) / (8.0 * (a + b));
    let eps = (3.0 * c * l.powi(4) + l.powi(3) * s) / (12.0 * (a + b));
    BeamConstants {
        alpha_minus: alpha / a,
        alpha_plus: alpha / b,
        beta_minus: l * s / (12.0 * a),
        beta_plus: l * s / (12.0 * b),
        gamma_minus: (c * l.powi(3) * (17.0 * a - b) + l * l * s * (7.0 * a + b)) / (48.0 * a * (a + b)),
        // Sign fixed so that w' is odd when A = B; the conditions at the
        // crack and the clamped ends force this value.
        gamma_plus: (c * l.powi(3) * (a - 17.0 * b) - l * l * s * (a + 7.0 * b)) / (48.0 * b * (a + b)),
        eps_minus: eps,
        eps_plus: eps,
    }
}

/// Fourth-order problem in divergence form with clamped ends.
pub fn beam_to_problem(spec: &BeamSpec) -> Result<(ProblemSpec, Vec<BoundaryRow>)> {
    beam_to_problem_with_axial(spec, None)
}

/// As [`beam_to_problem`] with axial-force terms `P0 * w'' + w'' * P1`.
pub fn beam_to_problem_with_axial(
    spec: &BeamSpec,
    axial: Option<(DistA, DistA)>,
) -> Result<(ProblemSpec, Vec<BoundaryRow>)> {
    spec.check()?;
    let (left, right) = spec.stiffness();
    let (mut a, mut b) = (vec![DistA::zero(); 5], vec![DistA::zero(); 5]);
    if let Some((p0, p1)) = axial {
        a[2] = p0;
        b[2] = p1;
    }
    let problem = ProblemSpec::new(
        4,
        a,
        b,
        SmoothExpr::real(spec.c),
        (-spec.l, spec.l),
        vec![DivergenceTerm {
            outer: 2,
            inner: 2,
            left: Some(left),
            right: Some(right),
        }],
    )?;
    let problem = solver::expand_divergence(&problem)?;
    let rows = [Endpoint::Lo, Endpoint::Hi]
        .into_iter()
        .flat_map(|endpoint| {
            (0..2).map(move |jet_order| BoundaryRow {
                endpoint,
                jet_order,
                value: 0.0,
            })
        })
        .collect();
    Ok((problem, rows))
}

#[derive(Clone, Debug)]
pub struct BeamSolution {
    pub spec: BeamSpec,
    pub problem: ProblemSpec,
    pub w: GeneralizedSolution,
    pub constants: BeamConstants,
    /// `w'(0+) - w'(0-)`.
    pub slope_jump: f64,
    /// `psi = w''` including its Dirac part.
    pub psi: DistA,
    pub residual: Residual,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub x: f64,
    pub w: f64,
    pub w1: f64,
}

fn real_jet(sol: &GeneralizedSolution, x: f64, side: Side) -> Result<Vec<f64>> {
    Ok(sol.jet(x, side, 3)?.iter().map(|v: &Scalar| v.re).collect())
}

pub fn solve_beam(spec: &BeamSpec, opts: SolveOptions) -> Result<BeamSolution> {
    let (problem, rows) = beam_to_problem(spec)?;
    let w = solver::solve_bvp_global(&problem, &rows, opts)?;
    if w.existence != Existence::Unique {
        return Err(Error::Invalid(format!("clamped beam solve returned {:?}", w.existence)));
    }
    let jm = real_jet(&w, 0.0, Side::Left)?;
    let jp = real_jet(&w, 0.0, Side::Right)?;
    let constants = BeamConstants {
        alpha_minus: jm[3],
        alpha_plus: jp[3],
        beta_minus: jm[2],
        beta_plus: jp[2],
        gamma_minus: jm[1],
        gamma_plus: jp[1],
        eps_minus: jm[0],
        eps_plus: jp[0],
    };
    let psi = w.to_dist()?.derivative(2)?;
    let residual = solver::residual(&problem, &w)?;
    Ok(BeamSolution {
        spec: spec.clone(),
        problem,
        slope_jump: jp[1] - jm[1],
        w,
        constants,
        psi,
        residual,
    })
}

/// Independent solves over a parameter grid; output keeps input order.
pub fn solve_beams(specs: &[BeamSpec], mode: ExecMode) -> Result<Vec<BeamSolution>> {
    let opts = SolveOptions {
        mode: ExecMode::Sequential,
        ..SolveOptions::default()
    };
    exec::try_map(mode, specs, |s| solve_beam(s, opts))
}

impl BeamSolution {
    /// Slope jump predicted by the crack: `2L/(A+B) (A K0 β_+ + B K1 β_-)`.
    pub fn predicted_slope_jump(&self) -> f64 {
        let s = &self.spec;
        2.0 * s.l / (s.a + s.b) * (s.a * s.k0 * self.constants.beta_plus + s.b * s.k1 * self.constants.beta_minus)
    }

    /// `w` and `w'` on a uniform mesh of `npoints` over `[-L, L]`. At the
    /// crack the right-hand values are reported.
    pub fn emit_curves(&self, npoints: usize) -> Result<Vec<CurveRow>> {
        let l = self.spec.l;
        let n = npoints.max(2);
        (0..npoints)
            .map(|i| {
                let x = if i + 1 == n { l } else { -l + 2.0 * l * i as f64 / (n - 1) as f64 };
                let j = self.w.jet(x, Side::Right, 1)?;
                Ok(CurveRow { x, w: j[0].re, w1: j[1].re })
            })
            .collect()
    }
}

pub fn curves_csv(rows: &[CurveRow]) -> String {
    let mut s = String::from("x,w,w1\n");
    for r in rows {
        s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", r.x, r.w, r.w1));
    }
    s
}
