//! Problem description, divergence-form expansion and validation.

use serde::{Deserialize, Serialize};

use crate::binom;
use crate::dist_algebra::{DistA, DistAJson, Side};
use crate::error::{Error, Result};
use crate::smooth_fn::{parse_expr, SmoothExpr};
use crate::Scalar;

/// Samples per closed regular interval for the leading-coefficient check.
pub const LEADING_SAMPLES: usize = 129;
/// A leading coefficient this small relative to its magnitude counts as 0.
pub const LEADING_TOL: f64 = 1e-12;

/// `D^outer(left * w^(inner)) + D^outer(w^(inner) * right)`.
#[derive(Clone, Debug)]
pub struct DivergenceTerm {
    pub outer: usize,
    pub inner: usize,
    pub left: Option<DistA>,
    pub right: Option<DistA>,
}

/// `sum_i (a_i * psi^(i) + psi^(i) * b_i) = f` on a closed interval, plus
/// optional divergence-form terms.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub n: usize,
    pub a: Vec<DistA>,
    pub b: Vec<DistA>,
    pub f: SmoothExpr,
    pub domain: (f64, f64),
    pub divergence: Vec<DivergenceTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Lo,
    Hi,
}

/// `psi^(jet_order)(endpoint) = value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryRow {
    pub endpoint: Endpoint,
    pub jet_order: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Condition {
    Ivp {
        x0: f64,
        #[serde(rename = "C")]
        c: Vec<f64>,
    },
    Bvp {
        rows: Vec<BoundaryRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceJson {
    pub outer: usize,
    pub inner: usize,
    #[serde(default)]
    pub left: Option<DistAJson>,
    #[serde(default)]
    pub right: Option<DistAJson>,
}

/// Wire form of a problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    pub n: usize,
    #[serde(default)]
    pub a: Vec<DistAJson>,
    #[serde(default)]
    pub b: Vec<DistAJson>,
    pub f: String,
    pub domain: [f64; 2],
    #[serde(default)]
    pub divergence_terms: Vec<DivergenceJson>,
    pub condition: Condition,
}

impl ProblemJson {
    pub fn to_spec(&self) -> Result<ProblemSpec> {
        let conv = |v: &[DistAJson]| v.iter().map(DistAJson::to_dist).collect::<Result<Vec<_>>>();
        let divergence = self
            .divergence_terms
            .iter()
            .map(|t| {
                Ok(DivergenceTerm {
                    outer: t.outer,
                    inner: t.inner,
                    left: t.left.as_ref().map(DistAJson::to_dist).transpose()?,
                    right: t.right.as_ref().map(DistAJson::to_dist).transpose()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ProblemSpec::new(
            self.n,
            conv(&self.a)?,
            conv(&self.b)?,
            parse_expr(&self.f)?,
            (self.domain[0], self.domain[1]),
            divergence,
        )
    }
}

impl ProblemSpec {
    /// Coefficient lists shorter than `n + 1` are padded with zeros.
    pub fn new(
        n: usize,
        mut a: Vec<DistA>,
        mut b: Vec<DistA>,
        f: SmoothExpr,
        domain: (f64, f64),
        divergence: Vec<DivergenceTerm>,
    ) -> Result<Self> {
        let n = divergence.iter().map(|t| t.outer + t.inner).fold(n, usize::max);
        if n == 0 {
            return Err(Error::Invalid("order must be at least 1".into()));
        }
        if a.len() > n + 1 || b.len() > n + 1 {
            return Err(Error::Invalid(format!("more than {} coefficients for order {n}", n + 1)));
        }
        a.resize(n + 1, DistA::zero());
        b.resize(n + 1, DistA::zero());
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Invalid(format!("bad domain [{lo}, {hi}]")));
        }
        Ok(ProblemSpec {
            n,
            a,
            b,
            f,
            domain,
            divergence,
        })
    }

    /// Plain smooth ODE `sum_i c_i psi^(i) = f`, coefficients on the left.
    pub fn smooth(coeffs: Vec<SmoothExpr>, f: SmoothExpr, domain: (f64, f64)) -> Result<Self> {
        let n = coeffs.len().saturating_sub(1);
        let a = coeffs.into_iter().map(DistA::smooth).collect();
        Self::new(n, a, Vec::new(), f, domain, Vec::new())
    }

    /// Interior breakpoints of all coefficients, sorted.
    pub fn interface_points(&self) -> Vec<f64> {
        let (lo, hi) = self.domain;
        let mut pts: Vec<f64> = self
            .a
            .iter()
            .chain(&self.b)
            .flat_map(|c| c.breakpoints().iter().copied())
            .filter(|&x| x > lo && x < hi)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Closed regular intervals between consecutive interface points.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let (lo, hi) = self.domain;
        let mut edges = vec![lo];
        edges.extend(self.interface_points());
        edges.push(hi);
        edges.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Largest distributional order of a coefficient inside the domain.
    pub fn max_order(&self) -> usize {
        let (lo, hi) = self.domain;
        self.a
            .iter()
            .chain(&self.b)
            .map(|c| c.restrict(lo, hi).dist_order())
            .max()
            .unwrap_or(0)
    }

    /// Smooth coefficients `c_i = a_i + b_i` on the regular interval
    /// containing `x` from the given side.
    pub fn lateral_coeffs(&self, x: f64, side: Side) -> Vec<SmoothExpr> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| SmoothExpr::add(a.piece_at(x, side).clone(), b.piece_at(x, side).clone()))
            .collect()
    }

    /// Coefficients on the open interval `(lo, hi)`, which must be regular.
    pub fn interval_coeffs(&self, lo: f64, hi: f64) -> Vec<SmoothExpr> {
        self.lateral_coeffs(0.5 * (lo + hi), Side::Right)
    }
}

/// Rewrites divergence terms into standard form by the Leibniz rule:
/// `D^m(a * w^(k)) = sum_j C(m,j) a^(m-j) * w^(k+j)`, and symmetrically for
/// right coefficients.
pub fn expand_divergence(spec: &ProblemSpec) -> Result<ProblemSpec> {
    let mut a = spec.a.clone();
    let mut b = spec.b.clone();
    for t in &spec.divergence {
        for (coef, target) in [(&t.left, &mut a), (&t.right, &mut b)] {
            let Some(c) = coef else { continue };
            for j in 0..=t.outer {
                let d = c.derivative(t.outer - j)?.scale(Scalar::new(binom(t.outer, j), 0.0));
                let slot = &mut target[t.inner + j];
                *slot = slot.add(&d);
            }
        }
    }
    let pts: Vec<f64> = a
        .iter()
        .chain(&b)
        .flat_map(|c| c.breakpoints().iter().copied())
        .collect();
    let refine = |v: Vec<DistA>| -> Vec<DistA> { v.into_iter().map(|c| c.canonicalize().refined_at(&pts)).collect() };
    Ok(ProblemSpec {
        n: spec.n,
        a: refine(a),
        b: refine(b),
        f: spec.f.clone(),
        domain: spec.domain,
        divergence: Vec::new(),
    })
}

/// Whether the highest coefficient order exceeds the equation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `M <= n`: solutions carry no Dirac part.
    Regular,
    /// `M > n`: the Dirac part has order at most `M - n`.
    Singular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub regime: Regime,
    pub interface_points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

fn vanishes(samples: &[Scalar]) -> Option<usize> {
    let mag = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = LEADING_TOL * mag.max(1.0);
    samples.iter().position(|v| v.norm() <= tol)
}

/// Checks sectional regularity and the interface pivots; the problem must
/// already be in standard form (see [`expand_divergence`]).
pub fn validate(spec: &ProblemSpec) -> Result<ValidationReport> {
    if !spec.divergence.is_empty() {
        return validate(&expand_divergence(spec)?);
    }
    let (lo, hi) = spec.domain;
    let n = spec.n;
    for c in spec.a.iter().chain(&spec.b) {
        if c.deltas().terms().iter().any(|t| t.x == lo || t.x == hi) {
            return Err(Error::Invalid("Dirac terms at a domain endpoint are not supported".into()));
        }
    }
    spec.f.check_pole_free(lo, hi, LEADING_SAMPLES)?;
    let intervals = spec.intervals();
    for &(l, h) in &intervals {
        let coeffs = spec.interval_coeffs(l, h);
        for c in &coeffs {
            c.check_pole_free(l, h, LEADING_SAMPLES)?;
        }
        let xs: Vec<f64> = (0..LEADING_SAMPLES)
            .map(|s| l + (h - l) * s as f64 / (LEADING_SAMPLES - 1) as f64)
            .collect();
        let vals = xs
            .iter()
            .map(|&x| coeffs[n].evaluate(x))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if let Some(i) = vanishes(&vals) {
            return Err(Error::SectionallySingular { x: xs[i] });
        }
    }
    let points = spec.interface_points();
    for &x in &points {
        let am = spec.a[n].lateral_value(x, Side::Left)?;
        let bp = spec.b[n].lateral_value(x, Side::Right)?;
        let scale = am.norm() + bp.norm();
        if (am + bp).norm() <= LEADING_TOL * scale.max(1.0) {
            return Err(Error::DegenerateInterface { x });
        }
    }
    let m = spec.max_order();
    Ok(ValidationReport {
        n,
        m,
        regime: if m > n { Regime::Singular } else { Regime::Regular },
        interface_points: points,
        intervals,
    })
}
