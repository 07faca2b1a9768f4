//! The algebra of piecewise-smooth functions plus finite Dirac combinations.
//!
//! An element is stored as sorted breakpoints `x_1 < ... < x_m`, one smooth
//! piece per open interval (`m + 1` pieces, the outer two unbounded), and a
//! [`DeltaPart`]. After [`DistA::canonicalize`] every delta point is also a
//! breakpoint. Breakpoints whose lateral pieces agree are allowed; they are
//! harmless for every operation and [`DistA::sing_supp`] filters them out.

mod delta;
mod json;
mod primitive;

use std::fmt;
use std::sync::Arc;

pub use delta::{expand_into, DeltaPart, DeltaTerm};
pub use json::{DeltaJson, DistAJson};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::smooth_fn::SmoothExpr;
use crate::{re, Scalar};
use primitive::Primitive;

/// Default jet depth for singular-support detection.
pub const SING_SUPP_JET: usize = 8;
const SING_SUPP_TOL: f64 = 1e-9;
const EQUALS_SAMPLES: usize = 33;

#[derive(Clone, Debug, PartialEq)]
pub struct DistA {
    breakpoints: Vec<f64>,
    pieces: Vec<SmoothExpr>,
    deltas: DeltaPart,
}

/// Which lateral limit to take at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `sum_j C(k,j) (-1)^j g^(j)(x0) delta^(k-j)(x - x0)`, the product of a
/// smooth function with `delta^(k)(x - x0)`.
pub fn dual_smooth_delta(g: &SmoothExpr, x0: f64, k: usize) -> Result<DeltaPart> {
    let jet = g.eval_jet(x0, k)?;
    let mut out = DeltaPart::new();
    expand_into(&mut out, &jet, x0, k, re(1.0));
    Ok(out)
}

impl DistA {
    pub fn zero() -> Self {
        Self::smooth(SmoothExpr::zero())
    }

    pub fn smooth(e: SmoothExpr) -> Self {
        DistA {
            breakpoints: Vec::new(),
            pieces: vec![e],
            deltas: DeltaPart::new(),
        }
    }

    /// `H(x - x0)`, right-continuous.
    pub fn heaviside(x0: f64) -> Self {
        DistA {
            breakpoints: vec![x0],
            pieces: vec![SmoothExpr::zero(), SmoothExpr::one()],
            deltas: DeltaPart::new(),
        }
    }

    /// `H_-(x - x0) = 1 - H(x - x0)`.
    pub fn heaviside_minus(x0: f64) -> Self {
        DistA {
            breakpoints: vec![x0],
            pieces: vec![SmoothExpr::one(), SmoothExpr::zero()],
            deltas: DeltaPart::new(),
        }
    }

    pub fn delta(x0: f64, order: usize) -> Self {
        Self::delta_scaled(x0, order, re(1.0))
    }

    pub fn delta_scaled(x0: f64, order: usize, coef: Scalar) -> Self {
        DistA {
            breakpoints: Vec::new(),
            pieces: vec![SmoothExpr::zero()],
            deltas: DeltaPart::single(x0, order, coef),
        }
        .canonicalize()
    }

    /// Builds from raw parts; breakpoints must be strictly increasing and
    /// there must be exactly one more piece than breakpoints.
    pub fn from_parts(
        breakpoints: Vec<f64>,
        pieces: Vec<SmoothExpr>,
        deltas: DeltaPart,
    ) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Invalid(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Invalid("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("breakpoints must be strictly increasing".into()));
        }
        if deltas.terms().iter().any(|t| !t.x.is_finite()) {
            return Err(Error::Invalid("delta points must be finite".into()));
        }
        Ok(DistA {
            breakpoints,
            pieces,
            deltas,
        }
        .canonicalize())
    }

    pub fn piecewise(breakpoints: Vec<f64>, pieces: Vec<SmoothExpr>) -> Result<Self> {
        Self::from_parts(breakpoints, pieces, DeltaPart::new())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[SmoothExpr] {
        &self.pieces
    }

    pub fn deltas(&self) -> &DeltaPart {
        &self.deltas
    }

    /// Same distribution with the Dirac part dropped.
    pub fn regular_part(&self) -> DistA {
        DistA {
            deltas: DeltaPart::new(),
            ..self.clone()
        }
    }

    pub fn with_deltas(&self, deltas: DeltaPart) -> DistA {
        DistA {
            deltas,
            ..self.clone()
        }
        .canonicalize()
    }

    /// Drops zero deltas, merges duplicate breakpoints and inserts every
    /// delta point as a breakpoint.
    pub fn canonicalize(mut self) -> DistA {
        let mut k = 1;
        while k < self.breakpoints.len() {
            if self.breakpoints[k] == self.breakpoints[k - 1] {
                self.breakpoints.remove(k);
                self.pieces.remove(k);
            } else {
                k += 1;
            }
        }
        for x in self.deltas.points() {
            self.insert_breakpoint(x);
        }
        self
    }

    fn insert_breakpoint(&mut self, x: f64) {
        if let Err(i) = self.breakpoints.binary_search_by(|b| b.total_cmp(&x)) {
            self.breakpoints.insert(i, x);
            let p = self.pieces[i].clone();
            self.pieces.insert(i, p);
        }
    }

    /// Index of the piece immediately to the given side of `x`.
    pub fn piece_index(&self, x: f64, side: Side) -> usize {
        match side {
            Side::Left => self.breakpoints.partition_point(|&b| b < x),
            Side::Right => self.breakpoints.partition_point(|&b| b <= x),
        }
    }

    pub fn piece_at(&self, x: f64, side: Side) -> &SmoothExpr {
        &self.pieces[self.piece_index(x, side)]
    }

    /// Lateral limit of the regular part.
    pub fn lateral_value(&self, x: f64, side: Side) -> Result<Scalar> {
        Ok(self.piece_at(x, side).evaluate(x)?)
    }

    /// Lateral derivatives `0..=maxk` of the regular part.
    pub fn lateral_jet(&self, x: f64, side: Side, maxk: usize) -> Result<Vec<Scalar>> {
        Ok(self.piece_at(x, side).eval_jet(x, maxk)?)
    }

    /// Rewrites both operands over the union of their breakpoints.
    pub fn refine(&self, other: &DistA) -> (DistA, DistA) {
        let mut a = self.clone();
        let mut b = other.clone();
        for &x in &other.breakpoints {
            a.insert_breakpoint(x);
        }
        for &x in &self.breakpoints {
            b.insert_breakpoint(x);
        }
        (a, b)
    }

    /// Adds extra (false) breakpoints.
    pub fn refined_at(&self, points: &[f64]) -> DistA {
        let mut a = self.clone();
        for &x in points {
            a.insert_breakpoint(x);
        }
        a
    }

    pub fn add(&self, other: &DistA) -> DistA {
        let (a, b) = self.refine(other);
        DistA {
            breakpoints: a.breakpoints,
            pieces: a
                .pieces
                .into_iter()
                .zip(b.pieces)
                .map(|(p, q)| SmoothExpr::add(p, q))
                .collect(),
            deltas: a.deltas.add(&b.deltas),
        }
    }

    pub fn sub(&self, other: &DistA) -> DistA {
        self.add(&other.scale(re(-1.0)))
    }

    pub fn scale(&self, c: impl Into<Scalar>) -> DistA {
        let c = c.into();
        DistA {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| SmoothExpr::scale(c, p.clone()))
                .collect(),
            deltas: self.deltas.scale(c),
        }
    }

    /// Multiplies every piece by a globally smooth function (the dual product
    /// on the regular part; deltas are expanded).
    pub fn mul_smooth(&self, g: &SmoothExpr) -> Result<DistA> {
        self.star(&DistA::smooth(g.clone()))
    }

    /// The intrinsic product.
    ///
    /// On the regular part this is the pointwise product of pieces. A Dirac
    /// term of the left factor at `x_i` is multiplied by the right factor's
    /// piece to the right of `x_i`; a Dirac term of the right factor by the
    /// left factor's piece to the left of `x_i`.
    pub fn star(&self, other: &DistA) -> Result<DistA> {
        let (f, g) = self.refine(other);
        let mut deltas = DeltaPart::new();
        for t in f.deltas.terms() {
            let k = f.breakpoint_index(t.x);
            let jet = g.pieces[k + 1].eval_jet(t.x, t.order)?;
            expand_into(&mut deltas, &jet, t.x, t.order, t.coef);
        }
        for t in g.deltas.terms() {
            let k = g.breakpoint_index(t.x);
            let jet = f.pieces[k].eval_jet(t.x, t.order)?;
            expand_into(&mut deltas, &jet, t.x, t.order, t.coef);
        }
        Ok(DistA {
            breakpoints: f.breakpoints,
            pieces: f
                .pieces
                .into_iter()
                .zip(g.pieces)
                .map(|(p, q)| SmoothExpr::mul(p, q))
                .collect(),
            deltas,
        })
    }

    fn breakpoint_index(&self, x: f64) -> usize {
        self.breakpoints
            .binary_search_by(|b| b.total_cmp(&x))
            .expect("delta points are breakpoints in canonical form")
    }

    /// `k`-th distributional derivative.
    pub fn derivative(&self, k: usize) -> Result<DistA> {
        let mut d = self.clone();
        for _ in 0..k {
            d = d.derivative1()?;
        }
        Ok(d)
    }

    fn derivative1(&self) -> Result<DistA> {
        let mut deltas = self.deltas.shift_orders(1);
        for (k, &x) in self.breakpoints.iter().enumerate() {
            let (l, r) = (&self.pieces[k], &self.pieces[k + 1]);
            if l != r {
                deltas.insert(x, 0, r.evaluate(x)? - l.evaluate(x)?);
            }
        }
        Ok(DistA {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.differentiate(1)).collect(),
            deltas,
        })
    }

    /// A distribution whose derivative is `self`.
    ///
    /// Pieces are integrated numerically. The leftmost piece vanishes at the
    /// first breakpoint (at 0 without breakpoints); each further constant is
    /// fixed so the regular part is continuous except for the jumps forced
    /// by order-0 deltas.
    pub fn antiderivative(&self) -> Result<DistA> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut deltas = DeltaPart::new();
        for t in self.deltas.terms() {
            if t.order > 0 {
                deltas.insert(t.x, t.order - 1, t.coef);
            }
        }
        let first = self.breakpoints.first().copied().unwrap_or(0.0);
        let mut anchor = first;
        let mut offset = re(0.0);
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                let x = self.breakpoints[k - 1];
                let prev: &SmoothExpr = &pieces[k - 1];
                offset = prev.evaluate(x)? + self.deltas.coef(x, 0);
                anchor = x;
            }
            pieces.push(Primitive::expr(p, anchor, offset));
        }
        Ok(DistA {
            breakpoints: self.breakpoints.clone(),
            pieces,
            deltas,
        })
    }

    /// Restriction to the open interval `(lo, hi)`; infinite ends allowed.
    pub fn restrict(&self, lo: f64, hi: f64) -> DistA {
        let k0 = self.breakpoints.partition_point(|&b| b <= lo);
        let k1 = self.breakpoints.partition_point(|&b| b < hi).max(k0);
        DistA {
            breakpoints: self.breakpoints[k0..k1].to_vec(),
            pieces: self.pieces[k0..=k1].to_vec(),
            deltas: self.deltas.filter(|x| x > lo && x < hi),
        }
    }

    /// Points where the distribution is not locally smooth, using lateral
    /// jets up to order `jet`.
    pub fn sing_supp_with(&self, jet: usize) -> Vec<f64> {
        let delta_points = self.deltas.points();
        self.breakpoints
            .iter()
            .enumerate()
            .filter(|&(k, &x)| {
                if delta_points.contains(&x) {
                    return true;
                }
                let (l, r) = (&self.pieces[k], &self.pieces[k + 1]);
                if l == r {
                    return false;
                }
                match (l.eval_jet(x, jet), r.eval_jet(x, jet)) {
                    (Ok(a), Ok(b)) => a.iter().zip(&b).any(|(u, v)| {
                        (u - v).norm() > SING_SUPP_TOL * (1.0 + u.norm().max(v.norm()))
                    }),
                    _ => true,
                }
            })
            .map(|(_, &x)| x)
            .collect()
    }

    pub fn sing_supp(&self) -> Vec<f64> {
        self.sing_supp_with(SING_SUPP_JET)
    }

    /// 0 without deltas, otherwise one more than the highest delta order.
    pub fn dist_order(&self) -> usize {
        self.deltas.max_order().map_or(0, |m| m + 1)
    }

    /// `<F, t>` for a test function supported in `[lo, hi]`.
    pub fn pair_with_test(&self, t: &SmoothExpr, lo: f64, hi: f64) -> Result<Scalar> {
        self.pair_with_test_split(t, lo, hi, &[])
    }

    /// As [`pair_with_test`](Self::pair_with_test) with extra quadrature
    /// split points.
    pub fn pair_with_test_split(
        &self,
        t: &SmoothExpr,
        lo: f64,
        hi: f64,
        splits: &[f64],
    ) -> Result<Scalar> {
        let mut total = re(0.0);
        for (k, p) in self.pieces.iter().enumerate() {
            let a = if k == 0 { lo } else { self.breakpoints[k - 1].max(lo) };
            let b = if k == self.breakpoints.len() {
                hi
            } else {
                self.breakpoints[k].min(hi)
            };
            if b <= a || p.is_zero() {
                continue;
            }
            let prod = SmoothExpr::mul(p.clone(), t.clone());
            total += quadrature::integrate(
                |x| Ok(prod.evaluate(x)?),
                a,
                b,
                splits,
                quadrature::DEFAULT_ABS_TOL,
            )?;
        }
        for d in self.deltas.terms() {
            if d.x < lo || d.x > hi {
                continue;
            }
            let jet = t.eval_jet(d.x, d.order)?;
            let sign = if d.order % 2 == 0 { 1.0 } else { -1.0 };
            total += d.coef * jet[d.order] * sign;
        }
        Ok(total)
    }

    /// Sampled equality over a window covering all breakpoints of both
    /// operands (one unit beyond the outermost).
    pub fn equals(&self, other: &DistA, tol: f64) -> bool {
        let pts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        let lo = pts.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = pts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if pts.is_empty() {
            self.equals_on(other, tol, -1.0, 1.0)
        } else {
            self.equals_on(other, tol, lo - 1.0, hi + 1.0)
        }
    }

    /// Delta coefficients within `tol` absolutely; pieces within
    /// `tol * (1 + |v|)` at 33 interior samples per interval of the common
    /// refinement clipped to `[lo, hi]`.
    pub fn equals_on(&self, other: &DistA, tol: f64, lo: f64, hi: f64) -> bool {
        let (a, b) = self.refine(other);
        let dd = a.deltas.add(&b.deltas.scale(re(-1.0)));
        if dd.terms().iter().any(|t| t.coef.norm() > tol) {
            return false;
        }
        for (k, (p, q)) in a.pieces.iter().zip(&b.pieces).enumerate() {
            if p == q {
                continue;
            }
            let l = if k == 0 { lo } else { a.breakpoints[k - 1].max(lo) };
            let r = if k == a.breakpoints.len() {
                hi
            } else {
                a.breakpoints[k].min(hi)
            };
            if r <= l {
                continue;
            }
            for s in 0..EQUALS_SAMPLES {
                let x = l + (r - l) * (s as f64 + 0.5) / EQUALS_SAMPLES as f64;
                match (p.evaluate(x), q.evaluate(x)) {
                    (Ok(u), Ok(v)) => {
                        if (u - v).norm() > tol * (1.0 + u.norm().max(v.norm())) {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
        }
        true
    }

    /// Checks every piece for poles and non-finite values on its closed
    /// interval intersected with `[lo, hi]` by dense sampling.
    pub fn check_pole_free(&self, lo: f64, hi: f64, samples: usize) -> Result<()> {
        for (k, p) in self.pieces.iter().enumerate() {
            let a = if k == 0 { lo } else { self.breakpoints[k - 1].max(lo) };
            let b = if k == self.breakpoints.len() {
                hi
            } else {
                self.breakpoints[k].min(hi)
            };
            if b < a {
                continue;
            }
            p.check_pole_free(a, b, samples)?;
        }
        Ok(())
    }

    /// Wraps every piece in an opaque numeric leaf; used to feed numeric
    /// solutions through the algebra.
    pub fn from_numeric(
        breakpoints: Vec<f64>,
        pieces: Vec<Arc<dyn crate::smooth_fn::JetFn>>,
        deltas: DeltaPart,
    ) -> Result<DistA> {
        Self::from_parts(
            breakpoints,
            pieces.into_iter().map(SmoothExpr::opaque).collect(),
            deltas,
        )
    }
}

impl fmt::Display for DistA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pieces[0])?;
        for (x, p) in self.breakpoints.iter().zip(&self.pieces[1..]) {
            write!(f, " |{x}| {p}")?;
        }
        for t in self.deltas.terms() {
            write!(f, " + ({}) d^({})(x - {})", t.coef, t.order, t.x)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth_fn::parse_expr;

    fn e(s: &str) -> SmoothExpr {
        parse_expr(s).unwrap()
    }

    fn h() -> DistA {
        DistA::heaviside(0.0)
    }

    fn d(k: usize) -> DistA {
        DistA::delta(0.0, k)
    }

    #[test]
    fn canonicalize_examples() {
        let raw = DistA {
            breakpoints: vec![0.0],
            pieces: vec![SmoothExpr::zero(), SmoothExpr::one()],
            deltas: DeltaPart::single(3.0, 0, re(0.0)),
        }
        .canonicalize();
        assert_eq!(raw, h());
        let dl = DistA::delta(1.0, 0);
        assert_eq!(dl.breakpoints(), &[1.0]);
        assert_eq!(dl.pieces(), &[SmoothExpr::zero(), SmoothExpr::zero()]);
        assert_eq!(dl.deltas().coef(1.0, 0), re(1.0));
        let one = DistA::heaviside_minus(0.0).add(&h());
        assert_eq!(one.breakpoints(), &[0.0]);
        assert!(one.sing_supp().is_empty());
    }

    #[test]
    fn refine_examples() {
        let (a, b) = h().refine(&DistA::heaviside(1.0));
        assert_eq!(a.breakpoints(), &[0.0, 1.0]);
        assert_eq!(b.breakpoints(), &[0.0, 1.0]);
        let (a, b) = d(0).refine(&DistA::smooth(e("x^2")));
        assert_eq!(a.breakpoints(), &[0.0]);
        assert_eq!(b.breakpoints(), &[0.0]);
        let f = h().add(&d(1));
        let (a, b) = f.refine(&f);
        assert_eq!(a, f);
        assert_eq!(b, f);
    }

    #[test]
    fn linear_examples() {
        assert!(h().add(&DistA::heaviside_minus(0.0)).equals(&DistA::smooth(SmoothExpr::one()), 1e-12));
        assert!(d(0).scale(re(0.0)).deltas().is_empty());
        let s = d(0).add(&d(1));
        assert_eq!(s.deltas().len(), 2);
        assert_eq!(s.deltas().coef(0.0, 0), re(1.0));
        assert_eq!(s.deltas().coef(0.0, 1), re(1.0));
    }

    #[test]
    fn dual_smooth_delta_examples() {
        let p = dual_smooth_delta(&SmoothExpr::x(), 0.0, 1).unwrap();
        assert_eq!(p, DeltaPart::single(0.0, 0, re(-1.0)));
        let p = dual_smooth_delta(&SmoothExpr::one(), 0.0, 4).unwrap();
        assert_eq!(p, DeltaPart::single(0.0, 4, re(1.0)));
    }

    #[test]
    fn product_identities() {
        for i in 0..4 {
            assert!(h().star(&d(i)).unwrap().deltas().is_empty());
            assert!(h().star(&d(i)).unwrap().equals(&DistA::zero(), 0.0));
            assert!(d(i).star(&h()).unwrap().equals(&d(i), 0.0));
            for j in 0..4 {
                for (x0, x1) in [(0.0, 0.0), (0.0, 1.0), (-1.0, 2.0)] {
                    let p = DistA::delta(x0, i).star(&DistA::delta(x1, j)).unwrap();
                    assert!(p.deltas().is_empty());
                }
            }
        }
        let hx = h().mul_smooth(&SmoothExpr::x()).unwrap();
        let sq = hx.star(&hx).unwrap();
        assert!(sq.equals(&h().mul_smooth(&e("x^2")).unwrap(), 1e-14));
        assert!(!h().star(&d(0)).unwrap().equals(&d(0).star(&h()).unwrap(), 1e-12));
    }

    #[test]
    fn derivative_examples() {
        assert!(h().derivative(1).unwrap().equals(&d(0), 0.0));
        assert!(d(0).derivative(2).unwrap().equals(&d(2), 0.0));
        let psi = DistA::piecewise(vec![0.0], vec![e("cos(x)"), e("sin(x) + 2")]).unwrap();
        let dp = psi.derivative(1).unwrap();
        assert_eq!(dp.deltas().coef(0.0, 0), re(1.0));
        assert!((dp.pieces()[0].evaluate(0.3).unwrap() + re(0.3f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn antiderivative_examples() {
        let a = d(0).antiderivative().unwrap();
        assert!(a.equals(&h(), 1e-12));
        let a = h().antiderivative().unwrap();
        assert!(a.equals(&h().mul_smooth(&SmoothExpr::x()).unwrap(), 1e-12));
        let f = DistA::piecewise(vec![-1.0, 0.5], vec![e("sin(x)"), e("exp(x)"), e("x^2")])
            .unwrap()
            .add(&DistA::delta_scaled(0.5, 1, re(2.0)))
            .add(&DistA::delta(-1.0, 0));
        let back = f.antiderivative().unwrap().derivative(1).unwrap();
        assert!(back.equals(&f, 1e-9));
    }

    #[test]
    fn restrict_examples() {
        let f = d(0).add(&DistA::heaviside(0.0));
        let r = DistA::delta(0.0, 0).add(&h()).restrict(1.0, 2.0);
        assert!(r.equals(&DistA::smooth(SmoothExpr::one()), 0.0));
        assert_eq!(f.restrict(f64::NEG_INFINITY, f64::INFINITY), f);
        assert!(h().restrict(-2.0, -1.0).equals(&DistA::zero(), 0.0));
    }

    #[test]
    fn sing_supp_and_order() {
        assert_eq!(h().sing_supp(), vec![0.0]);
        assert_eq!(d(2).dist_order(), 3);
        assert_eq!(DistA::zero().dist_order(), 0);
        let fake = DistA::piecewise(vec![0.0], vec![e("x^2"), e("x*x")]).unwrap();
        assert!(fake.sing_supp().is_empty());
    }

    #[test]
    fn pairing_examples() {
        let t = e("exp(-1*x^2)");
        let v = d(1).pair_with_test(&t, -10.0, 10.0).unwrap();
        assert!((v - re(0.0)).norm() < 1e-15);
        let t2 = e("exp(-1*(x - 1)^2)");
        let v = d(1).pair_with_test(&t2, -10.0, 10.0).unwrap();
        assert!((v - re(-2.0 * (-1.0f64).exp())).norm() < 1e-14);
        let v = h().pair_with_test(&t, -10.0, 10.0).unwrap();
        assert!((v.re - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn equality_examples() {
        for tol in [0.0, 1e-12, 1e-3, 0.5] {
            assert!(!d(0).equals(&d(1), tol));
        }
        assert!(d(0).star(&h()).unwrap().equals(&d(0), 1e-12));
    }
}
