//! Interface conditions at a singular point.
//!
//! Around `x0` the solution is `H_- psi_- + H psi_+ + sum_k d_k delta^(k)`.
//! Plugging this into the operator and collecting Dirac terms at `x0` gives
//! one equation per delta order. Every quantity involved is affine in the
//! unknowns `(psi_-(x0) jet, psi_+(x0) jet, d)`: jets of order `>= n` come
//! from the lateral equations, so the map is recovered exactly by applying
//! the operator to Taylor polynomials at the origin and at unit vectors. The
//! orders `n..M-1` are triangular in `d` with pivot `a_n(x0-) + b_n(x0+)`;
//! eliminating `d` leaves `n` rows `B psi_+ - A psi_- = c`.

use serde::{Deserialize, Serialize};

use super::spec::{ProblemSpec, LEADING_TOL};
use crate::dist_algebra::{DeltaPart, DistA, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::ode::SmoothOde;
use crate::smooth_fn::SmoothExpr;
use crate::{re, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Separating,
    Interacting,
    PartiallyInteracting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dims {
    pub rank_a: usize,
    pub rank_b: usize,
    pub ker_a: usize,
    pub ker_b: usize,
    /// `dim(Ran A ∩ Ran B)`.
    pub w: usize,
    /// A singular value sat near the rank cutoff.
    pub near_threshold: bool,
}

/// `B psi_+(x0) - A psi_-(x0) = c`, with the Dirac coefficients
/// `d = d_minus psi_- + d_plus psi_+ + d_offset`.
#[derive(Clone, Debug)]
pub struct InterfaceSystem {
    pub x0: f64,
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CVector,
    pub d_minus: CMatrix,
    pub d_plus: CMatrix,
    pub d_offset: CVector,
    pub classification: Classification,
    pub dims: Dims,
}

impl InterfaceSystem {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Number of Dirac coefficients `d_0..d_{K-1}`.
    pub fn dirac_len(&self) -> usize {
        self.d_offset.len()
    }

    pub fn has_offset(&self) -> bool {
        self.c.iter().any(|v| v.norm() > 0.0)
    }

    /// Dirac part at `x0` for the given lateral jets.
    pub fn dirac_part(&self, minus: &CVector, plus: &CVector) -> DeltaPart {
        let d = &self.d_minus * minus + &self.d_plus * plus + &self.d_offset;
        let mut out = DeltaPart::new();
        for (k, v) in d.iter().enumerate() {
            out.insert(self.x0, k, *v);
        }
        out
    }
}

/// Taylor polynomial `sum_j jet[j] (x - x0)^j / j!`.
fn taylor_poly(jet: &[Scalar], x0: f64) -> SmoothExpr {
    let shift = SmoothExpr::sub(SmoothExpr::x(), SmoothExpr::real(x0));
    let mut fact = 1.0;
    let mut out = SmoothExpr::zero();
    for (j, &v) in jet.iter().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        if v == re(0.0) {
            continue;
        }
        let term = SmoothExpr::scale(v / fact, SmoothExpr::powi(shift.clone(), j as i32));
        out = SmoothExpr::add(out, term);
    }
    out
}

/// `sum_i a_i * psi^(i) + psi^(i) * b_i`.
pub fn apply_operator(a: &[DistA], b: &[DistA], psi: &DistA) -> Result<DistA> {
    let mut out = DistA::zero();
    let mut d = psi.clone();
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        if i > 0 {
            d = d.derivative(1)?;
        }
        out = out.add(&ai.star(&d)?).add(&d.star(bi)?);
    }
    Ok(out)
}

/// The coefficients restricted to a window around `x0` that contains no
/// other breakpoint.
fn local_coeffs(spec: &ProblemSpec, x0: f64) -> (Vec<DistA>, Vec<DistA>) {
    let pts = spec.interface_points();
    let i = pts.partition_point(|&p| p < x0);
    let (lo, hi) = spec.domain;
    let left = if i > 0 { pts[i - 1] } else { lo };
    let right = pts.get(i + 1).copied().unwrap_or(hi);
    let (l, r) = (0.5 * (left + x0), 0.5 * (x0 + right));
    let cut = |v: &[DistA]| v.iter().map(|c| c.restrict(l, r)).collect();
    (cut(&spec.a), cut(&spec.b))
}

pub fn build_interface_system(spec: &ProblemSpec, x0: f64) -> Result<InterfaceSystem> {
    if !spec.divergence.is_empty() {
        return build_interface_system(&super::spec::expand_divergence(spec)?, x0);
    }
    let n = spec.n;
    let am = spec.a[n].lateral_value(x0, Side::Left)?;
    let bp = spec.b[n].lateral_value(x0, Side::Right)?;
    let pivot = am + bp;
    if pivot.norm() <= LEADING_TOL * (am.norm() + bp.norm()).max(1.0) {
        return Err(Error::DegenerateInterface { x: x0 });
    }
    let (a, b) = local_coeffs(spec, x0);
    let m = a.iter().chain(&b).map(DistA::dist_order).max().unwrap_or(0);
    let k = m.saturating_sub(n);
    // Taylor depth covering every jet a delta expansion can touch.
    let depth = n + m;
    let side_ode = |side| SmoothOde::new(spec.lateral_coeffs(x0, side), spec.f.clone());
    let (ode_m, ode_p) = (side_ode(Side::Left), side_ode(Side::Right));
    let rows = depth.max(n + k) + 1;
    let unknowns = 2 * n + k;

    let residual_rows = |v: &[Scalar]| -> Result<Vec<Scalar>> {
        let jm = ode_m.jet_from_state(x0, &v[..n], depth)?;
        let jp = ode_p.jet_from_state(x0, &v[n..2 * n], depth)?;
        let mut deltas = DeltaPart::new();
        for (j, &dj) in v[2 * n..].iter().enumerate() {
            deltas.insert(x0, j, dj);
        }
        let psi = DistA::from_parts(vec![x0], vec![taylor_poly(&jm, x0), taylor_poly(&jp, x0)], deltas)?;
        let r = apply_operator(&a, &b, &psi)?;
        Ok((0..rows).map(|o| r.deltas().coef(x0, o)).collect())
    };

    let zero = vec![re(0.0); unknowns];
    let e0 = CVector::from_vec(residual_rows(&zero)?);
    let mut e = CMatrix::zeros(rows, unknowns);
    for j in 0..unknowns {
        let mut v = zero.clone();
        v[j] = re(1.0);
        let col = CVector::from_vec(residual_rows(&v)?) - &e0;
        e.set_column(j, &col);
    }

    let scale = e.iter().chain(e0.iter()).map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    for o in n + k..rows {
        if e.row(o).iter().chain(std::iter::once(&e0[o])).any(|v| v.norm() > 1e-9 * scale) {
            return Err(Error::Invalid(format!(
                "delta order {o} at x = {x0} cannot be balanced"
            )));
        }
    }

    // d = -Ed^{-1} (Eu u + e0) from rows n..n+k.
    let (d_u, d_off) = if k > 0 {
        let ed = e.view((n, 2 * n), (k, k)).into_owned();
        let eu = e.view((n, 0), (k, 2 * n)).into_owned();
        let lu = ed.lu();
        let du = lu
            .solve(&(-eu))
            .ok_or(Error::DegenerateInterface { x: x0 })?;
        let doff = lu
            .solve(&(-e0.rows(n, k).into_owned()))
            .ok_or(Error::DegenerateInterface { x: x0 })?;
        (du, doff)
    } else {
        (CMatrix::zeros(0, 2 * n), CVector::zeros(0))
    };

    let top_u = e.view((0, 0), (n, 2 * n)).into_owned();
    let top_d = e.view((0, 2 * n), (n, k)).into_owned();
    let pq = &top_u + &top_d * &d_u;
    let r = e0.rows(0, n).into_owned() + &top_d * &d_off;
    let a_mat = -pq.columns(0, n).into_owned();
    let b_mat = pq.columns(n, n).into_owned();
    let (classification, dims) = classify(&a_mat, &b_mat);
    Ok(InterfaceSystem {
        x0,
        a: a_mat,
        b: b_mat,
        c: -r,
        d_minus: d_u.columns(0, n).into_owned(),
        d_plus: d_u.columns(n, n).into_owned(),
        d_offset: d_off,
        classification,
        dims,
    })
}

/// Classifies `A psi_- = B psi_+` by `W = Ran A ∩ Ran B`.
pub fn classify(a: &CMatrix, b: &CMatrix) -> (Classification, Dims) {
    let n = a.nrows();
    let ra = linalg::rank(a);
    let rb = linalg::rank(b);
    let mut ab = CMatrix::zeros(n, a.ncols() + b.ncols());
    ab.columns_mut(0, a.ncols()).copy_from(a);
    ab.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    let rab = linalg::rank(&ab);
    let w = ra.rank + rb.rank - rab.rank;
    let class = if w == 0 {
        Classification::Separating
    } else if w == n {
        Classification::Interacting
    } else {
        Classification::PartiallyInteracting
    };
    (
        class,
        Dims {
            rank_a: ra.rank,
            rank_b: rb.rank,
            ker_a: a.ncols() - ra.rank,
            ker_b: b.ncols() - rb.rank,
            w,
            near_threshold: ra.near_threshold || rb.near_threshold || rab.near_threshold,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth_fn::parse_expr;

    fn c(v: f64) -> Scalar {
        re(v)
    }

    /// `psi'' + (k^2 + alpha delta''') * psi = 0`.
    pub(crate) fn example(k: f64, alpha: f64) -> ProblemSpec {
        let a0 = DistA::smooth(SmoothExpr::real(k * k)).add(&DistA::delta_scaled(0.0, 3, c(alpha)));
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

    fn mat(rows: [[f64; 2]; 2]) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| c(rows[i][j]))
    }

    fn close(x: &CMatrix, y: &CMatrix, tol: f64) -> bool {
        (x - y).iter().all(|v| v.norm() <= tol)
    }

    #[test]
    fn example_matrices() {
        let (k, alpha) = (1.3, 0.37);
        let s = build_interface_system(&example(k, alpha), 0.0).unwrap();
        let g = 4.0 * alpha * k * k;
        assert!(close(&s.a, &mat([[0.0, 1.0], [1.0, 0.0]]), 1e-12), "{}", s.a);
        assert!(close(&s.b, &mat([[0.0, g + 1.0], [1.0 - g, 0.0]]), 1e-12), "{}", s.b);
        assert!(!s.has_offset());
        // d_0 = 3 alpha psi_+'(0), d_1 = -alpha psi_+(0)
        assert!(close(&s.d_plus, &mat([[0.0, 3.0 * alpha], [-alpha, 0.0]]), 1e-12));
        assert!(s.d_minus.iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn example_classifications() {
        let s = build_interface_system(&example(1.0, 0.125), 0.0).unwrap();
        assert_eq!(s.classification, Classification::Interacting);
        let s = build_interface_system(&example(1.0, 0.25), 0.0).unwrap();
        assert_eq!(s.classification, Classification::PartiallyInteracting);
        assert_eq!((s.dims.ker_a, s.dims.ker_b, s.dims.w), (0, 1, 1));
        let kb = linalg::kernel(&s.b);
        // Ker B is spanned by (1, 0).
        assert!(kb[(1, 0)].norm() < 1e-12 && (kb[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_extremes() {
        let id = CMatrix::identity(3, 3);
        assert_eq!(classify(&id, &id).0, Classification::Interacting);
        assert_eq!(classify(&id, &CMatrix::zeros(3, 3)).0, Classification::Separating);
    }

    #[test]
    fn jump_in_leading_coefficient_gives_flux_continuity() {
        // (p psi')' with p = 1 on the left and 4 on the right:
        // psi continuous and p psi' continuous.
        let p = DistA::piecewise(vec![0.0], vec![SmoothExpr::one(), SmoothExpr::real(4.0)]).unwrap();
        let spec = ProblemSpec::new(
            2,
            vec![],
            vec![],
            parse_expr("0").unwrap(),
            (-1.0, 1.0),
            vec![super::super::spec::DivergenceTerm {
                outer: 1,
                inner: 1,
                left: Some(p),
                right: None,
            }],
        )
        .unwrap();
        let s = build_interface_system(&spec, 0.0).unwrap();
        assert_eq!(s.classification, Classification::Interacting);
        // Rows must imply psi_+ = psi_- and 4 psi_+' = psi_-'.
        let minus = CVector::from_vec(vec![c(2.0), c(4.0)]);
        let plus = CVector::from_vec(vec![c(2.0), c(1.0)]);
        let lhs = &s.b * &plus - &s.a * &minus;
        assert!(lhs.iter().all(|v| v.norm() < 1e-12), "{lhs}");
        assert_eq!(s.dirac_len(), 0);
    }
}
