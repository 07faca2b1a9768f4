//! Small dense complex linear algebra on top of nalgebra's SVD.

use nalgebra::{DMatrix, DVector};

use crate::Scalar;

pub type CMatrix = DMatrix<Scalar>;
pub type CVector = DVector<Scalar>;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// A singular value within this factor of the cutoff is reported as a tie.
const TIE_BAND: f64 = 100.0;

#[derive(Clone, Debug, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    /// True if a singular value sits close enough to the cutoff that the
    /// decision is fragile.
    pub near_threshold: bool,
}

fn padded_square(m: &CMatrix) -> CMatrix {
    if m.nrows() >= m.ncols() {
        return m.clone();
    }
    let mut p = CMatrix::zeros(m.ncols(), m.ncols());
    p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    p
}

pub fn rank(m: &CMatrix) -> RankInfo {
    if m.is_empty() {
        return RankInfo {
            rank: 0,
            near_threshold: false,
        };
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return RankInfo {
            rank: 0,
            near_threshold: false,
        };
    }
    let cut = RANK_TOL * smax;
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let near_threshold = sv
        .iter()
        .any(|&s| s > cut / TIE_BAND && s < cut * TIE_BAND);
    RankInfo {
        rank,
        near_threshold,
    }
}

/// Orthonormal basis of the null space, one vector per column.
pub fn kernel(m: &CMatrix) -> CMatrix {
    let n = m.ncols();
    if m.nrows() == 0 {
        return CMatrix::identity(n, n);
    }
    let sq = padded_square(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = RANK_TOL * smax;
    let cols: Vec<CVector> = (0..svd.singular_values.len())
        .filter(|&i| smax == 0.0 || svd.singular_values[i] <= cut)
        .map(|i| vt.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

#[derive(Clone, Debug)]
pub struct LeastSquares {
    /// Minimum-norm solution (or least-squares fit when inconsistent).
    pub x: CVector,
    /// Orthonormal null-space basis of the system matrix.
    pub kernel: CMatrix,
    pub rank: RankInfo,
    /// Residual relative to the equilibrated system's scale.
    pub relative_residual: f64,
}

impl LeastSquares {
    pub fn nullity(&self) -> usize {
        self.kernel.ncols()
    }

    pub fn consistent(&self, tol: f64) -> bool {
        self.relative_residual <= tol
    }
}

/// Row/column equilibrated SVD solve of `m x = rhs`.
pub fn solve_min_norm(m: &CMatrix, rhs: &CVector) -> LeastSquares {
    let (r, c) = m.shape();
    let row_s: Vec<f64> = (0..r)
        .map(|i| {
            let mx = m.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max);
            if mx > 0.0 { 1.0 / mx } else { 1.0 }
        })
        .collect();
    let mut scaled = m.clone();
    let mut b = rhs.clone();
    for i in 0..r {
        scaled.row_mut(i).scale_mut(row_s[i]);
        b[i] *= row_s[i];
    }
    let col_s: Vec<f64> = (0..c)
        .map(|j| {
            let mx = scaled.column(j).iter().map(|v| v.norm()).fold(0.0, f64::max);
            if mx > 0.0 { 1.0 / mx } else { 1.0 }
        })
        .collect();
    for j in 0..c {
        scaled.column_mut(j).scale_mut(col_s[j]);
    }

    let sq = padded_square(&scaled);
    let mut bp = CVector::zeros(sq.nrows());
    bp.rows_mut(0, r).copy_from(&b);
    let svd = sq.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = RANK_TOL * smax;
    let u = svd.u.as_ref().expect("requested");
    let vt = svd.v_t.as_ref().expect("requested");
    let mut y = CVector::zeros(c);
    let mut null_cols = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let v = vt.row(i).adjoint();
        if smax > 0.0 && s > cut {
            let coef = u.column(i).dotc(&bp) / Scalar::new(s, 0.0);
            y += v * coef;
        } else {
            null_cols.push(v);
        }
    }
    let res = &sq * &y - &bp;
    let scale = bp.norm().max((&sq * &y).norm()).max(f64::MIN_POSITIVE);
    let relative_residual = if bp.norm() == 0.0 && res.norm() == 0.0 {
        0.0
    } else {
        res.norm() / scale
    };

    // back to original coordinates
    let mut x = y;
    for j in 0..c {
        x[j] *= col_s[j];
    }
    let kernel = if null_cols.is_empty() {
        CMatrix::zeros(c, 0)
    } else {
        let mut k = CMatrix::from_columns(&null_cols);
        for j in 0..c {
            k.row_mut(j).scale_mut(col_s[j]);
        }
        let q = k.qr().q();
        q.columns(0, null_cols.len()).into_owned()
    };
    // minimum norm in the original coordinates
    if kernel.ncols() > 0 {
        let proj = kernel.adjoint() * &x;
        x -= &kernel * proj;
    }
    let rank = RankInfo {
        rank: svd.singular_values.iter().filter(|&&s| smax > 0.0 && s > cut).count(),
        near_threshold: svd
            .singular_values
            .iter()
            .any(|&s| s > cut / TIE_BAND && s < cut * TIE_BAND),
    };
    LeastSquares {
        x,
        kernel,
        rank,
        relative_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: f64) -> Scalar {
        Scalar::new(v, 0.0)
    }

    fn mat(r: usize, c: usize, v: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(r, c, v.iter().map(|&x| re(x)))
    }

    #[test]
    fn rank_and_kernel() {
        let m = mat(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert_eq!(rank(&m).rank, 1);
        let k = kernel(&m);
        assert_eq!(k.ncols(), 1);
        assert!(k[(1, 0)].norm() < 1e-14);
        assert!((k[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wide_matrix_kernel_is_complete() {
        let m = mat(1, 3, &[1.0, 1.0, 1.0]);
        let k = kernel(&m);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-14);
    }

    #[test]
    fn min_norm_solution() {
        let m = mat(1, 2, &[1.0, 1.0]);
        let b = CVector::from_vec(vec![re(2.0)]);
        let s = solve_min_norm(&m, &b);
        assert_eq!(s.nullity(), 1);
        assert!((s.x[0] - re(1.0)).norm() < 1e-14);
        assert!((s.x[1] - re(1.0)).norm() < 1e-14);
        assert!(s.consistent(1e-12));
    }

    #[test]
    fn badly_scaled_unique_system() {
        let m = mat(2, 2, &[1e8, 1.0, 0.0, 1e-6]);
        let b = CVector::from_vec(vec![re(1e8 + 2.0), re(2e-6)]);
        let s = solve_min_norm(&m, &b);
        assert_eq!(s.nullity(), 0);
        assert!((s.x[0] - re(1.0)).norm() < 1e-12);
        assert!((s.x[1] - re(2.0)).norm() < 1e-12);
    }

    #[test]
    fn inconsistent_system_detected() {
        let m = mat(2, 1, &[1.0, 1.0]);
        let b = CVector::from_vec(vec![re(0.0), re(1.0)]);
        assert!(!solve_min_norm(&m, &b).consistent(1e-8));
    }
}
