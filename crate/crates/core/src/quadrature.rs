//! Globally adaptive 15-point Gauss-Kronrod quadrature for complex-valued
//! integrands on finite intervals.

use crate::error::{Error, Result};
use crate::Scalar;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
const REL_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 4000;

#[derive(Clone, Copy, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    value: Scalar,
    /// Integral of `|f|`, the scale for cancellation.
    magnitude: f64,
    error: f64,
    /// Error estimate is at the rounding floor; bisecting cannot help.
    saturated: bool,
}

fn kronrod<F>(f: &F, lo: f64, hi: f64) -> Result<Segment>
where
    F: Fn(f64) -> Result<Scalar>,
{
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let a = f(c - dx)?;
        let b = f(c + dx)?;
        k += (a + b) * WGK[j];
        abs += (a.norm() + b.norm()) * WGK[j];
        if j % 2 == 1 {
            g += (a + b) * WG[j / 2];
        }
    }
    let roundoff = 50.0 * f64::EPSILON * abs * h.abs();
    let raw = ((k - g) * h).norm();
    Ok(Segment {
        lo,
        hi,
        value: k * h,
        magnitude: abs * h.abs(),
        error: raw.max(roundoff),
        saturated: raw <= roundoff,
    })
}

/// Single 15-point Kronrod sum without error control, for cells known to be
/// well resolved.
pub fn kronrod_fixed<F>(f: F, lo: f64, hi: f64) -> Result<Scalar>
where
    F: Fn(f64) -> Result<Scalar>,
{
    kronrod(&f, lo, hi).map(|s| s.value)
}

/// Integrates `f` over `[lo, hi]`, with forced subdivision at `splits`
/// (points outside the interval are ignored).
pub fn integrate<F>(f: F, lo: f64, hi: f64, splits: &[f64], abs_tol: f64) -> Result<Scalar>
where
    F: Fn(f64) -> Result<Scalar>,
{
    if hi == lo {
        return Ok(Scalar::new(0.0, 0.0));
    }
    if hi < lo {
        return integrate(f, hi, lo, splits, abs_tol).map(|v| -v);
    }
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = splits.iter().copied().filter(|&s| s > lo && s < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut segs = Vec::with_capacity(64);
    for w in cuts.windows(2) {
        segs.push(kronrod(&f, w[0], w[1])?);
    }
    loop {
        let total: Scalar = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let magnitude: f64 = segs.iter().map(|s| s.magnitude).sum();
        let tol = abs_tol.max(REL_TOL * total.norm().max(magnitude));
        if err <= tol {
            return Ok(total);
        }
        let Some((worst, _)) = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.saturated)
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
        else {
            return Ok(total);
        };
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.lo + s.hi);
        if segs.len() >= MAX_INTERVALS || mid <= s.lo || mid >= s.hi {
            return Err(Error::Quadrature {
                lo,
                hi,
                estimate: err,
            });
        }
        segs.push(kronrod(&f, s.lo, mid)?);
        segs.push(kronrod(&f, mid, s.hi)?);
    }
}

/// Real-valued convenience wrapper with the default tolerance.
pub fn integrate_real<F>(f: F, lo: f64, hi: f64, splits: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| Ok(Scalar::new(f(x), 0.0)), lo, hi, splits, DEFAULT_ABS_TOL).map(|v| v.re)
}
