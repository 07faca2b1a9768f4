//! Dormand-Prince 8(5,3) explicit Runge-Kutta stepping with adaptive step
//! control.
//!
//! Dense output re-steps from the nearest accepted node: every query point
//! is at most half an accepted step away from a node, so one uncontrolled
//! step of that length keeps the local error within tolerance.

use crate::error::{Error, Result};
use crate::Scalar;

// Dormand-Prince 8(5,3) tableau
const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;
const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;
const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;
const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 1.0 / 3.0;
const FAC_MAX: f64 = 6.0;
const BETA: f64 = 0.0;
const EXPO1: f64 = 1.0 / 8.0 - BETA * 0.2;
const MAX_STEPS: usize = 1_000_000;

/// Right-hand side `dy/dx = f(x, y)` written into the output slice.
pub trait Rhs: Sync {
    fn eval(&self, x: f64, y: &[Scalar], dy: &mut [Scalar]) -> Result<()>;
}

impl<F> Rhs for F
where
    F: Fn(f64, &[Scalar], &mut [Scalar]) -> Result<()> + Sync,
{
    fn eval(&self, x: f64, y: &[Scalar], dy: &mut [Scalar]) -> Result<()> {
        self(x, y, dy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

/// Accepted nodes of one integration, ordered along the direction of
/// integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub ys: Vec<Vec<Scalar>>,
}

fn axpy(y: &[Scalar], h: f64, terms: &[(f64, &[Scalar])]) -> Vec<Scalar> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        let w = c * h;
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += v * w;
        }
    }
    out
}

struct StepOut {
    y_new: Vec<Scalar>,
    err: f64,
}

/// One step of size `h` from `(x, y)` with slope `k1 = f(x, y)`.
fn step<R: Rhs + ?Sized>(rhs: &R, x: f64, y: &[Scalar], k1: &[Scalar], h: f64, tol: Tolerances) -> Result<StepOut> {
    let n = y.len();
    let f = |xx: f64, yy: &[Scalar]| -> Result<Vec<Scalar>> {
        let mut d = vec![Scalar::new(0.0, 0.0); n];
        rhs.eval(xx, yy, &mut d)?;
        Ok(d)
    };
    let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
    let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(x + C4 * h, &axpy(y, h, &[(A41, k1), (A43, &k3)]))?;
    let k5 = f(x + C5 * h, &axpy(y, h, &[(A51, k1), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(x + C6 * h, &axpy(y, h, &[(A61, k1), (A64, &k4), (A65, &k5)]))?;
    let k7 = f(x + C7 * h, &axpy(y, h, &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)]))?;
    let k8 = f(
        x + C8 * h,
        &axpy(y, h, &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]),
    )?;
    let k9 = f(
        x + C9 * h,
        &axpy(y, h, &[(A91, k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]),
    )?;
    let k10 = f(
        x + C10 * h,
        &axpy(
            y,
            h,
            &[(A101, k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)],
        ),
    )?;
    let k11 = f(
        x + C11 * h,
        &axpy(
            y,
            h,
            &[
                (A111, k1),
                (A114, &k4),
                (A115, &k5),
                (A116, &k6),
                (A117, &k7),
                (A118, &k8),
                (A119, &k9),
                (A1110, &k10),
            ],
        ),
    )?;
    let y12 = axpy(
        y,
        h,
        &[
            (A121, k1),
            (A124, &k4),
            (A125, &k5),
            (A126, &k6),
            (A127, &k7),
            (A128, &k8),
            (A129, &k9),
            (A1210, &k10),
            (A1211, &k11),
        ],
    );
    let k12 = f(x + h, &y12)?;
    let mut slope = vec![Scalar::new(0.0, 0.0); n];
    for i in 0..n {
        slope[i] = k1[i] * B1
            + k6[i] * B6
            + k7[i] * B7
            + k8[i] * B8
            + k9[i] * B9
            + k10[i] * B10
            + k11[i] * B11
            + k12[i] * B12;
    }
    let y_new: Vec<Scalar> = y.iter().zip(&slope).map(|(a, s)| a + s * h).collect();

    let (mut err, mut err2) = (0.0, 0.0);
    for i in 0..n {
        let sk = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
        let e2 = slope[i] - k1[i] * BHH1 - k9[i] * BHH2 - k12[i] * BHH3;
        err2 += (e2.norm() / sk).powi(2);
        let e = k1[i] * ER1
            + k6[i] * ER6
            + k7[i] * ER7
            + k8[i] * ER8
            + k9[i] * ER9
            + k10[i] * ER10
            + k11[i] * ER11
            + k12[i] * ER12;
        err += (e.norm() / sk).powi(2);
    }
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    let err = h.abs() * err * (1.0 / (deno * n as f64)).sqrt();
    Ok(StepOut { y_new, err })
}

/// Integrates from `x0` to `x_end` (either direction) and records every
/// accepted node.
pub fn integrate<R: Rhs + ?Sized>(rhs: &R, x0: f64, y0: &[Scalar], x_end: f64, tol: Tolerances) -> Result<Trajectory> {
    let n = y0.len();
    let mut traj = Trajectory {
        xs: vec![x0],
        ys: vec![y0.to_vec()],
    };
    let span = x_end - x0;
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut k1 = vec![Scalar::new(0.0, 0.0); n];
    rhs.eval(x, &y, &mut k1)?;
    let mut h = dir * (span.abs() * 1e-2).max(1e-6 * span.abs());
    let mut facold: f64 = 1e-4;
    let mut rejected = false;
    for _ in 0..MAX_STEPS {
        if (x_end - x) * dir <= 0.0 {
            return Ok(traj);
        }
        let last = (x + h - x_end) * dir >= 0.0;
        if last {
            h = x_end - x;
        }
        if h.abs() <= 1e-14 * x.abs().max(span.abs()) {
            return Err(Error::StepSizeCollapse { x });
        }
        let s = step(rhs, x, &y, &k1, h, tol)?;
        if !s.err.is_finite() {
            h *= 0.1;
            rejected = true;
            continue;
        }
        let fac11 = s.err.powf(EXPO1);
        let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;
        if s.err <= 1.0 {
            facold = s.err.max(1e-4);
            x = if last { x_end } else { x + h };
            y = s.y_new;
            rhs.eval(x, &y, &mut k1)?;
            traj.xs.push(x);
            traj.ys.push(y.clone());
            if rejected {
                h_new = dir * h_new.abs().min(h.abs());
            }
            rejected = false;
        } else {
            h_new = h / (1.0 / FAC_MIN).min(fac11 / SAFE);
            rejected = true;
        }
        h = h_new;
    }
    Err(Error::StepSizeCollapse { x })
}

impl Trajectory {
    /// State at `x`, re-stepping from the nearest recorded node.
    pub fn state_at<R: Rhs + ?Sized>(&self, rhs: &R, x: f64, tol: Tolerances) -> Result<Vec<Scalar>> {
        let forward = self.xs.len() < 2 || self.xs[1] >= self.xs[0];
        let pos = if forward {
            self.xs.partition_point(|&v| v < x)
        } else {
            self.xs.partition_point(|&v| v > x)
        };
        let mut best = pos.min(self.xs.len() - 1);
        if pos > 0 && (self.xs[pos - 1] - x).abs() < (self.xs[best] - x).abs() {
            best = pos - 1;
        }
        let (xn, yn) = (self.xs[best], &self.ys[best]);
        if xn == x {
            return Ok(yn.clone());
        }
        let mut k1 = vec![Scalar::new(0.0, 0.0); yn.len()];
        rhs.eval(xn, yn, &mut k1)?;
        Ok(step(rhs, xn, yn, &k1, x - xn, tol)?.y_new)
    }
}
