use std::fmt;
use std::sync::Arc;

use super::jet::Taylor;
use super::EvalError;
use crate::Scalar;

/// A smooth function supplied numerically rather than as a formula.
///
/// Implementors hand back derivatives `0..=maxk` at `x`. Numeric ODE
/// solutions, quadrature-backed antiderivatives and mollified regularizations
/// all enter expression trees through this trait.
pub trait JetFn: Send + Sync + fmt::Debug {
    fn jet(&self, x: f64, maxk: usize) -> Result<Vec<Scalar>, EvalError>;

    fn label(&self) -> String {
        "numeric".to_string()
    }
}

/// Expression tree for a globally smooth scalar function of `x`.
#[derive(Clone, Debug)]
pub enum SmoothExpr {
    Const(Scalar),
    X,
    Add(Arc<SmoothExpr>, Arc<SmoothExpr>),
    Sub(Arc<SmoothExpr>, Arc<SmoothExpr>),
    Mul(Arc<SmoothExpr>, Arc<SmoothExpr>),
    Div(Arc<SmoothExpr>, Arc<SmoothExpr>),
    Neg(Arc<SmoothExpr>),
    Pow(Arc<SmoothExpr>, i32),
    Sin(Arc<SmoothExpr>),
    Cos(Arc<SmoothExpr>),
    Exp(Arc<SmoothExpr>),
    /// `order`-th derivative of a numerically supplied function.
    Opaque { f: Arc<dyn JetFn>, order: usize },
}

impl PartialEq for SmoothExpr {
    fn eq(&self, other: &Self) -> bool {
        use SmoothExpr::*;
        match (self, other) {
            (Const(a), Const(b)) => a == b,
            (X, X) => true,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Div(a, b), Div(c, d)) => a == c && b == d,
            (Neg(a), Neg(b)) | (Sin(a), Sin(b)) | (Cos(a), Cos(b)) | (Exp(a), Exp(b)) => a == b,
            (Pow(a, n), Pow(b, m)) => n == m && a == b,
            (Opaque { f, order }, Opaque { f: g, order: o }) => {
                order == o && Arc::ptr_eq(f, g)
            }
            _ => false,
        }
    }
}

fn re(v: f64) -> Scalar {
    Scalar::new(v, 0.0)
}

impl SmoothExpr {
    pub fn constant(c: impl Into<Scalar>) -> Self {
        SmoothExpr::Const(c.into())
    }

    pub fn real(v: f64) -> Self {
        SmoothExpr::Const(re(v))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn x() -> Self {
        SmoothExpr::X
    }

    pub fn opaque(f: Arc<dyn JetFn>) -> Self {
        SmoothExpr::Opaque { f, order: 0 }
    }

    pub fn as_const(&self) -> Option<Scalar> {
        match self {
            SmoothExpr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(re(0.0))
    }

    /// True when the tree contains no numerically supplied leaves, i.e. when
    /// it can be printed in the grammar and parsed back.
    pub fn is_symbolic(&self) -> bool {
        use SmoothExpr::*;
        match self {
            Const(_) | X => true,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.is_symbolic() && b.is_symbolic(),
            Neg(a) | Pow(a, _) | Sin(a) | Cos(a) | Exp(a) => a.is_symbolic(),
            Opaque { .. } => false,
        }
    }

    pub fn add(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => SmoothExpr::Const(x + y),
            (Some(x), _) if x == re(0.0) => b,
            (_, Some(y)) if y == re(0.0) => a,
            _ => SmoothExpr::Add(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn sub(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => SmoothExpr::Const(x - y),
            (Some(x), _) if x == re(0.0) => SmoothExpr::neg(b),
            (_, Some(y)) if y == re(0.0) => a,
            _ => SmoothExpr::Sub(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn mul(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => SmoothExpr::Const(x * y),
            (Some(x), _) if x == re(0.0) => SmoothExpr::zero(),
            (_, Some(y)) if y == re(0.0) => SmoothExpr::zero(),
            (Some(x), _) if x == re(1.0) => b,
            (_, Some(y)) if y == re(1.0) => a,
            _ if a == b => SmoothExpr::Pow(Arc::new(a), 2),
            _ => SmoothExpr::Mul(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn div(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr {
        match (a.as_const(), b.as_const()) {
            (Some(x), _) if x == re(0.0) => SmoothExpr::zero(),
            (_, Some(y)) if y == re(1.0) => a,
            _ => SmoothExpr::Div(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn neg(a: SmoothExpr) -> SmoothExpr {
        match a {
            SmoothExpr::Const(c) => SmoothExpr::Const(-c),
            SmoothExpr::Neg(inner) => (*inner).clone(),
            other => SmoothExpr::Neg(Arc::new(other)),
        }
    }

    pub fn powi(a: SmoothExpr, n: i32) -> SmoothExpr {
        match n {
            0 => SmoothExpr::one(),
            1 => a,
            _ => SmoothExpr::Pow(Arc::new(a), n),
        }
    }

    pub fn sin(a: SmoothExpr) -> SmoothExpr {
        SmoothExpr::Sin(Arc::new(a))
    }

    pub fn cos(a: SmoothExpr) -> SmoothExpr {
        SmoothExpr::Cos(Arc::new(a))
    }

    pub fn exp(a: SmoothExpr) -> SmoothExpr {
        SmoothExpr::Exp(Arc::new(a))
    }

    pub fn scale(c: impl Into<Scalar>, a: SmoothExpr) -> SmoothExpr {
        SmoothExpr::mul(SmoothExpr::Const(c.into()), a)
    }

    /// Exact `k`-th derivative.
    pub fn differentiate(&self, k: usize) -> SmoothExpr {
        (0..k).fold(self.clone(), |e, _| e.d1())
    }

    fn d1(&self) -> SmoothExpr {
        use SmoothExpr::*;
        match self {
            Const(_) => SmoothExpr::zero(),
            X => SmoothExpr::one(),
            Add(a, b) => SmoothExpr::add(a.d1(), b.d1()),
            Sub(a, b) => SmoothExpr::sub(a.d1(), b.d1()),
            Mul(a, b) => SmoothExpr::add(
                SmoothExpr::mul(a.d1(), (**b).clone()),
                SmoothExpr::mul((**a).clone(), b.d1()),
            ),
            Div(a, b) => SmoothExpr::div(
                SmoothExpr::sub(
                    SmoothExpr::mul(a.d1(), (**b).clone()),
                    SmoothExpr::mul((**a).clone(), b.d1()),
                ),
                SmoothExpr::powi((**b).clone(), 2),
            ),
            Neg(a) => SmoothExpr::neg(a.d1()),
            Pow(a, n) => SmoothExpr::mul(
                SmoothExpr::scale(re(*n as f64), SmoothExpr::powi((**a).clone(), n - 1)),
                a.d1(),
            ),
            Sin(a) => SmoothExpr::mul(SmoothExpr::cos((**a).clone()), a.d1()),
            Cos(a) => SmoothExpr::neg(SmoothExpr::mul(SmoothExpr::sin((**a).clone()), a.d1())),
            Exp(a) => SmoothExpr::mul(self.clone(), a.d1()),
            Opaque { f, order } => Opaque {
                f: Arc::clone(f),
                order: order + 1,
            },
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<Scalar, EvalError> {
        use SmoothExpr::*;
        Ok(match self {
            Const(c) => *c,
            X => re(x),
            Add(a, b) => a.evaluate(x)? + b.evaluate(x)?,
            Sub(a, b) => a.evaluate(x)? - b.evaluate(x)?,
            Mul(a, b) => a.evaluate(x)? * b.evaluate(x)?,
            Div(a, b) => {
                let d = b.evaluate(x)?;
                if d == re(0.0) {
                    return Err(EvalError::DivisionByZero { x });
                }
                a.evaluate(x)? / d
            }
            Neg(a) => -a.evaluate(x)?,
            Pow(a, n) => {
                let v = a.evaluate(x)?;
                if *n < 0 && v == re(0.0) {
                    return Err(EvalError::DivisionByZero { x });
                }
                v.powi(*n)
            }
            Sin(a) => a.evaluate(x)?.sin(),
            Cos(a) => a.evaluate(x)?.cos(),
            Exp(a) => a.evaluate(x)?.exp(),
            Opaque { f, order } => {
                let jet = f.jet(x, *order)?;
                jet[*order]
            }
        })
    }

    /// Taylor expansion of order `maxk` around `x`.
    pub fn taylor(&self, x: f64, maxk: usize) -> Result<Taylor, EvalError> {
        use SmoothExpr::*;
        Ok(match self {
            Const(c) => Taylor::constant(*c, maxk),
            X => Taylor::variable(x, maxk),
            Add(a, b) => a.taylor(x, maxk)?.add(&b.taylor(x, maxk)?),
            Sub(a, b) => a.taylor(x, maxk)?.sub(&b.taylor(x, maxk)?),
            Mul(a, b) => a.taylor(x, maxk)?.mul(&b.taylor(x, maxk)?),
            Div(a, b) => a
                .taylor(x, maxk)?
                .div(&b.taylor(x, maxk)?)
                .ok_or(EvalError::DivisionByZero { x })?,
            Neg(a) => a.taylor(x, maxk)?.neg(),
            Pow(a, n) => a
                .taylor(x, maxk)?
                .powi(*n)
                .ok_or(EvalError::DivisionByZero { x })?,
            Sin(a) => a.taylor(x, maxk)?.sin_cos().0,
            Cos(a) => a.taylor(x, maxk)?.sin_cos().1,
            Exp(a) => a.taylor(x, maxk)?.exp(),
            Opaque { f, order } => {
                let jet = f.jet(x, order + maxk)?;
                Taylor::from_derivatives(&jet[*order..])
            }
        })
    }

    /// Values of the function and its first `maxk` derivatives at `x`.
    pub fn eval_jet(&self, x: f64, maxk: usize) -> Result<Vec<Scalar>, EvalError> {
        Ok(self.taylor(x, maxk)?.to_derivatives())
    }

    /// Dense-sampling check that the expression evaluates to finite values on
    /// `[lo, hi]`.
    pub fn check_pole_free(&self, lo: f64, hi: f64, samples: usize) -> Result<(), EvalError> {
        let samples = samples.max(2);
        for s in 0..samples {
            let x = lo + (hi - lo) * s as f64 / (samples - 1) as f64;
            let v = self.evaluate(x)?;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(EvalError::NonFinite { x });
            }
        }
        Ok(())
    }
}

impl From<f64> for SmoothExpr {
    fn from(v: f64) -> Self {
        SmoothExpr::real(v)
    }
}

fn fmt_real(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

/// Prints in the parser's grammar with full parenthesization so any symbolic
/// tree reads back to the same function. Numeric leaves print as `<label>`.
impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SmoothExpr::*;
        match self {
            Const(c) => {
                if c.im == 0.0 {
                    fmt_real(c.re, f)
                } else if c.re == 0.0 {
                    if c.im < 0.0 {
                        write!(f, "(-{:?}i)", -c.im)
                    } else {
                        write!(f, "{:?}i", c.im)
                    }
                } else {
                    write!(f, "(")?;
                    fmt_real(c.re, f)?;
                    if c.im < 0.0 {
                        write!(f, "-{:?}i)", -c.im)
                    } else {
                        write!(f, "+{:?}i)", c.im)
                    }
                }
            }
            X => write!(f, "x"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Neg(a) => write!(f, "-({a})"),
            Pow(a, n) => write!(f, "({a})^{n}"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Exp(a) => write!(f, "exp({a})"),
            Opaque { f: g, order } => {
                if *order == 0 {
                    write!(f, "<{}>", g.label())
                } else {
                    write!(f, "<{}^({order})>", g.label())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &SmoothExpr, x: f64) -> Scalar {
        e.evaluate(x).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let x = SmoothExpr::x();
        let sin = SmoothExpr::sin(x.clone());
        let d = sin.differentiate(1);
        for t in [-1.3, 0.0, 0.7] {
            assert!((v(&d, t) - re(t.cos())).norm() < 1e-15);
        }
        let cube = SmoothExpr::powi(x.clone(), 3).differentiate(2);
        assert!((v(&cube, 1.5) - re(9.0)).norm() < 1e-14);
        let e = SmoothExpr::exp(SmoothExpr::scale(2.0, x.clone())).differentiate(3);
        assert!((v(&e, 0.4) - re(8.0 * (0.8f64).exp())).norm() < 1e-12);
        assert_eq!(sin.differentiate(0), sin);
    }

    #[test]
    fn evaluate_examples() {
        let x = SmoothExpr::x();
        assert_eq!(v(&SmoothExpr::cos(x.clone()), 0.0), re(1.0));
        let p = SmoothExpr::sub(SmoothExpr::powi(x.clone(), 2), SmoothExpr::one());
        assert_eq!(v(&p, 2.0), re(3.0));
        let inv = SmoothExpr::div(SmoothExpr::one(), x);
        assert!(matches!(
            inv.evaluate(0.0),
            Err(EvalError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn jet_examples() {
        let x = SmoothExpr::x();
        let j = SmoothExpr::sin(x.clone()).eval_jet(0.0, 3).unwrap();
        for (a, b) in j.iter().zip([0.0, 1.0, 0.0, -1.0]) {
            assert!((a - re(b)).norm() < 1e-15);
        }
        let j = SmoothExpr::powi(x.clone(), 2).eval_jet(1.0, 2).unwrap();
        assert_eq!(j, vec![re(1.0), re(2.0), re(2.0)]);
        let j = SmoothExpr::exp(x).eval_jet(0.0, 1).unwrap();
        assert_eq!(j, vec![re(1.0), re(1.0)]);
    }

    #[test]
    fn combine_examples() {
        let x = SmoothExpr::x();
        let s = SmoothExpr::add(x.clone(), SmoothExpr::one());
        assert_eq!(v(&s, 2.0), re(3.0));
        let sq = SmoothExpr::mul(SmoothExpr::sin(x.clone()), SmoothExpr::sin(x.clone()));
        assert!(matches!(sq, SmoothExpr::Pow(_, 2)));
        let sc = SmoothExpr::scale(2.0, SmoothExpr::powi(x, 2));
        assert_eq!(v(&sc, 3.0), re(18.0));
    }

    #[test]
    fn pole_check() {
        let inv = SmoothExpr::div(SmoothExpr::one(), SmoothExpr::x());
        assert!(inv.check_pole_free(1.0, 2.0, 129).is_ok());
        assert!(inv.check_pole_free(-1.0, 1.0, 129).is_err());
    }

    #[test]
    fn printing_complex_constants() {
        assert_eq!(SmoothExpr::constant(Scalar::new(1.0, -2.0)).to_string(), "(1.0-2.0i)");
        assert_eq!(SmoothExpr::real(-3.0).to_string(), "(-3.0)");
        assert_eq!(SmoothExpr::constant(Scalar::new(0.0, 0.5)).to_string(), "0.5i");
    }
}
