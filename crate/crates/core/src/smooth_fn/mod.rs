//! Globally smooth scalar functions of one real variable.

mod expr;
mod jet;
mod parser;

pub use expr::{JetFn, SmoothExpr};
pub use jet::Taylor;
pub use parser::{parse_expr, ParseError};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("{0}")]
    Numeric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Mul,
    Scale,
}

/// Builds a sum, product or scalar multiple of expressions.
///
/// `Scale` takes the factor as a constant expression in `args[0]`. Empty
/// sums and products reduce to 0 and 1.
pub fn combine(op: CombineOp, args: &[SmoothExpr]) -> SmoothExpr {
    match op {
        CombineOp::Add => args
            .iter()
            .cloned()
            .reduce(SmoothExpr::add)
            .unwrap_or_else(SmoothExpr::zero),
        CombineOp::Mul | CombineOp::Scale => args
            .iter()
            .cloned()
            .reduce(SmoothExpr::mul)
            .unwrap_or_else(SmoothExpr::one),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;
    use proptest::prelude::*;

    fn arb_expr() -> impl Strategy<Value = SmoothExpr> {
        let leaf = prop_oneof![
            (-3.0f64..3.0).prop_map(SmoothExpr::real),
            Just(SmoothExpr::x()),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SmoothExpr::Add(a.into(), b.into())),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SmoothExpr::Sub(a.into(), b.into())),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SmoothExpr::Mul(a.into(), b.into())),
                // divisor kept away from zero
                inner.clone().prop_map(|a| SmoothExpr::Div(
                    a.into(),
                    SmoothExpr::add(SmoothExpr::real(2.0), SmoothExpr::sin(SmoothExpr::x())).into()
                )),
                (inner.clone(), 0i32..4).prop_map(|(a, n)| SmoothExpr::Pow(a.into(), n)),
                inner.clone().prop_map(|a| SmoothExpr::Neg(a.into())),
                inner.clone().prop_map(SmoothExpr::sin),
                inner.clone().prop_map(SmoothExpr::cos),
                // bounded argument keeps exp tame
                inner.prop_map(|a| SmoothExpr::exp(SmoothExpr::sin(a))),
            ]
        })
    }

    #[test]
    fn combine_examples() {
        let x = SmoothExpr::x();
        let s = combine(CombineOp::Add, &[x.clone(), SmoothExpr::one()]);
        assert_eq!(s.to_string(), "(x + 1.0)");
        let sq = combine(
            CombineOp::Mul,
            &[SmoothExpr::sin(x.clone()), SmoothExpr::sin(x.clone())],
        );
        assert_eq!(sq.to_string(), "(sin(x))^2");
        let sc = combine(CombineOp::Scale, &[SmoothExpr::real(2.0), SmoothExpr::powi(x, 2)]);
        assert_eq!(sc.evaluate(3.0).unwrap(), Scalar::new(18.0, 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn derivative_matches_finite_difference(e in arb_expr(), x in -5.0f64..5.0) {
            let h = 1e-5;
            let d = e.differentiate(1).evaluate(x).unwrap();
            let fd = (e.evaluate(x + h).unwrap() - e.evaluate(x - h).unwrap()) / (2.0 * h);
            let scale = 1.0 + e.evaluate(x).unwrap().norm().max(d.norm());
            prop_assert!((d - fd).norm() <= 1e-6 * scale, "d={d} fd={fd} e={e}");
        }

        #[test]
        fn jet_matches_repeated_differentiation(e in arb_expr(), x in -5.0f64..5.0) {
            let jet = e.eval_jet(x, 4).unwrap();
            for (j, v) in jet.iter().enumerate() {
                let w = e.differentiate(j).evaluate(x).unwrap();
                prop_assert!((v - w).norm() <= 1e-9 * (1.0 + w.norm()), "j={j} {v} vs {w}");
            }
        }

        #[test]
        fn print_parse_roundtrip(e in arb_expr()) {
            let back = parse_expr(&e.to_string()).unwrap();
            for s in 0..16 {
                let x = -5.0 + 10.0 * s as f64 / 15.0;
                let a = e.evaluate(x).unwrap();
                let b = back.evaluate(x).unwrap();
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }

        #[test]
        fn differentiation_is_linear(e1 in arb_expr(), e2 in arb_expr(), a in -2.0f64..2.0, b in -2.0f64..2.0, x in -5.0f64..5.0) {
            let lin = SmoothExpr::add(SmoothExpr::scale(a, e1.clone()), SmoothExpr::scale(b, e2.clone()));
            let lhs = lin.differentiate(1).evaluate(x).unwrap();
            let rhs = e1.differentiate(1).evaluate(x).unwrap() * a + e2.differentiate(1).evaluate(x).unwrap() * b;
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }
    }
}
