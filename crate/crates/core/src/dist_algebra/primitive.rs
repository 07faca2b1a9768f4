use std::sync::Arc;

use crate::quadrature;
use crate::smooth_fn::{EvalError, JetFn, SmoothExpr};
use crate::Scalar;

/// `offset + integral_anchor^x f`, evaluated by adaptive quadrature.
#[derive(Debug)]
pub(crate) struct Primitive {
    f: SmoothExpr,
    anchor: f64,
    offset: Scalar,
}

impl Primitive {
    /// Symbolic when `f` is constant, numeric otherwise.
    pub(crate) fn expr(f: &SmoothExpr, anchor: f64, offset: Scalar) -> SmoothExpr {
        if let Some(c) = f.as_const() {
            let lin = SmoothExpr::scale(c, SmoothExpr::sub(SmoothExpr::x(), SmoothExpr::real(anchor)));
            return SmoothExpr::add(SmoothExpr::constant(offset), lin);
        }
        SmoothExpr::opaque(Arc::new(Primitive {
            f: f.clone(),
            anchor,
            offset,
        }))
    }
}

impl JetFn for Primitive {
    fn jet(&self, x: f64, maxk: usize) -> Result<Vec<Scalar>, EvalError> {
        let v = quadrature::integrate(
            |s| Ok(self.f.evaluate(s)?),
            self.anchor,
            x,
            &[],
            quadrature::DEFAULT_ABS_TOL * 1e-2,
        )
        .map_err(|e| EvalError::Numeric(e.to_string()))?;
        let mut out = vec![self.offset + v];
        if maxk > 0 {
            out.extend(self.f.eval_jet(x, maxk - 1)?);
        }
        Ok(out)
    }

    fn label(&self) -> String {
        format!("primitive[{}]", self.f)
    }
}
