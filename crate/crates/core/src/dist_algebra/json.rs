use serde::{Deserialize, Serialize};

use super::{DeltaPart, DistA};
use crate::error::{Error, Result};
use crate::smooth_fn::{parse_expr, SmoothExpr};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaJson {
    pub x: f64,
    pub order: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Wire form of [`DistA`]: pieces are expression strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistAJson {
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<String>,
    #[serde(default)]
    pub deltas: Vec<DeltaJson>,
}

impl DistAJson {
    pub fn to_dist(&self) -> Result<DistA> {
        let pieces = self
            .pieces
            .iter()
            .map(|s| parse_expr(s))
            .collect::<std::result::Result<Vec<SmoothExpr>, _>>()?;
        let mut d = DeltaPart::new();
        for t in &self.deltas {
            d.insert(t.x, t.order, Scalar::new(t.re, t.im));
        }
        DistA::from_parts(self.breakpoints.clone(), pieces, d)
    }

    pub fn from_dist(f: &DistA) -> Result<Self> {
        if let Some(p) = f.pieces().iter().find(|p| !p.is_symbolic()) {
            return Err(Error::Invalid(format!("piece {p} has no closed form")));
        }
        Ok(DistAJson {
            breakpoints: f.breakpoints().to_vec(),
            pieces: f.pieces().iter().map(|p| p.to_string()).collect(),
            deltas: f
                .deltas()
                .terms()
                .iter()
                .map(|t| DeltaJson {
                    x: t.x,
                    order: t.order,
                    re: t.coef.re,
                    im: t.coef.im,
                })
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let src = r#"{"breakpoints":[0.0],"pieces":["1","sin(x)"],"deltas":[{"x":0.0,"order":3,"re":0.5}]}"#;
        let j: DistAJson = serde_json::from_str(src).unwrap();
        let f = j.to_dist().unwrap();
        assert_eq!(f.deltas().coef(0.0, 3), Scalar::new(0.5, 0.0));
        let back = DistAJson::from_dist(&f).unwrap().to_dist().unwrap();
        assert!(back.equals(&f, 1e-15));
    }

    #[test]
    fn rejects_bad_piece_count() {
        let j: DistAJson = serde_json::from_str(r#"{"breakpoints":[0.0],"pieces":["1"]}"#).unwrap();
        assert!(j.to_dist().is_err());
    }
}
