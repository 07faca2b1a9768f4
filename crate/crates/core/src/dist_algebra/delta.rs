use crate::{binom, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaTerm {
    pub x: f64,
    pub order: usize,
    pub coef: Scalar,
}

/// Finite combination `sum c_ij delta^(j)(x - x_i)`, kept sorted by point
/// and order with no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeltaPart {
    terms: Vec<DeltaTerm>,
}

impl DeltaPart {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(x: f64, order: usize, coef: Scalar) -> Self {
        let mut d = Self::new();
        d.insert(x, order, coef);
        d
    }

    pub fn terms(&self) -> &[DeltaTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Distinct points carrying at least one term.
    pub fn points(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.terms.iter().map(|t| t.x).collect();
        p.dedup();
        p
    }

    pub fn max_order(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.order).max()
    }

    pub fn coef(&self, x: f64, order: usize) -> Scalar {
        self.terms
            .iter()
            .find(|t| t.x == x && t.order == order)
            .map_or(Scalar::new(0.0, 0.0), |t| t.coef)
    }

    /// Adds `coef * delta^(order)(x - point)`.
    pub fn insert(&mut self, x: f64, order: usize, coef: Scalar) {
        let key = |t: &DeltaTerm| (t.x, t.order);
        match self.terms.binary_search_by(|t| {
            key(t)
                .0
                .total_cmp(&x)
                .then(key(t).1.cmp(&order))
        }) {
            Ok(i) => {
                self.terms[i].coef += coef;
                if self.terms[i].coef == Scalar::new(0.0, 0.0) {
                    self.terms.remove(i);
                }
            }
            Err(i) => {
                if coef != Scalar::new(0.0, 0.0) {
                    self.terms.insert(i, DeltaTerm { x, order, coef });
                }
            }
        }
    }

    pub fn add(&self, other: &DeltaPart) -> DeltaPart {
        let mut out = self.clone();
        for t in &other.terms {
            out.insert(t.x, t.order, t.coef);
        }
        out
    }

    pub fn scale(&self, c: Scalar) -> DeltaPart {
        let mut out = DeltaPart::new();
        for t in &self.terms {
            out.insert(t.x, t.order, t.coef * c);
        }
        out
    }

    /// Raises every order by `k` (distributional differentiation).
    pub fn shift_orders(&self, k: usize) -> DeltaPart {
        DeltaPart {
            terms: self
                .terms
                .iter()
                .map(|t| DeltaTerm {
                    order: t.order + k,
                    ..*t
                })
                .collect(),
        }
    }

    /// Keeps terms whose point satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(f64) -> bool) -> DeltaPart {
        DeltaPart {
            terms: self.terms.iter().copied().filter(|t| keep(t.x)).collect(),
        }
    }

    /// Largest coefficient modulus, 0 when empty.
    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|t| t.coef.norm()).fold(0.0, f64::max)
    }
}

/// Adds `coef * g(x) delta^(k)(x - x0)` to `out`, where `jet[j] = g^(j)(x0)`
/// for `j <= k`:
/// `g delta^(k) = sum_j C(k,j) (-1)^j g^(j)(x0) delta^(k-j)`.
pub fn expand_into(out: &mut DeltaPart, jet: &[Scalar], x0: f64, k: usize, coef: Scalar) {
    for (j, g) in jet.iter().enumerate().take(k + 1) {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.insert(x0, k - j, coef * g * (sign * binom(k, j)));
    }
}
