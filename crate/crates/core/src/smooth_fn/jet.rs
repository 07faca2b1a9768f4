//! Truncated Taylor arithmetic.
//!
//! A [`Taylor`] holds normalized coefficients `t[j] = f^(j)(x0) / j!` of a
//! function at a fixed point. Products, quotients and the elementary
//! functions follow the usual recurrences, so a full jet of an expression
//! tree costs `O(k^2)` per node instead of repeated symbolic differentiation.

use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Taylor(pub Vec<Scalar>);

fn zero() -> Scalar {
    Scalar::new(0.0, 0.0)
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

impl Taylor {
    pub fn constant(c: Scalar, order: usize) -> Self {
        let mut t = vec![zero(); order + 1];
        t[0] = c;
        Taylor(t)
    }

    /// The identity function `x` expanded around `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut t = Self::constant(Scalar::new(x0, 0.0), order);
        if order >= 1 {
            t.0[1] = Scalar::new(1.0, 0.0);
        }
        t
    }

    /// Builds a Taylor jet from plain derivatives `d[j] = f^(j)(x0)`.
    pub fn from_derivatives(d: &[Scalar]) -> Self {
        Taylor(
            d.iter()
                .enumerate()
                .map(|(j, v)| v / factorial(j))
                .collect(),
        )
    }

    pub fn to_derivatives(&self) -> Vec<Scalar> {
        self.0
            .iter()
            .enumerate()
            .map(|(j, v)| v * factorial(j))
            .collect()
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> Scalar {
        self.0[0]
    }

    pub fn add(&self, other: &Taylor) -> Taylor {
        Taylor(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Taylor) -> Taylor {
        Taylor(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Taylor {
        Taylor(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: Scalar) -> Taylor {
        Taylor(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Taylor) -> Taylor {
        let k = self.0.len().min(other.0.len());
        let mut out = vec![zero(); k];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = zero();
            for j in 0..=i {
                acc += self.0[j] * other.0[i - j];
            }
            *slot = acc;
        }
        Taylor(out)
    }

    /// Quotient; `None` when the divisor vanishes at the expansion point.
    pub fn div(&self, other: &Taylor) -> Option<Taylor> {
        let b0 = other.0[0];
        if b0 == zero() {
            return None;
        }
        let k = self.0.len().min(other.0.len());
        let mut q = vec![zero(); k];
        for i in 0..k {
            let mut acc = self.0[i];
            for j in 0..i {
                acc -= q[j] * other.0[i - j];
            }
            q[i] = acc / b0;
        }
        Some(Taylor(q))
    }

    pub fn exp(&self) -> Taylor {
        let k = self.0.len();
        let mut e = vec![zero(); k];
        e[0] = self.0[0].exp();
        for i in 1..k {
            let mut acc = zero();
            for j in 1..=i {
                acc += self.0[j] * e[i - j] * j as f64;
            }
            e[i] = acc / i as f64;
        }
        Taylor(e)
    }

    /// Returns `(sin, cos)` of the series.
    pub fn sin_cos(&self) -> (Taylor, Taylor) {
        let k = self.0.len();
        let mut s = vec![zero(); k];
        let mut c = vec![zero(); k];
        s[0] = self.0[0].sin();
        c[0] = self.0[0].cos();
        for i in 1..k {
            let mut acc_s = zero();
            let mut acc_c = zero();
            for j in 1..=i {
                let w = self.0[j] * j as f64;
                acc_s += w * c[i - j];
                acc_c -= w * s[i - j];
            }
            s[i] = acc_s / i as f64;
            c[i] = acc_c / i as f64;
        }
        (Taylor(s), Taylor(c))
    }

    /// Integer power; `None` for a negative power of a series that vanishes.
    pub fn powi(&self, n: i32) -> Option<Taylor> {
        let order = self.order();
        let mut base = self.clone();
        let mut acc = Taylor::constant(Scalar::new(1.0, 0.0), order);
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if n < 0 {
            Taylor::constant(Scalar::new(1.0, 0.0), order).div(&acc)
        } else {
            Some(acc)
        }
    }
}
