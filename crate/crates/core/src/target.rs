//! Target functions `F*` on `[0, 1]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible truncation tail `a^{K+1} / (1 - a)`.
pub const WEIERSTRASS_TAIL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetFunction {
    /// `sin(4πx)`.
    Sin4Pi,
    /// `Σ_{k=0}^{K} a^k cos(b^k π x)`.
    Weierstrass { a: f64, b: f64, terms: u32 },
}

impl TargetFunction {
    /// `a = 0.5`, `b = 13`, `K = 30`; `ab` exceeds `1 + 3π/2`.
    pub const DEFAULT_WEIERSTRASS: TargetFunction = TargetFunction::Weierstrass { a: 0.5, b: 13.0, terms: 30 };

    pub fn weierstrass(a: f64, b: f64, terms: u32) -> Result<Self> {
        let t = TargetFunction::Weierstrass { a, b, terms };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if let TargetFunction::Weierstrass { a, b, terms } = *self {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Config(format!("weierstrass amplitude ratio a = {a} must lie in (0, 1)")));
            }
            if !(b > 1.0 && b.is_finite()) {
                return Err(Error::Config(format!("weierstrass frequency base b = {b} must exceed 1")));
            }
            let tail = a.powi(terms as i32 + 1) / (1.0 - a);
            if !(tail < WEIERSTRASS_TAIL_TOL) {
                return Err(Error::Config(format!("weierstrass truncation K = {terms} leaves a tail of {tail:e}")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            TargetFunction::Sin4Pi => "sin4pi",
            TargetFunction::Weierstrass { .. } => "weierstrass",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TargetFunction::Sin4Pi => (4.0 * PI * x).sin(),
            TargetFunction::Weierstrass { a, b, terms } => {
                let (mut amp, mut freq, mut sum) = (1.0, 1.0, 0.0);
                for _ in 0..=terms {
                    sum += amp * (freq * PI * x).cos();
                    amp *= a;
                    freq *= b;
                }
                sum
            }
        }
    }

    pub fn eval_grid(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}
