//! Piecewise-linear activation functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A continuous piecewise-linear activation.
///
/// `Relu` is kept as its own variant so the common case evaluates with a
/// single `max`, but it is exactly equivalent to
/// `Pwl(PwlActivation::relu())`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Pwl(PwlActivation),
}

/// Generic continuous piecewise-linear activation.
///
/// With breakpoints `t[0] < … < t[m-1]` the function has `m + 1` pieces;
/// piece `j` spans `[t[j-1], t[j]]` (unbounded at both ends) and has slope
/// `slopes[j]`. The value at `t[0]` pins the vertical offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PwlActivationDoc", into = "PwlActivationDoc")]
pub struct PwlActivation {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    knot_values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PwlActivationDoc {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    value_at_first_breakpoint: f64,
}

impl TryFrom<PwlActivationDoc> for PwlActivation {
    type Error = Error;

    fn try_from(doc: PwlActivationDoc) -> Result<Self> {
        PwlActivation::new(doc.breakpoints, doc.slopes, doc.value_at_first_breakpoint)
    }
}

impl From<PwlActivation> for PwlActivationDoc {
    fn from(act: PwlActivation) -> Self {
        PwlActivationDoc {
            value_at_first_breakpoint: act.knot_values.first().copied().unwrap_or(0.0),
            breakpoints: act.breakpoints,
            slopes: act.slopes,
        }
    }
}

impl PwlActivation {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, value_at_first_breakpoint: f64) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::Activation(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len()
            )));
        }
        if breakpoints.iter().chain(&slopes).any(|v| !v.is_finite()) || !value_at_first_breakpoint.is_finite() {
            return Err(Error::Activation("non-finite breakpoint, slope or value".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Activation("breakpoints must be strictly increasing".into()));
        }
        if slopes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Activation("adjacent slopes must differ at every breakpoint".into()));
        }
        let mut knot_values = Vec::with_capacity(breakpoints.len());
        if let Some(&first) = breakpoints.first() {
            knot_values.push(value_at_first_breakpoint);
            let mut prev = (first, value_at_first_breakpoint);
            for (i, &t) in breakpoints.iter().enumerate().skip(1) {
                let v = prev.1 + slopes[i] * (t - prev.0);
                knot_values.push(v);
                prev = (t, v);
            }
        }
        Ok(PwlActivation { breakpoints, slopes, knot_values })
    }

    /// `max(0, x)` written out as a generic activation.
    pub fn relu() -> Self {
        PwlActivation::new(vec![0.0], vec![0.0, 1.0], 0.0).expect("valid relu")
    }

    /// `clamp(x, -1, 1)`.
    pub fn hard_tanh() -> Self {
        PwlActivation::new(vec![-1.0, 1.0], vec![0.0, 1.0, 0.0], -1.0).expect("valid hard tanh")
    }

    /// `|x|`.
    pub fn abs() -> Self {
        PwlActivation::new(vec![0.0], vec![-1.0, 1.0], 0.0).expect("valid abs")
    }

    /// Leaky ReLU with the given negative-side slope.
    pub fn leaky_relu(negative_slope: f64) -> Result<Self> {
        PwlActivation::new(vec![0.0], vec![negative_slope, 1.0], 0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.knot_values
    }

    /// Index of the piece containing `x`; a point sitting exactly on a
    /// breakpoint is assigned to the piece on its left.
    #[inline]
    pub fn piece_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&t| t < x)
    }

    /// `(slope, offset)` such that the activation equals `slope * x + offset`
    /// on piece `j`.
    pub fn piece_affine(&self, j: usize) -> (f64, f64) {
        if self.breakpoints.is_empty() {
            return (self.slopes[0], 0.0);
        }
        let anchor = j.saturating_sub(1);
        let (t, v) = (self.breakpoints[anchor], self.knot_values[anchor]);
        let s = self.slopes[j];
        (s, v - s * t)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if self.breakpoints.is_empty() {
            return self.slopes[0] * x;
        }
        let j = self.piece_index(x);
        let anchor = j.saturating_sub(1);
        self.knot_values[anchor] + self.slopes[j] * (x - self.breakpoints[anchor])
    }
}

impl Activation {
    pub fn hard_tanh() -> Self {
        Activation::Pwl(PwlActivation::hard_tanh())
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Pwl(p) => p.eval(x),
        }
    }

    /// The equivalent generic description.
    pub fn to_pwl(&self) -> PwlActivation {
        match self {
            Activation::Relu => PwlActivation::relu(),
            Activation::Pwl(p) => p.clone(),
        }
    }

    pub fn is_relu(&self) -> bool {
        matches!(self, Activation::Relu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_and_generic_relu_agree() {
        let generic = Activation::Pwl(PwlActivation::relu());
        for &x in &[-3.5, -1e-300, 0.0, 1e-300, 0.25, 7.0] {
            assert_eq!(Activation::Relu.eval(x), generic.eval(x), "x = {x}");
        }
    }

    #[test]
    fn hard_tanh_values() {
        let h = PwlActivation::hard_tanh();
        assert_eq!(h.eval(-5.0), -1.0);
        assert_eq!(h.eval(-1.0), -1.0);
        assert!((h.eval(0.3) - 0.3).abs() < 1e-15);
        assert_eq!(h.eval(1.0), 1.0);
        assert_eq!(h.eval(2.0), 1.0);
        assert_eq!(h.knot_values(), &[-1.0, 1.0]);
    }

    #[test]
    fn piece_affine_matches_eval() {
        let h = PwlActivation::new(vec![-1.0, 0.5, 2.0], vec![0.3, -1.0, 2.0, 0.0], 4.0).unwrap();
        for &x in &[-3.0, -1.0, -0.2, 0.5, 1.0, 2.0, 9.0] {
            let (s, c) = h.piece_affine(h.piece_index(x));
            assert!((s * x + c - h.eval(x)).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn rejects_fake_kink_and_unsorted() {
        assert!(PwlActivation::new(vec![0.0], vec![1.0, 1.0], 0.0).is_err());
        assert!(PwlActivation::new(vec![1.0, 0.0], vec![0.0, 1.0, 0.0], 0.0).is_err());
        assert!(PwlActivation::new(vec![0.0], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let act = Activation::hard_tanh();
        let text = serde_json::to_string(&act).unwrap();
        let back: Activation = serde_json::from_str(&text).unwrap();
        assert_eq!(act, back);
        let relu: Activation = serde_json::from_str(r#"{"kind":"relu"}"#).unwrap();
        assert_eq!(relu, Activation::Relu);
    }
}
