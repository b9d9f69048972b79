//! Fold networks: ReLU networks whose linear regions shrink geometrically
//! with depth.
//!
//! A hidden layer of width `n >= n₀` is split into `p = ⌊n / n₀⌋` groups of
//! `n₀` units (the remainder units get all-zero parameters). Unit `j` of
//! group `i` computes `relu(p x_j)` for `i = 1` and `relu(2p x_j - 2(i-1))`
//! otherwise; the alternating sum over the groups folds `[0, 1]` onto itself
//! `p` times in every coordinate:
//!
//! ```text
//! h_p(x) = relu(px) - relu(2px - 2) + relu(2px - 4) - … ,
//! ```
//!
//! a sawtooth with `p` teeth, each mapped onto `[0, 1]`. That alternating sum
//! is folded into the next layer's weights, so a network with hidden widths
//! `n_1..n_{L-1}` computes `out(h_{p_{L-1}} ∘ … ∘ h_{p_1}(x))` for a final
//! positive-weight affine map `out`. Its linear regions are the cubes of side
//! `∏ 1/p_l`, giving fineness `∏ p_l^{-n₀}`.

use std::fmt::Write as _;

use rand::Rng;

use crate::activation::Activation;
use crate::convert::relu_to_pwl;
use crate::error::{Error, Result};
use crate::network::{Layer, Network};
use crate::pwl::{fmt_f64, Interval};
use crate::sampling::draw_rng;
use crate::trace::trace_exact;

#[derive(Clone, Debug, PartialEq)]
pub struct FoldSpec {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    /// `n_L × n₀`, strictly positive.
    pub output_weights: Vec<Vec<f64>>,
    pub output_biases: Vec<f64>,
}

impl FoldSpec {
    /// Single output with unit weights and zero bias.
    pub fn new(input_dim: usize, hidden_widths: Vec<usize>) -> Self {
        FoldSpec { input_dim, hidden_widths, output_weights: vec![vec![1.0; input_dim]], output_biases: vec![0.0] }
    }

    pub fn with_output(mut self, weights: Vec<Vec<f64>>, biases: Vec<f64>) -> Self {
        self.output_weights = weights;
        self.output_biases = biases;
        self
    }

    pub fn output_dim(&self) -> usize {
        self.output_biases.len()
    }

    /// `p_l = ⌊n_l / n₀⌋`.
    pub fn fold_factors(&self) -> Vec<usize> {
        self.hidden_widths.iter().map(|&n| n / self.input_dim.max(1)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Construction("input dimension must be positive".into()));
        }
        if let Some(&n) = self.hidden_widths.iter().find(|&&n| n < self.input_dim) {
            return Err(Error::Construction(format!("hidden width {n} is smaller than the input dimension {}", self.input_dim)));
        }
        if self.output_biases.is_empty() || self.output_weights.len() != self.output_biases.len() {
            return Err(Error::Construction("output weights and biases must describe at least one output".into()));
        }
        if self.output_weights.iter().any(|row| row.len() != self.input_dim) {
            return Err(Error::Construction(format!("output weight rows must have {} entries", self.input_dim)));
        }
        if self.output_weights.iter().flatten().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Construction("output weights must be strictly positive".into()));
        }
        Ok(())
    }
}

/// Coefficient and offset of unit group `i` (0-based): `p x` or `2p x - 2i`.
#[inline]
fn group_map(p: usize, i: usize) -> (f64, f64) {
    if i == 0 {
        (p as f64, 0.0)
    } else {
        (2.0 * p as f64, -2.0 * i as f64)
    }
}

#[inline]
fn alternating_sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The ReLU fold network described by `spec`.
pub fn build_fold_network(spec: &FoldSpec) -> Result<Network> {
    spec.validate()?;
    let n0 = spec.input_dim;
    let factors = spec.fold_factors();
    let mut layers = Vec::with_capacity(spec.hidden_widths.len() + 1);
    let mut prev: Option<(usize, usize)> = None; // (width, p) of the previous hidden layer

    for (&width, &p) in spec.hidden_widths.iter().zip(&factors) {
        let inputs = prev.map_or(n0, |(w, _)| w);
        let mut layer = Layer::zeros(inputs, width);
        for i in 0..p {
            let (coef, offset) = group_map(p, i);
            for j in 0..n0 {
                let unit = i * n0 + j;
                match prev {
                    None => layer.set_weight(unit, j, coef),
                    Some((_, prev_p)) => {
                        for k in 0..prev_p {
                            layer.set_weight(unit, k * n0 + j, coef * alternating_sign(k));
                        }
                    }
                }
                layer.set_bias(unit, offset);
            }
        }
        layers.push(layer);
        prev = Some((width, p));
    }

    let inputs = prev.map_or(n0, |(w, _)| w);
    let mut out = Layer::zeros(inputs, spec.output_dim());
    for (o, row) in spec.output_weights.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            match prev {
                None => out.set_weight(o, j, w),
                Some((_, prev_p)) => {
                    for k in 0..prev_p {
                        out.set_weight(o, k * n0 + j, w * alternating_sign(k));
                    }
                }
            }
        }
        out.set_bias(o, spec.output_biases[o]);
    }
    layers.push(out);
    Network::new(n0, layers, Activation::Relu)
}

/// Closed-form `p`-tooth sawtooth on `[0, 1]`: tooth `t` rises for even `t`
/// and falls for odd `t`.
pub fn sawtooth(p: usize, x: f64) -> f64 {
    let px = p as f64 * x;
    let tooth = (px.floor().max(0.0) as usize).min(p - 1);
    let frac = px - tooth as f64;
    if tooth % 2 == 0 {
        frac
    } else {
        1.0 - frac
    }
}

/// Direct evaluation of `out(h_{p_{L-1}} ∘ … ∘ h_{p_1}(x))` without any
/// network machinery.
pub fn fold_reference(spec: &FoldSpec, x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    for p in spec.fold_factors() {
        for v in y.iter_mut() {
            *v = sawtooth(p, *v);
        }
    }
    spec.output_weights.iter().zip(&spec.output_biases).map(|(row, b)| row.iter().zip(&y).map(|(w, v)| w * v).sum::<f64>() + b).collect()
}

/// `∏ q_l^{n₀}` as an exact integer when it fits in `u128`.
fn exact_denominator(n0: usize, factors: &[usize]) -> Option<u128> {
    factors.iter().try_fold(1u128, |acc, &q| (q as u128).checked_pow(u32::try_from(n0).ok()?).and_then(|v| acc.checked_mul(v)))
}

fn unit_fraction(n0: usize, factors: &[usize]) -> f64 {
    match exact_denominator(n0, factors) {
        // Correctly rounded while the denominator is an exact f64.
        Some(den) if den <= (1u128 << 53) => 1.0 / den as f64,
        _ => factors.iter().map(|&q| (q as f64).powi(-(n0 as i32))).product(),
    }
}

/// `∏_l ⌊n_l / n₀⌋^{-n₀}`: the fineness reachable by a ReLU network with
/// hidden widths `n_l >= n₀`.
pub fn relu_fold_bound(input_dim: usize, hidden_widths: &[usize]) -> Result<f64> {
    if input_dim == 0 {
        return Err(Error::Precondition("input dimension must be positive".into()));
    }
    if let Some(&n) = hidden_widths.iter().find(|&&n| n < input_dim) {
        return Err(Error::Precondition(format!("hidden width {n} < input dimension {input_dim}")));
    }
    let factors: Vec<usize> = hidden_widths.iter().map(|&n| n / input_dim).collect();
    Ok(unit_fraction(input_dim, &factors))
}

/// `∏_l ⌊n_l / 2n₀⌋^{-n₀}`: the fineness reachable with any piecewise-linear
/// activation, for hidden widths `n_l >= 2n₀`.
pub fn pwl_fold_bound(input_dim: usize, hidden_widths: &[usize]) -> Result<f64> {
    if input_dim == 0 {
        return Err(Error::Precondition("input dimension must be positive".into()));
    }
    if let Some(&n) = hidden_widths.iter().find(|&&n| n < 2 * input_dim) {
        return Err(Error::Precondition(format!("hidden width {n} < twice the input dimension {input_dim}")));
    }
    let factors: Vec<usize> = hidden_widths.iter().map(|&n| n / (2 * input_dim)).collect();
    Ok(unit_fraction(input_dim, &factors))
}

/// Outcome of [`verify_depth_bound`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    pub activation: String,
    pub achieved_fineness: f64,
    pub bound: f64,
    pub attains: bool,
    /// Fold factors of the half-width ReLU network.
    pub fold_factors: Vec<usize>,
    /// Largest deviation from the closed-form reference at random points.
    pub max_value_error: f64,
}

pub const BOUND_TOL: f64 = 1e-12;
pub const VALUE_TOL: f64 = 1e-6;

impl BoundReport {
    pub const CSV_HEADER: &'static str = "input_dim,hidden_widths,activation,achieved_fineness,bound,attains,fold_factors,max_value_error";

    pub fn csv_row(&self) -> String {
        let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{},{},{},{},{}",
            self.input_dim,
            join(&self.hidden_widths),
            self.activation,
            fmt_f64(self.achieved_fineness),
            fmt_f64(self.bound),
            self.attains,
            join(&self.fold_factors),
            fmt_f64(self.max_value_error)
        );
        row
    }
}

fn activation_label(act: &Activation) -> String {
    match act {
        Activation::Relu => "relu".into(),
        Activation::Pwl(p) if *p == crate::activation::PwlActivation::hard_tanh() => "hard_tanh".into(),
        Activation::Pwl(p) => format!("pwl[{} breakpoints]", p.breakpoints().len()),
    }
}

/// Build the half-width fold network, rewrite it for `target`, and measure
/// its fineness against [`pwl_fold_bound`].
///
/// For `n₀ = 1` the fineness is traced exactly. For `n₀ >= 2` the network is
/// traced along one axis-aligned line per coordinate and the per-axis
/// fineness values are multiplied, which is exact for the separable fold
/// construction.
pub fn verify_depth_bound(input_dim: usize, hidden_widths: &[usize], target: &Activation) -> Result<BoundReport> {
    let bound = pwl_fold_bound(input_dim, hidden_widths)?;
    let half: Vec<usize> = hidden_widths.iter().map(|&n| n / 2).collect();
    let spec = FoldSpec::new(input_dim, half);
    let fold = build_fold_network(&spec)?;
    let unit_box = vec![(0.0, 1.0); input_dim];
    let converted = relu_to_pwl(&fold, target, &unit_box)?.pad_hidden_widths(hidden_widths)?;

    let achieved_fineness = if input_dim == 1 {
        trace_exact(&converted, Interval::UNIT)?.fineness()
    } else {
        let base = vec![0.5; input_dim];
        let mut product = 1.0;
        for axis in 0..input_dim {
            product *= trace_exact(&converted.restrict_to_axis(&base, axis)?, Interval::UNIT)?.fineness();
        }
        product
    };

    let mut rng = draw_rng(0x5eed_f01d, input_dim as u64);
    let mut max_value_error: f64 = 0.0;
    for _ in 0..1000 {
        let x: Vec<f64> = (0..input_dim).map(|_| rng.random::<f64>()).collect();
        let expected = fold_reference(&spec, &x);
        let got = converted.forward(&x)?;
        for (a, b) in got.iter().zip(&expected) {
            max_value_error = max_value_error.max((a - b).abs() / (1.0 + b.abs()));
        }
    }

    Ok(BoundReport {
        input_dim,
        hidden_widths: hidden_widths.to_vec(),
        activation: activation_label(target),
        achieved_fineness,
        bound,
        attains: achieved_fineness <= bound + BOUND_TOL && max_value_error <= VALUE_TOL,
        fold_factors: spec.fold_factors(),
        max_value_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pwl::check_identification;

    #[test]
    fn tent_map() {
        let net = build_fold_network(&FoldSpec::new(1, vec![2])).unwrap();
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            let expected = if x <= 0.5 { 2.0 * x } else { 2.0 - 2.0 * x };
            assert!((net.forward(&[x]).unwrap()[0] - expected).abs() < 1e-15);
        }
        assert_eq!(net.forward(&[0.75]).unwrap(), vec![0.5]);
    }

    #[test]
    fn three_teeth() {
        let net = build_fold_network(&FoldSpec::new(1, vec![3])).unwrap();
        let h = trace_exact(&net, Interval::UNIT).unwrap();
        assert_eq!(h.breakpoints().len(), 2);
        assert!((h.breakpoints()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((h.breakpoints()[1] - 2.0 / 3.0).abs() < 1e-15);
        let id = check_identification(&h, Interval::UNIT);
        assert!(id.holds);
        assert_eq!(id.pieces, 3);
    }

    #[test]
    fn remainder_units_are_zero() {
        let net = build_fold_network(&FoldSpec::new(2, vec![5])).unwrap();
        let l = &net.layers()[0];
        assert!(l.row(4).iter().all(|&w| w == 0.0));
        assert_eq!(l.biases()[4], 0.0);
        assert!(net.layers()[1].row(0)[4] == 0.0);
    }

    #[test]
    fn narrow_width_is_rejected() {
        assert!(matches!(build_fold_network(&FoldSpec::new(2, vec![1])), Err(Error::Construction(_))));
        let bad_out = FoldSpec::new(1, vec![2]).with_output(vec![vec![-1.0]], vec![0.0]);
        assert!(build_fold_network(&bad_out).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(relu_fold_bound(1, &[4, 4, 4, 4, 4]).unwrap(), 1.0 / 1024.0);
        assert_eq!(relu_fold_bound(1, &[1]).unwrap(), 1.0);
        assert_eq!(relu_fold_bound(2, &[6, 6]).unwrap(), 1.0 / 81.0);
        assert_eq!(pwl_fold_bound(1, &[4, 4, 4, 4, 4]).unwrap(), 0.03125);
        assert_eq!(pwl_fold_bound(1, &[20]).unwrap(), 0.1);
        assert_eq!(pwl_fold_bound(1, &[2]).unwrap(), 1.0);
        assert!(matches!(pwl_fold_bound(2, &[4, 3]), Err(Error::Precondition(_))));
        assert!(relu_fold_bound(3, &[2]).is_err());
    }

    #[test]
    fn huge_bounds_fall_back_to_floating_point() {
        let widths = vec![1000; 20];
        let b = relu_fold_bound(1, &widths).unwrap();
        assert!((b / 1e-60 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sawtooth_matches_network() {
        for p in 1..=7 {
            let net = build_fold_network(&FoldSpec::new(1, vec![p])).unwrap();
            for k in 0..=500 {
                let x = k as f64 / 500.0;
                assert!((net.forward(&[x]).unwrap()[0] - sawtooth(p, x)).abs() < 1e-12, "p = {p}, x = {x}");
            }
        }
    }

    #[test]
    fn verify_network_shapes() {
        for widths in [vec![4, 4, 4, 4, 4], vec![20]] {
            let rep = verify_depth_bound(1, &widths, &Activation::hard_tanh()).unwrap();
            assert!(rep.attains, "{rep:?}");
            assert!(rep.achieved_fineness <= rep.bound + BOUND_TOL);
            assert!(rep.max_value_error <= VALUE_TOL);
        }
    }

    #[test]
    fn verify_relu_target_matches_half_width_fold() {
        let rep = verify_depth_bound(1, &[6, 7, 4], &Activation::Relu).unwrap();
        let half = build_fold_network(&FoldSpec::new(1, vec![3, 3, 2])).unwrap();
        assert_eq!(rep.achieved_fineness, trace_exact(&half, Interval::UNIT).unwrap().fineness());
    }

    #[test]
    fn verify_two_dimensional_input() {
        let rep = verify_depth_bound(2, &[8, 8], &Activation::hard_tanh()).unwrap();
        assert_eq!(rep.fold_factors, vec![2, 2]);
        assert!((rep.bound - 1.0 / 16.0).abs() < 1e-15);
        assert!(rep.attains, "{rep:?}");
    }

    #[test]
    fn csv_row_shape() {
        let rep = verify_depth_bound(1, &[20], &Activation::hard_tanh()).unwrap();
        assert_eq!(rep.csv_row().split(',').count(), BoundReport::CSV_HEADER.split(',').count());
    }
}
