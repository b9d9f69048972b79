//! Rewriting a ReLU network for an arbitrary piecewise-linear activation.
//!
//! Each hidden ReLU unit `a = relu(z)` becomes two units of the target
//! activation `σ`:
//!
//! * a *kink* unit `u = σ(t₀ + δ z)` sitting on a breakpoint `t₀` where the
//!   slope changes from `s₋` to `s₊`, and
//! * a *carrier* unit `v = σ(t₁ + δ z)` sitting inside a single piece of
//!   nonzero slope `s_c`, which passes `z` through linearly.
//!
//! As long as `δ |z|` keeps both units inside their pieces,
//! `relu(z) = α u + β v + γ` with `α = 1 / (δ (s₊ - s₋))`,
//! `β = -α s₋ / s_c` and `γ = -α σ(t₀) - β σ(t₁)`; the next layer absorbs
//! that affine map into its weights. Reachable pre-activations are bounded by
//! interval arithmetic over the input box.

use crate::activation::{Activation, PwlActivation};
use crate::error::{Error, Result};
use crate::network::{Layer, Network};

/// Per hidden layer, per unit, the interval of reachable pre-activations.
pub fn preactivation_bounds(net: &Network, input_box: &[(f64, f64)]) -> Result<Vec<Vec<(f64, f64)>>> {
    if input_box.len() != net.input_dim() {
        return Err(Error::Shape(format!("input box has {} coordinates, network expects {}", input_box.len(), net.input_dim())));
    }
    if input_box.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        return Err(Error::Unbounded(format!("input box {input_box:?} is not a bounded box")));
    }
    let act = net.activation().to_pwl();
    let mut current: Vec<(f64, f64)> = input_box.to_vec();
    let mut out = Vec::with_capacity(net.depth() - 1);
    for layer in &net.layers()[..net.depth() - 1] {
        let pre: Vec<(f64, f64)> = (0..layer.outputs())
            .map(|j| {
                let b = layer.biases()[j];
                layer.row(j).iter().zip(&current).fold((b, b), |(lo, hi), (&w, &(a, c))| {
                    let (p, q) = (w * a, w * c);
                    (lo + p.min(q), hi + p.max(q))
                })
            })
            .collect();
        current = pre.iter().map(|&(lo, hi)| image_of_interval(&act, lo, hi)).collect();
        out.push(pre);
    }
    Ok(out)
}

fn image_of_interval(act: &PwlActivation, lo: f64, hi: f64) -> (f64, f64) {
    let inner = act.breakpoints().iter().copied().filter(|&t| t > lo && t < hi);
    std::iter::once(lo)
        .chain(inner)
        .chain(std::iter::once(hi))
        .map(|x| act.eval(x))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

/// The two-unit emulation of `relu` by a given activation.
#[derive(Clone, Debug, PartialEq)]
pub struct ReluEmulation {
    pub kink: f64,
    pub slope_left: f64,
    pub slope_right: f64,
    pub carrier: f64,
    pub carrier_slope: f64,
    pub delta: f64,
}

impl ReluEmulation {
    /// Pick the kink, the carrier and `δ` for pre-activations with
    /// `|z| <= z_bound`.
    pub fn plan(act: &PwlActivation, z_bound: f64) -> Result<Self> {
        let t = act.breakpoints();
        let s = act.slopes();
        if t.is_empty() {
            return Err(Error::NoKink);
        }
        if !z_bound.is_finite() {
            return Err(Error::Unbounded(format!("pre-activation bound {z_bound}")));
        }
        let kink = t[0];
        let kink_room = if t.len() > 1 { t[1] - t[0] } else { f64::INFINITY };

        // Carrier: the nonzero-slope piece with the most room around its centre.
        let room = |j: usize| -> f64 {
            if j == 0 || j == t.len() {
                f64::INFINITY
            } else {
                0.5 * (t[j] - t[j - 1])
            }
        };
        let carrier_piece =
            (0..s.len()).filter(|&j| s[j] != 0.0).max_by(|&a, &b| room(a).total_cmp(&room(b)).then(b.cmp(&a))).ok_or(Error::NoKink)?;

        let limit = kink_room.min(room(carrier_piece));
        let delta = if limit.is_finite() { 0.5 * limit / (z_bound + 1.0) } else { 1.0 };
        let carrier = if carrier_piece == t.len() {
            t[t.len() - 1] + delta * z_bound + 1.0
        } else if carrier_piece == 0 {
            t[0] - delta * z_bound - 1.0
        } else {
            0.5 * (t[carrier_piece - 1] + t[carrier_piece])
        };
        Ok(ReluEmulation { kink, slope_left: s[0], slope_right: s[1], carrier, carrier_slope: s[carrier_piece], delta })
    }

    /// `(α, β, γ)` with `relu(z) = α σ(t₀ + δz) + β σ(t₁ + δz) + γ`.
    pub fn recombination(&self, act: &PwlActivation) -> (f64, f64, f64) {
        let alpha = 1.0 / (self.delta * (self.slope_right - self.slope_left));
        let beta = -alpha * self.slope_left / self.carrier_slope;
        let gamma = -alpha * act.eval(self.kink) - beta * act.eval(self.carrier);
        (alpha, beta, gamma)
    }
}

/// Result of [`relu_to_pwl_detailed`].
#[derive(Clone, Debug)]
pub struct Conversion {
    pub network: Network,
    pub emulation: ReluEmulation,
    /// Largest reachable `|z|` over all hidden units.
    pub z_bound: f64,
    pub original_params: usize,
}

impl Conversion {
    /// Whether the converted network stays within four times the original
    /// parameter count.
    pub fn within_param_budget(&self) -> bool {
        self.network.param_count() <= 4 * self.original_params
    }
}

/// Same function on `input_box`, target activation, doubled hidden widths.
pub fn relu_to_pwl(net: &Network, target: &Activation, input_box: &[(f64, f64)]) -> Result<Network> {
    relu_to_pwl_detailed(net, target, input_box).map(|c| c.network)
}

pub fn relu_to_pwl_detailed(net: &Network, target: &Activation, input_box: &[(f64, f64)]) -> Result<Conversion> {
    if !net.activation().is_relu() {
        return Err(Error::Precondition("conversion expects a ReLU network".into()));
    }
    let act = target.to_pwl();
    if act.breakpoints().is_empty() {
        return Err(Error::NoKink);
    }
    let bounds = preactivation_bounds(net, input_box)?;
    let z_bound = bounds.iter().flatten().fold(0.0_f64, |m, &(lo, hi)| m.max(lo.abs()).max(hi.abs()));
    if !z_bound.is_finite() {
        return Err(Error::Unbounded(format!("reachable pre-activation bound {z_bound}")));
    }
    let plan = ReluEmulation::plan(&act, z_bound)?;
    let (alpha, beta, gamma) = plan.recombination(&act);

    let depth = net.depth();
    let mut layers = Vec::with_capacity(depth);
    for (l, layer) in net.layers().iter().enumerate() {
        // Express this layer's pre-activation in terms of the converted inputs.
        let (coeffs, biases, inputs) = if l == 0 {
            (layer.weights().to_vec(), layer.biases().to_vec(), layer.inputs())
        } else {
            let n_in = layer.inputs();
            let mut w = vec![0.0; layer.outputs() * 2 * n_in];
            let mut b = Vec::with_capacity(layer.outputs());
            for j in 0..layer.outputs() {
                let row = layer.row(j);
                for (k, &wjk) in row.iter().enumerate() {
                    w[j * 2 * n_in + 2 * k] = wjk * alpha;
                    w[j * 2 * n_in + 2 * k + 1] = wjk * beta;
                }
                b.push(layer.biases()[j] + gamma * row.iter().sum::<f64>());
            }
            (w, b, 2 * n_in)
        };

        if l + 1 == depth {
            layers.push(Layer::new(inputs, layer.outputs(), coeffs, biases)?);
            continue;
        }
        let n_out = layer.outputs();
        let mut converted = Layer::zeros(inputs, 2 * n_out);
        for j in 0..n_out {
            for i in 0..inputs {
                let c = coeffs[j * inputs + i];
                converted.set_weight(2 * j, i, plan.delta * c);
                converted.set_weight(2 * j + 1, i, plan.delta * c);
            }
            converted.set_bias(2 * j, plan.kink + plan.delta * biases[j]);
            converted.set_bias(2 * j + 1, plan.carrier + plan.delta * biases[j]);
        }
        layers.push(converted);
    }
    let network = Network::new(net.input_dim(), layers, target.clone())?;
    Ok(Conversion { network, emulation: plan, z_bound, original_params: net.param_count() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkShape;
    use crate::sampling::{sample_network, Distribution};

    fn unit_box() -> Vec<(f64, f64)> {
        vec![(0.0, 1.0)]
    }

    fn max_dev(a: &Network, b: &Network, n: usize) -> f64 {
        (0..n)
            .map(|k| {
                let x = k as f64 / (n - 1) as f64;
                (a.forward(&[x]).unwrap()[0] - b.forward(&[x]).unwrap()[0]).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn relu_target_is_exact() {
        let shape = NetworkShape::new(1, vec![4, 4, 4, 1]).unwrap();
        for i in 0..20 {
            let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, 5, i).unwrap();
            let c = relu_to_pwl_detailed(&net, &Activation::Relu, &unit_box()).unwrap();
            assert_eq!(c.emulation.delta, 1.0);
            assert_eq!(max_dev(&net, &c.network, 1001), 0.0);
        }
    }

    #[test]
    fn hard_tanh_network_2_matches() {
        let shape = NetworkShape::new(1, vec![20, 1]).unwrap();
        let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, 11, 0).unwrap();
        let converted = relu_to_pwl(&net, &Activation::hard_tanh(), &unit_box()).unwrap();
        assert_eq!(converted.hidden_widths(), vec![40]);
        assert!(max_dev(&net, &converted, 10_000) < 1e-6);
    }

    #[test]
    fn widths_double() {
        let shape = NetworkShape::new(1, vec![4, 4, 4, 4, 4, 1]).unwrap();
        let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, 1, 0).unwrap();
        let c = relu_to_pwl_detailed(&net, &Activation::hard_tanh(), &unit_box()).unwrap();
        assert_eq!(c.network.hidden_widths(), vec![8, 8, 8, 8, 8]);
        assert!(c.within_param_budget());
    }

    #[test]
    fn symmetric_kink_and_leaky_targets() {
        let shape = NetworkShape::new(1, vec![6, 5, 1]).unwrap();
        let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, 8, 3).unwrap();
        for target in [
            Activation::Pwl(PwlActivation::abs()),
            Activation::Pwl(PwlActivation::leaky_relu(0.1).unwrap()),
            Activation::Pwl(PwlActivation::new(vec![-2.0, 0.5, 3.0], vec![1.0, -0.5, 2.0, 0.0], 1.0).unwrap()),
        ] {
            let converted = relu_to_pwl(&net, &target, &unit_box()).unwrap();
            assert!(max_dev(&net, &converted, 2001) < 1e-6, "{target:?}");
        }
    }

    #[test]
    fn linear_target_has_no_kink() {
        let net =
            sample_network(&NetworkShape::new(1, vec![2, 1]).unwrap(), &Activation::Relu, Distribution::StandardNormal, 1, 0).unwrap();
        let linear = Activation::Pwl(PwlActivation::new(vec![], vec![2.0], 0.0).unwrap());
        assert_eq!(relu_to_pwl(&net, &linear, &unit_box()).unwrap_err(), Error::NoKink);
    }

    #[test]
    fn unbounded_box_is_rejected() {
        let net =
            sample_network(&NetworkShape::new(1, vec![2, 1]).unwrap(), &Activation::Relu, Distribution::StandardNormal, 1, 0).unwrap();
        let err = relu_to_pwl(&net, &Activation::hard_tanh(), &[(0.0, f64::INFINITY)]).unwrap_err();
        assert!(matches!(err, Error::Unbounded(_)));
    }

    #[test]
    fn bounds_contain_sampled_preactivations() {
        let shape = NetworkShape::new(1, vec![3, 3, 1]).unwrap();
        let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, 2, 0).unwrap();
        let bounds = preactivation_bounds(&net, &unit_box()).unwrap();
        let l0 = &net.layers()[0];
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            for (j, &(lo, hi)) in bounds[0].iter().enumerate() {
                let z = l0.weight(j, 0) * x + l0.biases()[j];
                assert!(lo - 1e-12 <= z && z <= hi + 1e-12);
            }
        }
    }
}
