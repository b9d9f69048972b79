use proptest::prelude::*;
use pwl_expressivity::activation::PwlActivation;
use pwl_expressivity::convert::relu_to_pwl_detailed;
use pwl_expressivity::sampling::{draw_rng, sample_network};
use pwl_expressivity::{Activation, Distribution, Layer, Network, NetworkShape, ParamVector};
use rand::Rng;

fn shape_strategy(max_width: usize, max_hidden: usize) -> impl Strategy<Value = NetworkShape> {
    (1usize..=2, prop::collection::vec(1usize..=max_width, 0..=max_hidden), 1usize..=2).prop_map(|(n0, mut widths, out)| {
        widths.push(out);
        NetworkShape::new(n0, widths).unwrap()
    })
}

fn targets() -> Vec<Activation> {
    vec![
        Activation::hard_tanh(),
        Activation::Pwl(PwlActivation::abs()),
        Activation::Pwl(PwlActivation::leaky_relu(0.1).unwrap()),
        Activation::Pwl(PwlActivation::new(vec![-0.5, 0.25, 2.0], vec![1.5, -0.5, 2.0, 0.25], 0.3).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bias_free_two_layer_relu_is_positively_homogeneous(seed in any::<u64>(), width in 1usize..10, c in 0.0f64..20.0, x in -5.0f64..5.0) {
        let shape = NetworkShape::new(1, vec![width, 1]).unwrap();
        let mut net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, seed, 0).unwrap();
        for layer in net.layers_mut() {
            for j in 0..layer.outputs() {
                layer.set_bias(j, 0.0);
            }
        }
        let lhs = net.forward(&[c * x]).unwrap()[0];
        let rhs = c * net.forward(&[x]).unwrap()[0];
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn relu_and_generic_relu_agree(seed in any::<u64>(), shape in shape_strategy(8, 4)) {
        let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, seed, 1).unwrap();
        let generic = net.with_activation(Activation::Pwl(PwlActivation::relu()));
        let mut rng = draw_rng(seed, 99);
        for _ in 0..200 {
            let x: Vec<f64> = (0..shape.input_dim).map(|_| rng.random_range(-3.0..3.0)).collect();
            let a = net.forward(&x).unwrap();
            let b = generic.forward(&x).unwrap();
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()));
            }
        }
    }

    #[test]
    fn pack_unpack_round_trips(seed in any::<u64>(), shape in shape_strategy(8, 4)) {
        let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, seed, 2).unwrap();
        let params = net.to_params();
        prop_assert_eq!(params.len(), shape.param_count());
        let back = Network::from_params(&shape, Activation::Relu, &params).unwrap();
        prop_assert_eq!(&back, &net);
        let bits: Vec<u64> = back.to_params().0.iter().map(|v| v.to_bits()).collect();
        let orig: Vec<u64> = params.0.iter().map(|v| v.to_bits()).collect();
        prop_assert_eq!(bits, orig);
    }

    #[test]
    fn conversion_preserves_values(seed in any::<u64>(), shape in shape_strategy(8, 3), t in 0usize..4) {
        let target = targets()[t].clone();
        let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, seed, 3).unwrap();
        let unit_box = vec![(0.0, 1.0); shape.input_dim];
        let conv = relu_to_pwl_detailed(&net, &target, &unit_box).unwrap();
        let doubled: Vec<usize> = shape.hidden_widths().iter().map(|w| 2 * w).collect();
        prop_assert_eq!(conv.network.hidden_widths(), doubled);
        prop_assert_eq!(conv.network.depth(), net.depth());
        let mut rng = draw_rng(seed, 7);
        for _ in 0..300 {
            let x: Vec<f64> = (0..shape.input_dim).map(|_| rng.random::<f64>()).collect();
            let a = net.forward(&x).unwrap();
            let b = conv.network.forward(&x).unwrap();
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - v).abs() < 1e-6, "x = {x:?}: {u} vs {v}");
            }
        }
    }
}

#[test]
fn forward_examples() {
    let one = Network::new(1, vec![Layer::new(1, 1, vec![2.0], vec![3.0]).unwrap()], Activation::Relu).unwrap();
    assert_eq!(one.forward(&[1.0]).unwrap(), vec![5.0]);
    let two = Network::new(
        1,
        vec![Layer::new(1, 1, vec![1.0], vec![-0.5]).unwrap(), Layer::new(1, 1, vec![1.0], vec![0.0]).unwrap()],
        Activation::Relu,
    )
    .unwrap();
    assert_eq!(two.forward(&[0.25]).unwrap(), vec![0.0]);
    assert_eq!(two.forward(&[0.75]).unwrap(), vec![0.25]);
    assert!(two.forward(&[0.1, 0.2]).is_err());
}

#[test]
fn relu_and_generic_relu_agree_on_reference_shapes() {
    let generic = Activation::Pwl(PwlActivation::relu());
    for widths in [vec![4, 4, 4, 4, 4, 1], vec![20, 1]] {
        let shape = NetworkShape::new(1, widths).unwrap();
        let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, 5, 0).unwrap();
        let alt = net.with_activation(generic.clone());
        let mut rng = draw_rng(5, 1);
        for _ in 0..10_000 {
            let x = rng.random_range(-4.0..4.0);
            let a = net.forward(&[x]).unwrap()[0];
            let b = alt.forward(&[x]).unwrap()[0];
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn conversion_of_reference_shapes() {
    // Oracle: forward pass of the original ReLU network.
    let xs: Vec<f64> = (0..10_000).map(|i| i as f64 / 10_000.0).collect();
    for widths in [vec![4, 4, 4, 4, 4, 1], vec![20, 1]] {
        let shape = NetworkShape::new(1, widths).unwrap();
        for seed in 0..5 {
            let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, seed, 0).unwrap();
            let conv = relu_to_pwl_detailed(&net, &Activation::hard_tanh(), &[(0.0, 1.0)]).unwrap();
            let a = net.eval_scalar(&xs).unwrap();
            let b = conv.network.eval_scalar(&xs).unwrap();
            let err = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            assert!(err < 1e-6, "{err}");
            assert_eq!(conv.network.hidden_widths(), shape.hidden_widths().iter().map(|w| 2 * w).collect::<Vec<_>>());
        }
    }
}

#[test]
fn params_are_layer_major_weights_then_biases() {
    let shape = NetworkShape::new(2, vec![2, 1]).unwrap();
    let params = ParamVector((0..9).map(f64::from).collect());
    let net = Network::from_params(&shape, Activation::Relu, &params).unwrap();
    assert_eq!(net.layers()[0].weights(), &[0.0, 1.0, 2.0, 3.0]);
    assert_eq!(net.layers()[0].biases(), &[4.0, 5.0]);
    assert_eq!(net.layers()[1].weights(), &[6.0, 7.0]);
    assert_eq!(net.layers()[1].biases(), &[8.0]);
}
