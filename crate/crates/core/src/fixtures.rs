//! Small hand-checked functions used by tests and by `verify`.

use crate::activation::Activation;
use crate::network::{Layer, Network};
use crate::pwl::PiecewiseLinear1D;

/// Kinks at 1/4 and 2/3 on `[0, 1]`: regions of length 1/4, 5/12 and 1/3,
/// so the fineness is 5/12.
pub fn three_piece_example() -> PiecewiseLinear1D {
    PiecewiseLinear1D::from_points(&[(0.0, 0.0), (0.25, 0.5), (2.0 / 3.0, 0.25), (1.0, 1.0)]).expect("valid fixture")
}

/// A refinement of [`three_piece_example`] whose coarsest sub-region is
/// `[1/9, 1/4]`, i.e. 5/9 of the region `[0, 1/4]` containing it.
pub fn refined_example() -> PiecewiseLinear1D {
    PiecewiseLinear1D::from_points(&[
        (0.0, 0.0),
        (1.0 / 9.0, 0.3),
        (0.25, 0.1),
        (0.4, 0.6),
        (0.5, 0.2),
        (2.0 / 3.0, 0.5),
        (5.0 / 6.0, 0.1),
        (1.0, 0.7),
    ])
    .expect("valid fixture")
}

/// A one-hidden-layer ReLU network computing [`three_piece_example`]:
/// `2 relu(x) - 2.6 relu(x - 1/4) + 2.85 relu(x - 2/3)`.
pub fn three_piece_network() -> Network {
    let hidden = Layer::new(1, 3, vec![1.0, 1.0, 1.0], vec![0.0, -0.25, -2.0 / 3.0]).expect("valid layer");
    let out = Layer::new(3, 1, vec![2.0, -2.6, 2.85], vec![0.0]).expect("valid layer");
    Network::new(1, vec![hidden, out], Activation::Relu).expect("valid network")
}
