//! Exact breakpoint propagation for scalar-input networks.
//!
//! The input interval is kept partitioned into cells on which every unit of
//! the current layer is affine in `x`. An affine layer keeps the partition
//! and combines the per-cell maps; an activation splits each cell wherever a
//! unit's pre-activation crosses one of the activation's breakpoints (a
//! single division per crossing) and picks the activation piece of every
//! sub-cell from its midpoint. The scalar output is finally merged into a
//! canonical [`PiecewiseLinear1D`].

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::pwl::{AffinePiece, Interval, PiecewiseLinear1D};

/// Crossings closer than this (relative to the domain length) to a cell
/// boundary or to each other are treated as coincident.
const CUT_TOL: f64 = 1e-12;

/// The function computed by a `1 -> 1` network on `domain`.
pub fn trace_exact(net: &Network, domain: Interval) -> Result<PiecewiseLinear1D> {
    if net.input_dim() != 1 || net.output_dim() != 1 {
        return Err(Error::Shape(format!("exact tracing needs a 1 -> 1 network, got {} -> {}", net.input_dim(), net.output_dim())));
    }
    let (cuts, cells) = trace_units(net, domain)?;
    let pieces: Vec<AffinePiece> = cells.into_iter().map(|units| units[0]).collect();
    PiecewiseLinear1D::canonical(domain, &cuts, &pieces)
}

/// Cell boundaries and, per cell, the affine map of every output unit.
pub fn trace_units(net: &Network, domain: Interval) -> Result<(Vec<f64>, Vec<Vec<AffinePiece>>)> {
    if net.input_dim() != 1 {
        return Err(Error::Shape(format!("exact tracing needs a scalar input, got {}", net.input_dim())));
    }
    let act = net.activation().to_pwl();
    let is_relu = matches!(net.activation(), Activation::Relu);
    let tol = CUT_TOL * domain.len();

    let mut cuts: Vec<f64> = Vec::new();
    let mut cells: Vec<Vec<AffinePiece>> = vec![vec![AffinePiece { slope: 1.0, intercept: 0.0 }]];
    let last = net.depth() - 1;

    for (l, layer) in net.layers().iter().enumerate() {
        for units in cells.iter_mut() {
            let pre: Vec<AffinePiece> = (0..layer.outputs())
                .map(|j| {
                    let row = layer.row(j);
                    let (s, c) = row.iter().zip(units.iter()).fold((0.0, 0.0), |(s, c), (w, p)| (s + w * p.slope, c + w * p.intercept));
                    AffinePiece { slope: s, intercept: c + layer.biases()[j] }
                })
                .collect();
            *units = pre;
        }
        if l == last {
            break;
        }

        let mut next_cuts = Vec::with_capacity(cuts.len());
        let mut next_cells = Vec::with_capacity(cells.len());
        let mut crossings: Vec<f64> = Vec::new();
        for (c, units) in cells.iter().enumerate() {
            let left = if c == 0 { domain.left } else { cuts[c - 1] };
            let right = cuts.get(c).copied().unwrap_or(domain.right);

            crossings.clear();
            for p in units.iter().filter(|p| p.slope != 0.0) {
                for &t in act.breakpoints() {
                    let x = (t - p.intercept) / p.slope;
                    if x > left + tol && x < right - tol {
                        crossings.push(x);
                    }
                }
            }
            crossings.sort_by(f64::total_cmp);
            crossings.dedup_by(|a, b| *a - *b <= tol);

            let mut lo = left;
            for hi in crossings.iter().copied().chain(std::iter::once(right)) {
                let mid = 0.5 * (lo + hi);
                let post = units
                    .iter()
                    .map(|p| {
                        let y = p.eval(mid);
                        if is_relu {
                            if y > 0.0 {
                                *p
                            } else {
                                AffinePiece { slope: 0.0, intercept: 0.0 }
                            }
                        } else {
                            let (s, off) = act.piece_affine(act.piece_index(y));
                            AffinePiece { slope: s * p.slope, intercept: s * p.intercept + off }
                        }
                    })
                    .collect();
                next_cells.push(post);
                if hi < right {
                    next_cuts.push(hi);
                }
                lo = hi;
            }
            if c < cuts.len() {
                next_cuts.push(right);
            }
        }
        cuts = next_cuts;
        cells = next_cells;
    }
    Ok((cuts, cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::network::{Layer, NetworkShape};
    use crate::sampling::{sample_network, Distribution};

    #[test]
    fn linear_network_has_one_region() {
        let net = Network::new(1, vec![Layer::new(1, 1, vec![3.0], vec![-1.0]).unwrap()], Activation::Relu).unwrap();
        let f = trace_exact(&net, Interval::UNIT).unwrap();
        assert!(f.breakpoints().is_empty());
        assert_eq!(f.regions().count(), 1);
        assert_eq!(f.pieces()[0], AffinePiece { slope: 3.0, intercept: -1.0 });
    }

    #[test]
    fn three_piece_network_regions() {
        let f = trace_exact(&fixtures::three_piece_network(), Interval::UNIT).unwrap();
        assert_eq!(f.breakpoints().len(), 2);
        assert!((f.breakpoints()[0] - 0.25).abs() < 1e-15);
        assert!((f.breakpoints()[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((f.fineness() - 5.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn matches_forward_on_random_networks() {
        let shapes = [vec![4, 4, 4, 4, 4, 1], vec![20, 1], vec![7, 3, 1]];
        for (s, widths) in shapes.iter().enumerate() {
            let shape = NetworkShape::new(1, widths.clone()).unwrap();
            for i in 0..10 {
                for act in [Activation::Relu, Activation::hard_tanh()] {
                    let net = sample_network(&shape, &act, Distribution::StandardNormal, 77 + s as u64, i).unwrap();
                    let f = trace_exact(&net, Interval::UNIT).unwrap();
                    assert!(f.regions().is_partition());
                    for k in 0..=2000 {
                        let x = k as f64 / 2000.0;
                        let y = net.forward(&[x]).unwrap()[0];
                        assert!((f.eval(x) - y).abs() <= 1e-9 * (1.0 + y.abs()), "x = {x}: {} vs {y}", f.eval(x));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_vector_networks() {
        let net = Network::new(2, vec![Layer::new(2, 1, vec![1.0, 1.0], vec![0.0]).unwrap()], Activation::Relu).unwrap();
        assert!(matches!(trace_exact(&net, Interval::UNIT), Err(Error::Shape(_))));
    }
}
