//! Expressivity measures for feed-forward networks with piecewise-linear
//! activations.
//!
//! * [`network`], [`activation`], [`sampling`]: networks, their parameters and
//!   seeded parameter draws.
//! * [`convert`]: rewriting a ReLU network for any piecewise-linear activation.
//! * [`pwl`], [`trace`], [`grid`]: linear regions of scalar functions, exact
//!   tracing of scalar networks, and the finite-difference region detector.
//! * [`construction`]: fold networks whose fineness shrinks geometrically with
//!   depth, and the matching bounds.
//! * [`ratio`], [`search`]: Monte Carlo estimates over parameter space.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activation;
pub mod construction;
pub mod convert;
pub mod error;
pub mod fixtures;
pub mod grid;
pub mod network;
pub mod parallel;
pub mod pwl;
pub mod ratio;
pub mod sampling;
pub mod search;
pub mod stats;
pub mod target;
pub mod trace;

pub use activation::{Activation, PwlActivation};
pub use construction::{build_fold_network, pwl_fold_bound, relu_fold_bound, verify_depth_bound, BoundReport, FoldSpec};
pub use convert::relu_to_pwl;
pub use error::{Error, Result};
pub use grid::grid_fineness;
pub use network::{Layer, Network, NetworkShape, ParamVector};
pub use parallel::Workers;
pub use pwl::{check_identification, check_refinement, Interval, PiecewiseLinear1D, RegionSet};
pub use ratio::{empirical_distance, estimate_ratio_curve, EpsilonGrid, RatioConfig, RatioCurve};
pub use sampling::{sample_params, Distribution, SamplerConfig};
pub use search::{min_fineness_search, FinenessSearchConfig, FinenessSearchReport};
pub use stats::standardize;
pub use target::TargetFunction;
pub use trace::trace_exact;
