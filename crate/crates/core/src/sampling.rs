//! Seeded parameter sampling.
//!
//! Draw `i` of a run reads ChaCha8 stream `i` of the key derived from the
//! run seed, so a draw's parameters depend only on `(seed, i, shape,
//! distribution)` and never on how draws are split across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::Result;
use crate::network::{Network, NetworkShape, ParamVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    StandardNormal,
    /// `U(0, 1)`, values in `[0, 1)`.
    Uniform01,
}

impl Distribution {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Distribution::StandardNormal => rng.sample(StandardNormal),
            Distribution::Uniform01 => rng.random::<f64>(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub distribution: Distribution,
    pub seed: u64,
    pub draw_count: usize,
}

/// Generator for draw `index` of a run seeded with `seed`.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Parameters for draw `index`.
pub fn sample_one(shape: &NetworkShape, distribution: Distribution, seed: u64, index: u64) -> ParamVector {
    let mut rng = draw_rng(seed, index);
    ParamVector((0..shape.param_count()).map(|_| distribution.draw(&mut rng)).collect())
}

/// All `cfg.draw_count` parameter vectors of a run, in draw order.
pub fn sample_params(shape: &NetworkShape, cfg: &SamplerConfig) -> Result<Vec<ParamVector>> {
    shape.validate()?;
    Ok((0..cfg.draw_count as u64).map(|i| sample_one(shape, cfg.distribution, cfg.seed, i)).collect())
}

/// Network for draw `index`.
pub fn sample_network(shape: &NetworkShape, activation: &Activation, distribution: Distribution, seed: u64, index: u64) -> Result<Network> {
    Network::from_params(shape, activation.clone(), &sample_one(shape, distribution, seed, index))
}
