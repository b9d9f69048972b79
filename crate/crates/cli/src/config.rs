//! Experiment configuration. Every key has a default, so an empty file (or
//! no file) reproduces the reference setup.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use pwl_expressivity::activation::PwlActivation;
use pwl_expressivity::{Activation, Distribution, EpsilonGrid, NetworkShape, RatioConfig, TargetFunction, Workers};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// 0 uses every core, 1 runs sequentially.
    pub workers: usize,
    pub out_dir: PathBuf,
    pub networks: Vec<NetworkConfig>,
    pub targets: Vec<TargetConfig>,
    pub ratio: RatioSection,
    pub fineness: FinenessSection,
    pub verify: VerifySection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub name: String,
    #[serde(default = "one")]
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    #[serde(default = "one")]
    pub output_dim: usize,
    #[serde(default)]
    pub activation: ActivationConfig,
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Sin4pi,
    Weierstrass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub name: String,
    pub kind: TargetKind,
    pub amplitude_ratio: Option<f64>,
    pub frequency_base: Option<f64>,
    pub truncation: Option<u32>,
    pub epsilon: Option<EpsilonGrid>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActivationConfig {
    /// `relu`, `hard_tanh` or `abs`.
    Named(String),
    Custom(Activation),
}

impl Default for ActivationConfig {
    fn default() -> Self {
        ActivationConfig::Named("relu".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatioSection {
    pub grid_count: usize,
    pub theta_draws: usize,
    /// Resample every target's ε grid to this many points over the same span.
    pub epsilon_count: Option<usize>,
    pub distribution: Distribution,
    /// Target names to run; all targets when empty.
    pub targets: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FinenessSection {
    pub draws: usize,
    pub grid_count: usize,
    pub threshold: f64,
    pub distribution: Distribution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub activation: ActivationConfig,
    pub random_networks: usize,
    pub refinement_pairs: usize,
    pub grid_count: usize,
    pub threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 20_190_417,
            workers: 0,
            out_dir: PathBuf::from("results"),
            networks: vec![
                NetworkConfig {
                    name: "network1".into(),
                    input_dim: 1,
                    hidden_widths: vec![4; 5],
                    output_dim: 1,
                    activation: ActivationConfig::default(),
                },
                NetworkConfig {
                    name: "network2".into(),
                    input_dim: 1,
                    hidden_widths: vec![20],
                    output_dim: 1,
                    activation: ActivationConfig::default(),
                },
            ],
            targets: vec![
                TargetConfig {
                    name: "sin4pi".into(),
                    kind: TargetKind::Sin4pi,
                    amplitude_ratio: None,
                    frequency_base: None,
                    truncation: None,
                    epsilon: None,
                },
                TargetConfig {
                    name: "weierstrass".into(),
                    kind: TargetKind::Weierstrass,
                    amplitude_ratio: None,
                    frequency_base: None,
                    truncation: None,
                    epsilon: None,
                },
            ],
            ratio: RatioSection::default(),
            fineness: FinenessSection::default(),
            verify: VerifySection::default(),
        }
    }
}

impl Default for RatioSection {
    fn default() -> Self {
        RatioSection {
            grid_count: 10_000,
            theta_draws: 20_000,
            epsilon_count: None,
            distribution: Distribution::StandardNormal,
            targets: Vec::new(),
        }
    }
}

impl Default for FinenessSection {
    fn default() -> Self {
        FinenessSection { draws: 1000, grid_count: 100_000, threshold: 0.5, distribution: Distribution::Uniform01 }
    }
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            activation: ActivationConfig::Named("hard_tanh".into()),
            random_networks: 100,
            refinement_pairs: 200,
            grid_count: 100_000,
            threshold: 0.5,
        }
    }
}

impl ActivationConfig {
    pub fn resolve(&self) -> Result<Activation> {
        match self {
            ActivationConfig::Named(n) => match n.as_str() {
                "relu" => Ok(Activation::Relu),
                "hard_tanh" => Ok(Activation::hard_tanh()),
                "abs" => Ok(Activation::Pwl(PwlActivation::abs())),
                other => Err(HarnessError::Config(format!("unknown activation `{other}` (expected relu, hard_tanh, abs or a table)"))),
            },
            ActivationConfig::Custom(a) => Ok(a.clone()),
        }
    }
}

impl NetworkConfig {
    pub fn shape(&self) -> Result<NetworkShape> {
        let mut widths = self.hidden_widths.clone();
        widths.push(self.output_dim);
        NetworkShape::new(self.input_dim, widths).map_err(|e| HarnessError::Config(format!("network `{}`: {e}", self.name)))
    }
}

impl TargetConfig {
    pub fn function(&self) -> Result<TargetFunction> {
        let f = match self.kind {
            TargetKind::Sin4pi => {
                if self.amplitude_ratio.is_some() || self.frequency_base.is_some() || self.truncation.is_some() {
                    return Err(HarnessError::Config(format!("target `{}`: sin4pi takes no weierstrass parameters", self.name)));
                }
                TargetFunction::Sin4Pi
            }
            TargetKind::Weierstrass => {
                let TargetFunction::Weierstrass { a, b, terms } = TargetFunction::DEFAULT_WEIERSTRASS else { unreachable!() };
                TargetFunction::weierstrass(
                    self.amplitude_ratio.unwrap_or(a),
                    self.frequency_base.unwrap_or(b),
                    self.truncation.unwrap_or(terms),
                )
                .map_err(|e| HarnessError::Config(format!("target `{}`: {e}", self.name)))?
            }
        };
        Ok(f)
    }

    pub fn epsilon_grid(&self, resample: Option<usize>) -> Result<EpsilonGrid> {
        let base = self.epsilon.unwrap_or_else(|| EpsilonGrid::default_for(&TargetFunction::from_kind(self.kind)));
        Ok(resample.map_or(base, |n| base.resampled(n)))
    }
}

trait FromKind {
    fn from_kind(kind: TargetKind) -> Self;
}

impl FromKind for TargetFunction {
    fn from_kind(kind: TargetKind) -> Self {
        match kind {
            TargetKind::Sin4pi => TargetFunction::Sin4Pi,
            TargetKind::Weierstrass => TargetFunction::DEFAULT_WEIERSTRASS,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for n in &self.networks {
            if !names.insert(n.name.as_str()) {
                return Err(HarnessError::Config(format!("duplicate network name `{}`", n.name)));
            }
            n.shape()?;
            n.activation.resolve()?;
        }
        let mut names = HashSet::new();
        for t in &self.targets {
            if !names.insert(t.name.as_str()) {
                return Err(HarnessError::Config(format!("duplicate target name `{}`", t.name)));
            }
            t.function()?;
        }
        for name in &self.ratio.targets {
            if !self.targets.iter().any(|t| &t.name == name) {
                return Err(HarnessError::Config(format!("ratio.targets: unknown target `{name}`")));
            }
        }
        self.verify.activation.resolve()?;
        Ok(())
    }

    pub fn workers(&self) -> Workers {
        Workers(self.workers)
    }

    pub fn require_networks(&self) -> Result<()> {
        if self.networks.is_empty() {
            return Err(HarnessError::Config("no networks configured".into()));
        }
        Ok(())
    }

    /// Targets selected for the ratio experiment, in configuration order.
    pub fn ratio_targets(&self) -> Vec<&TargetConfig> {
        self.targets.iter().filter(|t| self.ratio.targets.is_empty() || self.ratio.targets.contains(&t.name)).collect()
    }

    pub fn ratio_config(&self, target: &TargetConfig) -> Result<RatioConfig> {
        Ok(RatioConfig {
            grid_count: self.ratio.grid_count,
            theta_draws: self.ratio.theta_draws,
            epsilon: target.epsilon_grid(self.ratio.epsilon_count)?,
            seed: self.seed,
            distribution: self.ratio.distribution,
        })
    }
}
