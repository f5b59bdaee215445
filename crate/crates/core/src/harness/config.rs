//! Flat key/value experiment configuration (TOML syntax).
//!
//! ```toml
//! seed = 7
//! episodes = 500
//! learning_rate = 0.1
//! num_servers = 20
//! price_min = 1.0
//! price_max = 10.0
//! axis = "num_servers"
//! values = [10, 20, 30]
//! seeds = [1, 2, 3]
//! ```

use std::path::Path;

use serde::Deserialize;

use super::generator::{GeneratorParams, Interval};
use super::sweep::{SweepAxis, SweepSpec};
use crate::error::{Error, Result};
use crate::qlearning::LearnConfig;

pub const SEED_ENV: &str = "EDGE_MTA_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub episodes: Option<usize>,
    pub learning_rate: Option<f64>,
    pub discount: Option<f64>,
    pub epsilon: Option<f64>,

    pub num_servers: Option<usize>,
    pub num_tasks: Option<usize>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub theta: Option<f64>,
    pub cpu_alpha: Option<f64>,
    pub price_min: Option<f64>,
    pub price_max: Option<f64>,
    pub data_min: Option<f64>,
    pub data_max: Option<f64>,
    pub deadline_min: Option<f64>,
    pub deadline_max: Option<f64>,
    pub frequency_min: Option<f64>,
    pub frequency_max: Option<f64>,
    pub power_min: Option<f64>,
    pub power_max: Option<f64>,
    pub gain_min: Option<f64>,
    pub gain_max: Option<f64>,
    pub bandwidth_min: Option<f64>,
    pub bandwidth_max: Option<f64>,
    pub capacity_min: Option<f64>,
    pub capacity_max: Option<f64>,

    pub exact_max_log2: Option<f64>,

    pub axis: Option<SweepAxis>,
    pub values: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn generator(&self) -> GeneratorParams {
        let mut g = GeneratorParams::default();
        let range = |base: Interval, lo: Option<f64>, hi: Option<f64>| {
            Interval::new(lo.unwrap_or(base.lo), hi.unwrap_or(base.hi))
        };
        g.num_servers = self.num_servers.unwrap_or(g.num_servers);
        g.num_tasks = self.num_tasks.unwrap_or(g.num_tasks);
        g.intermediary_rate = self.lambda.unwrap_or(g.intermediary_rate);
        g.noise = self.delta.unwrap_or(g.noise);
        g.cycles_per_sample = self.theta.unwrap_or(g.cycles_per_sample);
        g.cpu_arch_coeff = self.cpu_alpha.unwrap_or(g.cpu_arch_coeff);
        g.price = range(g.price, self.price_min, self.price_max);
        g.data_size = range(g.data_size, self.data_min, self.data_max);
        g.deadline = range(g.deadline, self.deadline_min, self.deadline_max);
        g.frequency = range(g.frequency, self.frequency_min, self.frequency_max);
        g.tx_power = range(g.tx_power, self.power_min, self.power_max);
        g.channel_gain = range(g.channel_gain, self.gain_min, self.gain_max);
        g.bandwidth = range(g.bandwidth, self.bandwidth_min, self.bandwidth_max);
        g.capacity = range(g.capacity, self.capacity_min, self.capacity_max);
        g
    }

    /// Learning parameters with `seed` already resolved by the caller.
    pub fn learn(&self, seed: u64) -> LearnConfig {
        let d = LearnConfig::default();
        LearnConfig {
            episodes: self.episodes.unwrap_or(d.episodes),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            discount: self.discount.unwrap_or(d.discount),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            seed,
        }
    }

    pub fn sweep(&self, seed: u64) -> Result<SweepSpec> {
        let axis = self
            .axis
            .ok_or_else(|| Error::Config("sweep needs `axis`".into()))?;
        let values = self
            .values
            .clone()
            .ok_or_else(|| Error::Config("sweep needs `values`".into()))?;
        let spec = SweepSpec {
            axis,
            values,
            seeds: self.seeds.clone().unwrap_or_else(|| vec![seed]),
            learn: self.learn(seed),
            generator: self.generator(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Seed precedence: command-line flag, then config file, then the
/// `EDGE_MTA_SEED` environment variable, then [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        None => Ok(DEFAULT_SEED),
    }
}
