use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Instance, ServerSpec, TaskSpec};
use crate::error::ValidationError;

/// Closed sampling interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn validate(&self, name: &'static str) -> Result<(), ValidationError> {
        if !(self.lo > 0.0 && self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(ValidationError::Config(format!(
                "range `{name}` must satisfy 0 < lo <= hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Interval::new(self.lo * factor, self.hi * factor)
    }
}

/// Sampling ranges for random instances. The defaults are the basic
/// experimental setting: 20 servers, 50 tasks.
///
/// Server capacity is drawn from the [200, 400] range that the basic
/// setting lists under the name `D_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub num_servers: usize,
    pub num_tasks: usize,
    pub price: Interval,
    pub data_size: Interval,
    pub deadline: Interval,
    pub frequency: Interval,
    pub tx_power: Interval,
    pub channel_gain: Interval,
    pub bandwidth: Interval,
    pub capacity: Interval,
    pub cycles_per_sample: f64,
    pub cpu_arch_coeff: f64,
    pub noise: f64,
    pub intermediary_rate: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            num_servers: 20,
            num_tasks: 50,
            price: Interval::new(1.0, 10.0),
            data_size: Interval::new(10.0, 20.0),
            deadline: Interval::new(1.0, 100.0),
            frequency: Interval::new(1.0, 10.0),
            tx_power: Interval::new(5.0, 10.0),
            channel_gain: Interval::new(5.0, 10.0),
            bandwidth: Interval::new(5.0, 10.0),
            capacity: Interval::new(200.0, 400.0),
            cycles_per_sample: 0.01,
            cpu_arch_coeff: 0.01,
            noise: 0.01,
            intermediary_rate: 0.1,
        }
    }
}

impl GeneratorParams {
    /// Small instances where capacity and deadlines bind: the default
    /// ranges with capacity divided by 1000 (so a server holds one to four
    /// tasks) and deadlines divided by 100.
    pub fn scaled_down(num_servers: usize, num_tasks: usize) -> Self {
        let base = GeneratorParams::default();
        GeneratorParams {
            num_servers,
            num_tasks,
            capacity: base.capacity.scaled(1e-3),
            deadline: base.deadline.scaled(1e-2),
            ..base
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.num_servers == 0 || self.num_servers > self.num_tasks {
            return Err(ValidationError::ServerTaskCount {
                servers: self.num_servers,
                tasks: self.num_tasks,
            });
        }
        self.price.validate("price")?;
        self.data_size.validate("data_size")?;
        self.deadline.validate("deadline")?;
        self.frequency.validate("frequency")?;
        self.tx_power.validate("tx_power")?;
        self.channel_gain.validate("channel_gain")?;
        self.bandwidth.validate("bandwidth")?;
        self.capacity.validate("capacity")?;
        Ok(())
    }
}

/// Samples an instance uniformly within `params`. Servers are drawn first
/// (f, mu, B, H, G each), then tasks (p, D, tau_e, origin).
pub fn generate_instance(params: &GeneratorParams, seed: u64) -> Result<Instance, ValidationError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let servers = (0..params.num_servers)
        .map(|id| ServerSpec {
            id,
            cpu_arch_coeff: params.cpu_arch_coeff,
            cycles_per_sample: params.cycles_per_sample,
            cpu_frequency: params.frequency.sample(&mut rng),
            capacity: params.capacity.sample(&mut rng),
            bandwidth: params.bandwidth.sample(&mut rng),
            tx_power: params.tx_power.sample(&mut rng),
            channel_gain: params.channel_gain.sample(&mut rng),
        })
        .collect();
    let tasks = (0..params.num_tasks)
        .map(|id| TaskSpec {
            id,
            unit_price: params.price.sample(&mut rng),
            data_size: params.data_size.sample(&mut rng),
            deadline: params.deadline.sample(&mut rng),
            origin_server: rng.gen_range(0..params.num_servers),
        })
        .collect();
    Instance::new(servers, tasks, params.intermediary_rate, params.noise)
}

/// Multiplies every task's unit price by `factor`.
pub fn scale_prices(inst: &Instance, factor: f64) -> Result<Instance, ValidationError> {
    inst.map_tasks(|t| TaskSpec {
        unit_price: t.unit_price * factor,
        ..t.clone()
    })
}

/// Multiplies every task's data size by `factor`.
pub fn scale_data(inst: &Instance, factor: f64) -> Result<Instance, ValidationError> {
    inst.map_tasks(|t| TaskSpec {
        data_size: t.data_size * factor,
        ..t.clone()
    })
}
