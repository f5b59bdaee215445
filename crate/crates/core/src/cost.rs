//! Computing and communication cost of running a task on a server.

use crate::domain::{ServerSpec, TaskSpec};

/// Every cost quantity for one (server, task) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCosts {
    pub cycles: f64,
    pub e_comp: f64,
    pub t_comp: f64,
    pub rate: f64,
    pub t_comm: f64,
    pub e_comm: f64,
}

/// Total CPU cycles needed to process `task` on `server`.
pub fn cycles_required(server: &ServerSpec, task: &TaskSpec) -> f64 {
    task.data_size * server.cycles_per_sample
}

pub fn compute_energy(server: &ServerSpec, task: &TaskSpec) -> f64 {
    server.cpu_arch_coeff * cycles_required(server, task) * server.cpu_frequency.powi(2)
}

pub fn compute_time(server: &ServerSpec, task: &TaskSpec) -> f64 {
    cycles_required(server, task) / server.cpu_frequency
}

/// Shannon-bound uplink rate of `server`. `noise` enters squared.
pub fn transmission_rate(server: &ServerSpec, noise: f64) -> f64 {
    let snr = server.tx_power * server.channel_gain / (noise * noise);
    server.bandwidth * (1.0 + snr).log2()
}

/// Time for `server` to ship the task's data to another server.
pub fn comm_time(server: &ServerSpec, task: &TaskSpec, noise: f64) -> f64 {
    task.data_size / transmission_rate(server, noise)
}

pub fn comm_energy(server: &ServerSpec, task: &TaskSpec, noise: f64) -> f64 {
    server.tx_power * comm_time(server, task, noise)
}

pub fn pair_costs(server: &ServerSpec, task: &TaskSpec, noise: f64) -> PairCosts {
    let cycles = cycles_required(server, task);
    let rate = transmission_rate(server, noise);
    let t_comm = task.data_size / rate;
    PairCosts {
        cycles,
        e_comp: server.cpu_arch_coeff * cycles * server.cpu_frequency.powi(2),
        t_comp: cycles / server.cpu_frequency,
        rate,
        t_comm,
        e_comm: server.tx_power * t_comm,
    }
}
