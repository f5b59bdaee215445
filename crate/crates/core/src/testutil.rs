//! Small hand-checkable fixtures shared by unit tests.

use crate::domain::{Instance, ServerSpec, TaskSpec};

pub fn server(id: usize, f: f64, mu: f64, b: f64, h: f64, g: f64) -> ServerSpec {
    ServerSpec {
        id,
        cpu_arch_coeff: 0.01,
        cycles_per_sample: 0.01,
        cpu_frequency: f,
        capacity: mu,
        bandwidth: b,
        tx_power: h,
        channel_gain: g,
    }
}

pub fn task(id: usize, p: f64, d: f64, tau: f64, origin: usize) -> TaskSpec {
    TaskSpec {
        id,
        unit_price: p,
        data_size: d,
        deadline: tau,
        origin_server: origin,
    }
}

/// One server (f = 2, B = 5, H = G = 10) and one task it submitted itself.
pub fn own_task_instance(p: f64, d: f64, tau: f64) -> Instance {
    Instance::new(
        vec![server(0, 2.0, 300.0, 5.0, 10.0, 10.0)],
        vec![task(0, p, d, tau, 0)],
        0.1,
        0.01,
    )
    .unwrap()
}

/// Two servers, three tasks; tasks 0 and 2 originate at server 0.
pub fn two_server_instance() -> Instance {
    Instance::new(
        vec![
            server(0, 2.0, 300.0, 5.0, 10.0, 10.0),
            server(1, 10.0, 300.0, 10.0, 5.0, 5.0),
        ],
        vec![
            task(0, 5.0, 10.0, 50.0, 0),
            task(1, 3.0, 20.0, 50.0, 1),
            task(2, 8.0, 15.0, 50.0, 0),
        ],
        0.1,
        0.01,
    )
    .unwrap()
}
