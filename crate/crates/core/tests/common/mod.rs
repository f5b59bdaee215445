#![allow(dead_code)]

use edge_mta::allocation::evaluate;
use edge_mta::harness::generator::{generate_instance, GeneratorParams};
use edge_mta::{Assignment, Instance};

/// Generated instance with `n` servers and `m` tasks. `tight` selects the
/// ranges where capacity and deadlines bind.
pub fn instance(n: usize, m: usize, tight: bool, seed: u64) -> Instance {
    let params = if tight {
        GeneratorParams::scaled_down(n, m)
    } else {
        GeneratorParams {
            num_servers: n,
            num_tasks: m,
            ..GeneratorParams::default()
        }
    };
    generate_instance(&params, seed).unwrap()
}

/// Best objective over every one of the (n+1)^m assignments, feasible or
/// not, checked with cumulative loads and assigned pair times computed from
/// scratch.
pub fn brute_force_optimum(inst: &Instance) -> (f64, Assignment) {
    let (n, m) = (inst.num_servers(), inst.num_tasks());
    let mut digits = vec![0usize; m];
    let mut best = (f64::NEG_INFINITY, Assignment::unassigned(m));
    loop {
        let a: Assignment = digits
            .iter()
            .map(|&d| if d == n { None } else { Some(d) })
            .collect::<Vec<_>>()
            .into();
        if feasible_from_scratch(inst, &a) {
            let v = evaluate(inst, &a).unwrap();
            if v > best.0 {
                best = (v, a);
            }
        }
        let mut k = 0;
        while k < m && digits[k] == n {
            digits[k] = 0;
            k += 1;
        }
        if k == m {
            return best;
        }
        digits[k] += 1;
    }
}

fn feasible_from_scratch(inst: &Instance, a: &Assignment) -> bool {
    let mut load = vec![0.0; inst.num_servers()];
    for (j, s) in a.iter().enumerate() {
        let Some(i) = s else { continue };
        let t = inst.task(j);
        let srv = inst.server(i);
        let cycles = t.data_size * srv.cycles_per_sample;
        load[i] += cycles;
        let mut time = cycles / srv.cpu_frequency;
        if i != t.origin_server {
            let o = inst.server(t.origin_server);
            let rate = o.bandwidth * (1.0 + o.tx_power * o.channel_gain / (inst.noise() * inst.noise())).log2();
            time += t.data_size / rate;
        }
        if time > t.deadline {
            return false;
        }
    }
    load.iter().zip(inst.servers()).all(|(l, s)| *l <= s.capacity)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-12)
}
