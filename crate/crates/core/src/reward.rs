//! Per-(server, task) rewards used as the learning signal.
//!
//! A server earns the full payment minus computing energy on its own tasks,
//! or the intermediary fee minus transmission energy when it cannot process
//! them. On foreign tasks it earns the payment net of the fee minus computing
//! energy, or nothing. Feasibility is judged per pair: the task alone fits the
//! server's capacity and finishes before its deadline if assigned there.

use std::io::Write;

use crate::cost::{comm_time, compute_time, cycles_required, pair_costs};
use crate::domain::{Assignment, Instance};
use crate::error::Result;

/// Completion time of task `task` on the server side of `server`.
///
/// For the origin server this is the compute time when it keeps the task and
/// its upload time otherwise. For any other server it is compute time plus
/// the origin's transmission time when assigned, and zero when not.
pub fn pair_time(inst: &Instance, server: usize, task: usize, assigned: bool) -> f64 {
    let t = inst.task(task);
    let s = inst.server(server);
    if t.origin_server == server {
        if assigned {
            compute_time(s, t)
        } else {
            comm_time(s, t, inst.noise())
        }
    } else if assigned {
        compute_time(s, t) + comm_time(inst.server(t.origin_server), t, inst.noise())
    } else {
        0.0
    }
}

/// Whether `task` alone fits `server` in capacity and deadline.
pub fn pair_feasible(inst: &Instance, server: usize, task: usize) -> bool {
    let t = inst.task(task);
    cycles_required(inst.server(server), t) <= inst.server(server).capacity
        && pair_time(inst, server, task, true) <= t.deadline
}

pub fn pair_reward(inst: &Instance, server: usize, task: usize) -> f64 {
    let t = inst.task(task);
    let c = pair_costs(inst.server(server), t, inst.noise());
    let lambda = inst.intermediary_rate();
    let payment = t.unit_price * c.cycles;
    let feasible = pair_feasible(inst, server, task);
    match (t.origin_server == server, feasible) {
        (true, true) => payment - c.e_comp,
        (true, false) => lambda * payment - c.e_comm,
        (false, true) => (1.0 - lambda) * payment - c.e_comp,
        (false, false) => 0.0,
    }
}

/// The n x m reward matrix (row = server, column = task), with the per-pair
/// feasibility bits and the cycle/time figures solvers need for cumulative
/// capacity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTable {
    servers: usize,
    tasks: usize,
    values: Vec<f64>,
    feasible: Vec<bool>,
    cycles: Vec<f64>,
    assigned_time: Vec<f64>,
}

impl RewardTable {
    pub fn build(inst: &Instance) -> Self {
        let (n, m) = (inst.num_servers(), inst.num_tasks());
        let mut table = RewardTable {
            servers: n,
            tasks: m,
            values: Vec::with_capacity(n * m),
            feasible: Vec::with_capacity(n * m),
            cycles: Vec::with_capacity(n * m),
            assigned_time: Vec::with_capacity(n * m),
        };
        for i in 0..n {
            for j in 0..m {
                table.values.push(pair_reward(inst, i, j));
                table.feasible.push(pair_feasible(inst, i, j));
                table.cycles.push(cycles_required(inst.server(i), inst.task(j)));
                table.assigned_time.push(pair_time(inst, i, j, true));
            }
        }
        table
    }

    pub fn num_servers(&self) -> usize {
        self.servers
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks
    }

    #[inline]
    fn idx(&self, server: usize, task: usize) -> usize {
        debug_assert!(server < self.servers && task < self.tasks);
        server * self.tasks + task
    }

    pub fn value(&self, server: usize, task: usize) -> f64 {
        self.values[self.idx(server, task)]
    }

    pub fn is_feasible(&self, server: usize, task: usize) -> bool {
        self.feasible[self.idx(server, task)]
    }

    pub fn cycles(&self, server: usize, task: usize) -> f64 {
        self.cycles[self.idx(server, task)]
    }

    /// Completion time of `task` if it is assigned to `server`.
    pub fn assigned_time(&self, server: usize, task: usize) -> f64 {
        self.assigned_time[self.idx(server, task)]
    }

    /// Rewards of every server for one task.
    pub fn column(&self, task: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.servers).map(move |i| self.value(i, task))
    }

    /// Sum of the table entries picked by `assignment`, in task order.
    /// Unassigned tasks contribute nothing.
    pub fn assignment_reward(&self, assignment: &Assignment) -> f64 {
        let mut total = 0.0;
        for (j, a) in assignment.iter().enumerate() {
            if let Some(i) = a {
                total += self.value(i, j);
            }
        }
        total
    }

    /// Dumps the reward values as CSV, one row per server.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["server".to_string()];
        header.extend((0..self.tasks).map(|j| format!("task_{j}")));
        w.write_record(&header)?;
        for i in 0..self.servers {
            let mut row = vec![i.to_string()];
            row.extend((0..self.tasks).map(|j| self.value(i, j).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
