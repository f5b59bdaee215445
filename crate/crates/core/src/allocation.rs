//! Feasibility and objective value of complete assignments. Every solver's
//! output is scored here.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::{comm_energy, compute_energy, cycles_required};
use crate::domain::{Allocation, Assignment, Instance};
use crate::error::{Result, ValidationError};
use crate::reward::{pair_time, RewardTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    /// Cumulative computing capacity per server.
    C1,
    /// Per-task completion deadline.
    C2,
    /// Each task to at most one server.
    C3,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub server: Option<usize>,
    pub task: Option<usize>,
    pub measured: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn validate_assignment(inst: &Instance, assignment: &Assignment) -> Result<(), ValidationError> {
    if assignment.len() != inst.num_tasks() {
        return Err(ValidationError::AssignmentLength {
            expected: inst.num_tasks(),
            got: assignment.len(),
        });
    }
    for (j, a) in assignment.iter().enumerate() {
        if let Some(i) = a {
            if i >= inst.num_servers() {
                return Err(ValidationError::ServerOutOfRange {
                    task: j,
                    server: i,
                    servers: inst.num_servers(),
                });
            }
        }
    }
    Ok(())
}

/// Checks C1 and C2. C3 holds by construction: an [`Assignment`] stores one
/// entry per task.
pub fn check_feasible(inst: &Instance, assignment: &Assignment) -> Result<FeasibilityReport> {
    validate_assignment(inst, assignment)?;
    let mut used = vec![0.0; inst.num_servers()];
    let mut violations = Vec::new();
    for (j, a) in assignment.iter().enumerate() {
        let Some(i) = a else { continue };
        used[i] += cycles_required(inst.server(i), inst.task(j));
        let time = pair_time(inst, i, j, true);
        let deadline = inst.task(j).deadline;
        if time > deadline {
            violations.push(Violation {
                constraint: Constraint::C2,
                server: Some(i),
                task: Some(j),
                measured: time,
                bound: deadline,
            });
        }
    }
    for (i, &load) in used.iter().enumerate() {
        let cap = inst.server(i).capacity;
        if load > cap {
            violations.push(Violation {
                constraint: Constraint::C1,
                server: Some(i),
                task: None,
                measured: load,
                bound: cap,
            });
        }
    }
    Ok(FeasibilityReport { violations })
}

/// Objective contribution of one task when it runs on `assignee`.
///
/// Keeping the task at its origin yields payment minus computing energy.
/// Offloading it yields the origin's fee income minus upload energy plus the
/// assignee's payment net of the fee minus computing energy. The fee term is
/// priced on the origin's cycle count, the payment on the assignee's. An
/// unassigned task contributes nothing.
pub fn task_contribution(inst: &Instance, task: usize, assignee: Option<usize>) -> f64 {
    let Some(k) = assignee else { return 0.0 };
    let t = inst.task(task);
    let o = t.origin_server;
    let origin = inst.server(o);
    if k == o {
        return t.unit_price * cycles_required(origin, t) - compute_energy(origin, t);
    }
    let lambda = inst.intermediary_rate();
    let s = inst.server(k);
    let origin_term = lambda * t.unit_price * cycles_required(origin, t) - comm_energy(origin, t, inst.noise());
    let assignee_term = (1.0 - lambda) * t.unit_price * cycles_required(s, t) - compute_energy(s, t);
    origin_term + assignee_term
}

/// Total utility of all servers under `assignment`. Feasibility is not
/// required.
pub fn evaluate(inst: &Instance, assignment: &Assignment) -> Result<f64> {
    validate_assignment(inst, assignment)?;
    Ok(assignment
        .iter()
        .enumerate()
        .fold(0.0, |acc, (j, a)| acc + task_contribution(inst, j, a)))
}

impl Allocation {
    /// Pairs `assignment` with its objective value.
    pub fn score(inst: &Instance, assignment: Assignment) -> Result<Self> {
        let total_utility = evaluate(inst, &assignment)?;
        Ok(Allocation {
            assignment,
            total_utility,
        })
    }
}

/// Cycles committed to each server while an assignment is built task by task.
#[derive(Debug, Clone, PartialEq)]
pub struct Occupancy {
    used: Vec<f64>,
}

impl Occupancy {
    pub fn new(servers: usize) -> Self {
        Occupancy {
            used: vec![0.0; servers],
        }
    }

    pub fn used(&self) -> &[f64] {
        &self.used
    }

    /// Whether adding `task` to `server` keeps C1 and C2 satisfied.
    pub fn fits(&self, inst: &Instance, table: &RewardTable, server: usize, task: usize) -> bool {
        self.used[server] + table.cycles(server, task) <= inst.server(server).capacity
            && table.assigned_time(server, task) <= inst.task(task).deadline
    }

    pub fn commit(&mut self, table: &RewardTable, server: usize, task: usize) {
        self.used[server] += table.cycles(server, task);
    }

    pub fn reset(&mut self) {
        self.used.iter_mut().for_each(|u| *u = 0.0);
    }
}
