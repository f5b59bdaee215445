//! Reference solvers: random, greedy and exhaustive search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::allocation::{task_contribution, Occupancy};
use crate::domain::{Allocation, Assignment, Instance};
use crate::error::{Error, Result};
use crate::reward::RewardTable;

/// Assigns each task, in order, to a uniformly chosen server that keeps the
/// partial assignment feasible.
pub fn solve_random(inst: &Instance, seed: u64) -> Result<Allocation> {
    let table = RewardTable::build(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut occ = Occupancy::new(inst.num_servers());
    let mut assignment = Assignment::unassigned(inst.num_tasks());
    let mut candidates = Vec::with_capacity(inst.num_servers());
    for j in 0..inst.num_tasks() {
        candidates.clear();
        candidates.extend((0..inst.num_servers()).filter(|&i| occ.fits(inst, &table, i, j)));
        if candidates.is_empty() {
            continue;
        }
        let i = candidates[rng.gen_range(0..candidates.len())];
        occ.commit(&table, i, j);
        assignment.set(j, Some(i));
    }
    Allocation::score(inst, assignment)
}

/// Assigns each task, in order, to the feasible server with the largest
/// non-zero reward entry. Ties go to the lowest server index.
pub fn solve_greedy(inst: &Instance) -> Result<Allocation> {
    let table = RewardTable::build(inst);
    let mut occ = Occupancy::new(inst.num_servers());
    let mut assignment = Assignment::unassigned(inst.num_tasks());
    for j in 0..inst.num_tasks() {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..inst.num_servers() {
            let v = table.value(i, j);
            if v == 0.0 || !occ.fits(inst, &table, i, j) {
                continue;
            }
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        if let Some((i, _)) = best {
            occ.commit(&table, i, j);
            assignment.set(j, Some(i));
        }
    }
    Allocation::score(inst, assignment)
}

/// Limit on exhaustive search, as `log2` of the number of candidate
/// assignments `(n + 1)^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactBudget {
    pub max_log2_assignments: f64,
}

impl Default for ExactBudget {
    fn default() -> Self {
        ExactBudget {
            max_log2_assignments: 40.0,
        }
    }
}

impl ExactBudget {
    pub fn check(&self, inst: &Instance) -> Result<()> {
        let (n, m) = (inst.num_servers(), inst.num_tasks());
        let required = m as f64 * ((n + 1) as f64).log2();
        if required > self.max_log2_assignments {
            return Err(Error::BudgetExceeded {
                servers: n,
                tasks: m,
                required,
                budget: self.max_log2_assignments,
            });
        }
        Ok(())
    }
}

struct Search<'a> {
    inst: &'a Instance,
    table: &'a RewardTable,
    /// contrib[j * (n + 1) + k]: value of task j on server k; slot n is
    /// "unassigned".
    contrib: Vec<f64>,
    /// Optimistic value of tasks j.. (sum of each task's best option).
    suffix_bound: Vec<f64>,
    used: Vec<f64>,
    current: Vec<Option<usize>>,
    best_value: f64,
    best: Option<Vec<Option<usize>>>,
}

impl Search<'_> {
    fn options(&self) -> usize {
        self.inst.num_servers() + 1
    }

    fn fits(&self, i: usize, j: usize) -> bool {
        self.used[i] + self.table.cycles(i, j) <= self.inst.server(i).capacity
            && self.table.assigned_time(i, j) <= self.inst.task(j).deadline
    }

    fn dfs(&mut self, j: usize, value: f64) {
        let m = self.inst.num_tasks();
        if j == m {
            if self.best.is_none() || value > self.best_value {
                self.best_value = value;
                self.best = Some(self.current.clone());
            }
            return;
        }
        if self.best.is_some() {
            let slack = 1e-9 * (1.0 + self.best_value.abs());
            if value + self.suffix_bound[j] + slack < self.best_value {
                return;
            }
        }
        let n = self.inst.num_servers();
        for i in 0..n {
            if !self.fits(i, j) {
                continue;
            }
            let saved = self.used[i];
            self.used[i] += self.table.cycles(i, j);
            self.current[j] = Some(i);
            let c = self.contrib[j * self.options() + i];
            self.dfs(j + 1, value + c);
            self.used[i] = saved;
        }
        self.current[j] = None;
        self.dfs(j + 1, value);
    }
}

/// Finds the feasible assignment with the largest objective value by
/// depth-first enumeration, pruning servers without residual capacity and
/// branches that cannot beat the incumbent.
///
/// Among equal-valued optima the lexicographically smallest assignment wins,
/// with "unassigned" ordered after every server index.
pub fn solve_exact(inst: &Instance, budget: ExactBudget) -> Result<Allocation> {
    budget.check(inst)?;
    let table = RewardTable::build(inst);
    let (n, m) = (inst.num_servers(), inst.num_tasks());
    let mut contrib = Vec::with_capacity(m * (n + 1));
    let mut suffix_bound = vec![0.0; m + 1];
    for j in 0..m {
        let mut best = 0.0f64;
        for i in 0..n {
            let c = task_contribution(inst, j, Some(i));
            if table.assigned_time(i, j) <= inst.task(j).deadline
                && table.cycles(i, j) <= inst.server(i).capacity
            {
                best = best.max(c);
            }
            contrib.push(c);
        }
        contrib.push(0.0);
        suffix_bound[j] = best;
    }
    for j in (0..m).rev() {
        suffix_bound[j] += suffix_bound[j + 1];
    }
    let mut search = Search {
        inst,
        table: &table,
        contrib,
        suffix_bound,
        used: vec![0.0; n],
        current: vec![None; m],
        best_value: f64::NEG_INFINITY,
        best: None,
    };
    search.dfs(0, 0.0);
    let best = search.best.expect("the empty assignment is always feasible");
    Allocation::score(inst, best.into())
}
