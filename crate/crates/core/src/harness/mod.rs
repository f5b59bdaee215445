//! Experiment driver: instance generation, configuration and sweeps.

pub mod config;
pub mod generator;
pub mod sweep;

use crate::baselines::ExactBudget;
use crate::domain::{Allocation, Instance};
use crate::error::Result;
use crate::qlearning::{self, LearnConfig, SolveResult};
use crate::reward::RewardTable;
use crate::round::SolverChoice;

/// What one solver run produced.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub allocation: Allocation,
    /// Sum of reward-table entries over the chosen (server, task) pairs.
    /// For the learning solver this is its best episode reward.
    pub total_reward: f64,
    /// Full learning record, for the learning solver only.
    pub learning: Option<SolveResult>,
}

pub fn run_solver(
    inst: &Instance,
    solver: SolverChoice,
    learn: &LearnConfig,
    budget: ExactBudget,
) -> Result<SolveOutcome> {
    let table = RewardTable::build(inst);
    if solver == SolverChoice::QLearning {
        let res = qlearning::solve_with_table(inst, &table, learn)?;
        return Ok(SolveOutcome {
            allocation: res.best_assignment.clone(),
            total_reward: res.best_reward,
            learning: Some(res),
        });
    }
    let allocation = solver.allocate(inst, learn, budget)?;
    Ok(SolveOutcome {
        total_reward: table.assignment_reward(&allocation.assignment),
        allocation,
        learning: None,
    })
}
