//! Tabular Q-learning over task states.
//!
//! Each episode walks the tasks in order. At task `j` the agent may pick any
//! server whose reward entry is non-zero and that still has room for the task
//! given what this episode already committed, and whose completion time meets
//! the task's deadline. Picks follow an epsilon-greedy policy where `epsilon`
//! is the probability of exploiting the Q-table. The step reward is the
//! reward-table entry of the chosen pair. The best episode over the run is
//! returned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::Occupancy;
use crate::domain::{Allocation, Assignment, Instance};
use crate::error::{Result, ValidationError};
use crate::reward::RewardTable;

/// State-action values, one row per task and one column per server.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    tasks: usize,
    servers: usize,
    q: Vec<f64>,
}

impl QTable {
    pub fn new(tasks: usize, servers: usize) -> Self {
        QTable {
            tasks,
            servers,
            q: vec![0.0; tasks * servers],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.tasks, self.servers)
    }

    pub fn get(&self, task: usize, server: usize) -> f64 {
        self.q[task * self.servers + server]
    }

    pub fn set(&mut self, task: usize, server: usize, value: f64) {
        self.q[task * self.servers + server] = value;
    }

    pub fn row(&self, task: usize) -> &[f64] {
        &self.q[task * self.servers..(task + 1) * self.servers]
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    /// Largest value among `actions` at `task`; 0 when `actions` is empty.
    pub fn max_over(&self, task: usize, actions: &[usize]) -> f64 {
        let row = self.row(task);
        actions
            .iter()
            .map(|&i| row[i])
            .fold(None, |best: Option<f64>, v| Some(best.map_or(v, |b| b.max(v))))
            .unwrap_or(0.0)
    }
}

/// Partial assignment built during one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeState {
    occupancy: Occupancy,
    assignment: Assignment,
    episode_reward: f64,
}

impl EpisodeState {
    pub fn new(servers: usize, tasks: usize) -> Self {
        EpisodeState {
            occupancy: Occupancy::new(servers),
            assignment: Assignment::unassigned(tasks),
            episode_reward: 0.0,
        }
    }

    /// Cycles committed to each server so far this episode.
    pub fn acc_cycles(&self) -> &[f64] {
        self.occupancy.used()
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn episode_reward(&self) -> f64 {
        self.episode_reward
    }

    pub fn commit(&mut self, table: &RewardTable, server: usize, task: usize) {
        self.occupancy.commit(table, server, task);
        self.assignment.set(task, Some(server));
        self.episode_reward += table.value(server, task);
    }

    fn reset(&mut self) {
        self.occupancy.reset();
        self.assignment = Assignment::unassigned(self.assignment.len());
        self.episode_reward = 0.0;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub episodes: usize,
    pub learning_rate: f64,
    pub discount: f64,
    /// Probability of exploiting the current Q-table at each state.
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            episodes: 500,
            learning_rate: 0.1,
            discount: 0.9,
            epsilon: 0.9,
            seed: 42,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.episodes == 0 {
            return Err(ValidationError::Config("episodes must be >= 1".into()));
        }
        for (name, v) in [
            ("learning_rate", self.learning_rate),
            ("discount", self.discount),
            ("epsilon", self.epsilon),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ValidationError::Config(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best_assignment: Allocation,
    /// Sum of step rewards collected in the best episode.
    pub best_reward: f64,
    pub reward_trajectory: Vec<f64>,
    pub best_so_far_trajectory: Vec<f64>,
    pub q_table: QTable,
}

/// Servers with a non-zero reward for `task`, ascending.
pub fn nonzero_actions(table: &RewardTable, task: usize) -> Vec<usize> {
    table
        .column(task)
        .enumerate()
        .filter(|&(_, v)| v != 0.0)
        .map(|(i, _)| i)
        .collect()
}

fn screen(
    candidates: &[usize],
    task: usize,
    episode: &EpisodeState,
    table: &RewardTable,
    inst: &Instance,
) -> Vec<usize> {
    candidates
        .iter()
        .copied()
        .filter(|&i| episode.occupancy.fits(inst, table, i, task))
        .collect()
}

/// Non-zero-reward servers that can still take `task` without exceeding
/// their capacity given the episode's commitments, and that finish it in
/// time.
pub fn available_actions(
    task: usize,
    episode: &EpisodeState,
    table: &RewardTable,
    inst: &Instance,
) -> Vec<usize> {
    screen(&nonzero_actions(table, task), task, episode, table, inst)
}

/// Epsilon-greedy choice among `avail`. Exploitation breaks ties toward the
/// lowest server index.
pub fn select_action<R: Rng + ?Sized>(
    task: usize,
    avail: &[usize],
    q: &QTable,
    epsilon: f64,
    rng: &mut R,
) -> Option<usize> {
    if avail.is_empty() {
        return None;
    }
    let x: f64 = rng.gen();
    if x < epsilon {
        let row = q.row(task);
        let mut best = avail[0];
        for &i in &avail[1..] {
            if row[i] > row[best] {
                best = i;
            }
        }
        Some(best)
    } else {
        Some(avail[rng.gen_range(0..avail.len())])
    }
}

/// One temporal-difference step. `next_avail` is the action set of the next
/// task state; it is empty after the last task.
pub fn q_update(
    q: &mut QTable,
    task: usize,
    server: usize,
    reward: f64,
    next_avail: &[usize],
    learning_rate: f64,
    discount: f64,
) {
    let future = if task + 1 < q.tasks {
        q.max_over(task + 1, next_avail)
    } else {
        0.0
    };
    let old = q.get(task, server);
    q.set(task, server, old + learning_rate * (reward + discount * future - old));
}

pub fn solve(inst: &Instance, cfg: &LearnConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let table = RewardTable::build(inst);
    solve_with_table(inst, &table, cfg)
}

/// Same as [`solve`] with a prebuilt reward table for `inst`.
pub fn solve_with_table(inst: &Instance, table: &RewardTable, cfg: &LearnConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let (n, m) = (inst.num_servers(), inst.num_tasks());
    let nonzero: Vec<Vec<usize>> = (0..m).map(|j| nonzero_actions(table, j)).collect();
    let mut q = QTable::new(m, n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut episode = EpisodeState::new(n, m);

    let mut rewards = Vec::with_capacity(cfg.episodes);
    let mut best_so_far = Vec::with_capacity(cfg.episodes);
    let mut best: Option<(f64, Assignment)> = None;

    for _ in 0..cfg.episodes {
        episode.reset();
        let mut avail = screen(&nonzero[0], 0, &episode, table, inst);
        for j in 0..m {
            let choice = select_action(j, &avail, &q, cfg.epsilon, &mut rng);
            if let Some(i) = choice {
                episode.commit(table, i, j);
                debug_assert!(episode.acc_cycles()[i] <= inst.server(i).capacity);
            }
            let next = if j + 1 < m {
                screen(&nonzero[j + 1], j + 1, &episode, table, inst)
            } else {
                Vec::new()
            };
            if let Some(i) = choice {
                q_update(&mut q, j, i, table.value(i, j), &next, cfg.learning_rate, cfg.discount);
            }
            avail = next;
        }

        let total = episode.episode_reward;
        rewards.push(total);
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, episode.assignment.clone()));
        }
        best_so_far.push(best.as_ref().map(|(b, _)| *b).unwrap_or(total));
    }

    let (best_reward, assignment) = best.expect("at least one episode runs");
    Ok(SolveResult {
        best_assignment: Allocation::score(inst, assignment)?,
        best_reward,
        reward_trajectory: rewards,
        best_so_far_trajectory: best_so_far,
        q_table: q,
    })
}
