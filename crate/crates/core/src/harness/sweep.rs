use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generator::{generate_instance, scale_data, scale_prices, GeneratorParams};
use super::run_solver;
use crate::baselines::ExactBudget;
use crate::domain::Instance;
use crate::error::{Error, Result, ValidationError};
use crate::qlearning::{LearnConfig, SolveResult};
use crate::round::SolverChoice;

/// Solvers compared in every sweep cell, in output order.
pub const SWEEP_SOLVERS: [SolverChoice; 3] = [SolverChoice::QLearning, SolverChoice::Greedy, SolverChoice::Random];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    NumServers,
    NumTasks,
    /// Percentage increase of every unit price over the seed's base instance.
    PriceScale,
    /// Percentage increase of every data size over the seed's base instance.
    DataScale,
    LearningRate,
    Discount,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NumServers => "num_servers",
            SweepAxis::NumTasks => "num_tasks",
            SweepAxis::PriceScale => "price_scale",
            SweepAxis::DataScale => "data_scale",
            SweepAxis::LearningRate => "learning_rate",
            SweepAxis::Discount => "discount",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub learn: LearnConfig,
    pub generator: GeneratorParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.values.is_empty() || self.seeds.is_empty() {
            return Err(ValidationError::Config("sweep needs at least one value and one seed".into()));
        }
        let increasing = self.values.windows(2).all(|w| w[0] < w[1]);
        let decreasing = self.values.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(ValidationError::Config(format!(
                "sweep values must be strictly monotone: {:?}",
                self.values
            )));
        }
        for &v in &self.values {
            let ok = match self.axis {
                SweepAxis::NumServers | SweepAxis::NumTasks => v >= 1.0 && v.fract() == 0.0,
                SweepAxis::PriceScale | SweepAxis::DataScale => v > -100.0 && v.is_finite(),
                SweepAxis::LearningRate | SweepAxis::Discount => (0.0..=1.0).contains(&v),
            };
            if !ok {
                return Err(ValidationError::Config(format!(
                    "value {v} is out of range for axis {}",
                    self.axis.name()
                )));
            }
        }
        Ok(())
    }

    /// Instance and learning parameters for one cell.
    pub fn cell(&self, value: f64, seed: u64) -> Result<(Instance, LearnConfig)> {
        let mut gen = self.generator.clone();
        let mut learn = LearnConfig {
            seed,
            ..self.learn.clone()
        };
        match self.axis {
            SweepAxis::NumServers => gen.num_servers = value as usize,
            SweepAxis::NumTasks => gen.num_tasks = value as usize,
            SweepAxis::LearningRate => learn.learning_rate = value,
            SweepAxis::Discount => learn.discount = value,
            SweepAxis::PriceScale | SweepAxis::DataScale => {}
        }
        let base = generate_instance(&gen, seed)?;
        let factor = 1.0 + value / 100.0;
        let inst = match self.axis {
            SweepAxis::PriceScale => scale_prices(&base, factor)?,
            SweepAxis::DataScale => scale_data(&base, factor)?,
            _ => base,
        };
        Ok((inst, learn))
    }
}

/// One CSV row; the field order is the file's column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub seed: u64,
    pub solver: String,
    /// Empty when the solver failed on this cell.
    pub total_reward: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub episode: usize,
    pub reward: f64,
    pub best_so_far: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub seed: u64,
}

impl TraceRow {
    /// One row per episode of a learning run.
    pub fn from_result(res: &SolveResult, learn: &LearnConfig) -> Vec<TraceRow> {
        res.reward_trajectory
            .iter()
            .zip(&res.best_so_far_trajectory)
            .enumerate()
            .map(|(episode, (&reward, &best_so_far))| TraceRow {
                episode,
                reward,
                best_so_far,
                alpha: learn.learning_rate,
                gamma: learn.discount,
                seed: learn.seed,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Per-episode learning traces, grouped by (value, seed) in sweep order.
    pub traces: Vec<TraceRow>,
    /// Diagnostics for rows whose solver failed.
    pub errors: Vec<String>,
}

struct CellResult {
    key: (usize, usize),
    rows: Vec<SweepRow>,
    traces: Vec<TraceRow>,
    errors: Vec<String>,
}

fn run_cell(spec: &SweepSpec, vi: usize, si: usize) -> CellResult {
    let value = spec.values[vi];
    let seed = spec.seeds[si];
    let mut out = CellResult {
        key: (vi, si),
        rows: Vec::new(),
        traces: Vec::new(),
        errors: Vec::new(),
    };
    let cell = spec.cell(value, seed);
    for solver in SWEEP_SOLVERS {
        let start = Instant::now();
        let result = cell
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|(inst, learn)| {
                run_solver(inst, solver, learn, ExactBudget::default())
                    .map(|o| (o, learn))
                    .map_err(|e| e.to_string())
            });
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let total_reward = match result {
            Ok((outcome, learn)) => {
                if let Some(res) = &outcome.learning {
                    out.traces.extend(TraceRow::from_result(res, learn));
                }
                Some(outcome.total_reward)
            }
            Err(msg) => {
                out.errors.push(format!(
                    "{}={value} seed={seed} solver={}: {msg}",
                    spec.axis.name(),
                    solver.name()
                ));
                None
            }
        };
        out.rows.push(SweepRow {
            axis: spec.axis.name().to_string(),
            value,
            seed,
            solver: solver.name().to_string(),
            total_reward,
            wall_ms,
        });
    }
    out
}

/// Runs every (value, seed) cell with each of [`SWEEP_SOLVERS`]. Cells run in
/// parallel; output is ordered by value, then seed, then solver regardless
/// of schedule. Solver failures become rows with an empty reward.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    spec.validate()?;
    let keys: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|vi| (0..spec.seeds.len()).map(move |si| (vi, si)))
        .collect();
    let mut cells: Vec<CellResult> = keys.par_iter().map(|&(vi, si)| run_cell(spec, vi, si)).collect();
    cells.sort_by_key(|c| c.key);
    let mut out = SweepOutput::default();
    for c in cells {
        out.rows.extend(c.rows);
        out.traces.extend(c.traces);
        out.errors.extend(c.errors);
    }
    Ok(out)
}

pub fn write_rows<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    write_csv(rows, out)
}

pub fn write_traces<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    write_csv(rows, out)
}

fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(Error::from)
}

pub const SWEEP_HEADER: &str = "axis,value,seed,solver,total_reward,wall_ms";
pub const TRACE_HEADER: &str = "episode,reward,best_so_far,alpha,gamma,seed";
