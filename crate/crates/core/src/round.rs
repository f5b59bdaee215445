//! One resource-sharing round: servers publish resources, tasks are
//! submitted, a single trusted leader allocates them, and payments are
//! settled into an append-only ledger.
//!
//! Settlement for a task with origin `o` executed by `k`: the user pays
//! `p * mu_kj` to `k`, and when `k != o` the executor pays the intermediary
//! fee `lambda * p * mu_oj` to `o`. Unassigned tasks settle nothing.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::allocation::check_feasible;
use crate::baselines::{solve_exact, solve_greedy, solve_random, ExactBudget};
use crate::cost::{comm_energy, compute_energy, cycles_required};
use crate::domain::{Allocation, Instance, ServerSpec, TaskSpec};
use crate::error::{Error, Result};
use crate::qlearning::{self, LearnConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    QLearning,
    Greedy,
    Random,
    Exact,
}

impl SolverChoice {
    pub fn name(self) -> &'static str {
        match self {
            SolverChoice::QLearning => "qlearning",
            SolverChoice::Greedy => "greedy",
            SolverChoice::Random => "random",
            SolverChoice::Exact => "exact",
        }
    }

    /// Runs the solver. The random baseline draws from `learn.seed`.
    pub fn allocate(self, inst: &Instance, learn: &LearnConfig, budget: ExactBudget) -> Result<Allocation> {
        match self {
            SolverChoice::QLearning => Ok(qlearning::solve(inst, learn)?.best_assignment),
            SolverChoice::Greedy => solve_greedy(inst),
            SolverChoice::Random => solve_random(inst, learn.seed),
            SolverChoice::Exact => solve_exact(inst, budget),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum Party {
    /// The user that submitted task `id`.
    User(usize),
    Server(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaymentKind {
    TaskPayment,
    IntermediaryFee,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Payment {
    pub task: usize,
    pub payer: Party,
    pub payee: Party,
    pub amount: f64,
    pub kind: PaymentKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundConfig {
    pub learn: LearnConfig,
    pub exact_max_log2: Option<f64>,
}

impl RoundConfig {
    fn budget(&self) -> ExactBudget {
        self.exact_max_log2
            .map(|max_log2_assignments| ExactBudget { max_log2_assignments })
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub round: u64,
    pub solver: SolverChoice,
    pub intermediary_rate: f64,
    pub noise: f64,
    pub published_resources: Vec<ServerSpec>,
    pub task_descriptions: Vec<TaskSpec>,
    pub allocation: Allocation,
    pub payments: Vec<Payment>,
    /// Executing server per task, `null` when the task was not processed.
    pub results: Vec<Option<usize>>,
}

impl LedgerRecord {
    /// Rebuilds the instance this record was settled against.
    pub fn instance(&self) -> Result<Instance> {
        Ok(Instance::new(
            self.published_resources.clone(),
            self.task_descriptions.clone(),
            self.intermediary_rate,
            self.noise,
        )?)
    }
}

/// Settlement flows for an allocation.
pub fn settle(inst: &Instance, allocation: &Allocation) -> Vec<Payment> {
    let mut payments = Vec::new();
    for (j, a) in allocation.assignment.iter().enumerate() {
        let Some(k) = a else { continue };
        let t = inst.task(j);
        payments.push(Payment {
            task: j,
            payer: Party::User(j),
            payee: Party::Server(k),
            amount: t.unit_price * cycles_required(inst.server(k), t),
            kind: PaymentKind::TaskPayment,
        });
        let o = t.origin_server;
        if k != o {
            payments.push(Payment {
                task: j,
                payer: Party::Server(k),
                payee: Party::Server(o),
                amount: inst.intermediary_rate() * t.unit_price * cycles_required(inst.server(o), t),
                kind: PaymentKind::IntermediaryFee,
            });
        }
    }
    payments
}

/// Allocates, checks and settles one round.
pub fn run_round(round: u64, inst: &Instance, solver: SolverChoice, cfg: &RoundConfig) -> Result<LedgerRecord> {
    let allocation = solver.allocate(inst, &cfg.learn, cfg.budget())?;
    let report = check_feasible(inst, &allocation.assignment)?;
    if !report.ok() {
        return Err(Error::Ledger(format!(
            "{} produced an infeasible allocation: {:?}",
            solver.name(),
            report.violations
        )));
    }
    let payments = settle(inst, &allocation);
    Ok(LedgerRecord {
        round,
        solver,
        intermediary_rate: inst.intermediary_rate(),
        noise: inst.noise(),
        published_resources: inst.servers().to_vec(),
        task_descriptions: inst.tasks().to_vec(),
        results: allocation.assignment.as_slice().to_vec(),
        allocation,
        payments,
    })
}

/// Energy spent by `server` in the round: computing for tasks it executed
/// and uploading for its own tasks executed elsewhere.
pub fn server_energy(record: &LedgerRecord, server: usize) -> f64 {
    let s = &record.published_resources[server];
    let mut energy = 0.0;
    for (j, a) in record.allocation.assignment.iter().enumerate() {
        let Some(k) = a else { continue };
        let t = &record.task_descriptions[j];
        if k == server {
            energy += compute_energy(s, t);
        } else if t.origin_server == server {
            energy += comm_energy(s, t, record.noise);
        }
    }
    energy
}

/// Payments received minus payments made minus energy spent by `server`.
pub fn server_net_income(record: &LedgerRecord, server: usize) -> f64 {
    let me = Party::Server(server);
    let flows: f64 = record
        .payments
        .iter()
        .map(|p| {
            if p.payee == me {
                p.amount
            } else if p.payer == me {
                -p.amount
            } else {
                0.0
            }
        })
        .sum();
    flows - server_energy(record, server)
}

/// Total paid in by users.
pub fn user_payments(record: &LedgerRecord) -> f64 {
    record
        .payments
        .iter()
        .filter(|p| matches!(p.payer, Party::User(_)))
        .map(|p| p.amount)
        .sum()
}

/// Append-only sequence of round records, optionally mirrored to a JSON
/// lines file.
#[derive(Debug, Default)]
pub struct Ledger {
    records: Vec<LedgerRecord>,
    path: Option<PathBuf>,
}

impl Ledger {
    pub fn in_memory() -> Self {
        Ledger::default()
    }

    /// Opens (or creates) a ledger file, replaying and checking existing
    /// records.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut ledger = Ledger {
            records: Vec::new(),
            path: None,
        };
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (lineno, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: LedgerRecord = serde_json::from_str(&line)
                    .map_err(|e| Error::Ledger(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
                ledger.push(record)?;
            }
        }
        ledger.path = Some(path);
        Ok(ledger)
    }

    pub fn records(&self) -> &[LedgerRecord] {
        &self.records
    }

    pub fn next_round(&self) -> u64 {
        self.records.last().map_or(0, |r| r.round + 1)
    }

    fn push(&mut self, record: LedgerRecord) -> Result<()> {
        let expected = self.next_round();
        if record.round != expected {
            return Err(Error::Ledger(format!(
                "round {} out of sequence, expected {expected}",
                record.round
            )));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn append(&mut self, record: LedgerRecord) -> Result<&LedgerRecord> {
        if let Some(path) = &self.path {
            if record.round != self.next_round() {
                return Err(Error::Ledger(format!(
                    "round {} out of sequence, expected {}",
                    record.round,
                    self.next_round()
                )));
            }
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            let mut line = serde_json::to_string(&record)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
        }
        self.push(record)?;
        Ok(self.records.last().expect("just pushed"))
    }

    /// Runs the next round on `inst` and appends its record.
    pub fn run_round(&mut self, inst: &Instance, solver: SolverChoice, cfg: &RoundConfig) -> Result<&LedgerRecord> {
        let record = run_round(self.next_round(), inst, solver, cfg)?;
        self.append(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::evaluate;
    use crate::testutil::{own_task_instance, two_server_instance};

    fn rel_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn own_task_settles_single_payment() {
        let inst = own_task_instance(5.0, 10.0, 50.0);
        let rec = run_round(0, &inst, SolverChoice::Greedy, &RoundConfig::default()).unwrap();
        assert_eq!(rec.payments.len(), 1);
        let p = &rec.payments[0];
        assert_eq!((p.payer, p.payee, p.kind), (Party::User(0), Party::Server(0), PaymentKind::TaskPayment));
        assert!((p.amount - 0.5).abs() < 1e-12);
        assert!((server_net_income(&rec, 0) - 0.496).abs() < 1e-12);
    }

    #[test]
    fn foreign_assignment_pays_fee_to_origin() {
        let inst = two_server_instance();
        let alloc = crate::domain::Allocation {
            assignment: vec![Some(1), None, None].into(),
            total_utility: 0.0,
        };
        let pays = settle(&inst, &alloc);
        assert_eq!(pays.len(), 2);
        assert_eq!(pays[0].kind, PaymentKind::TaskPayment);
        assert_eq!((pays[1].payer, pays[1].payee), (Party::Server(1), Party::Server(0)));
        assert_eq!(pays[1].kind, PaymentKind::IntermediaryFee);
        assert!((pays[1].amount - 0.05).abs() < 1e-12);

        let rec = LedgerRecord {
            round: 0,
            solver: SolverChoice::Greedy,
            intermediary_rate: 0.1,
            noise: 0.01,
            published_resources: inst.servers().to_vec(),
            task_descriptions: inst.tasks().to_vec(),
            results: alloc.assignment.as_slice().to_vec(),
            allocation: alloc,
            payments: pays,
        };
        // Origin: lambda p mu - E_comm.
        let r0 = 5.0 * (1.0f64 + 1e6).log2();
        assert!((server_net_income(&rec, 0) - (0.05 - 100.0 / r0)).abs() < 1e-12);
        let total: f64 = (0..2).map(|i| server_net_income(&rec, i)).sum();
        assert!(rel_close(total, evaluate(&inst, &rec.allocation.assignment).unwrap()));
    }

    #[test]
    fn unassigned_tasks_settle_nothing() {
        let inst = two_server_instance();
        let alloc = crate::domain::Allocation {
            assignment: vec![None, Some(1), None].into(),
            total_utility: 0.0,
        };
        let pays = settle(&inst, &alloc);
        assert!(pays.iter().all(|p| p.task == 1));
        assert_eq!(pays.len(), 1);
    }

    #[test]
    fn idle_server_nets_zero() {
        let inst = two_server_instance();
        let alloc = crate::domain::Allocation {
            assignment: vec![Some(0), None, Some(0)].into(),
            total_utility: 0.0,
        };
        let rec = LedgerRecord {
            round: 0,
            solver: SolverChoice::Greedy,
            intermediary_rate: 0.1,
            noise: 0.01,
            published_resources: inst.servers().to_vec(),
            task_descriptions: inst.tasks().to_vec(),
            results: alloc.assignment.as_slice().to_vec(),
            payments: settle(&inst, &alloc),
            allocation: alloc,
        };
        assert_eq!(server_net_income(&rec, 1), 0.0);
    }

    #[test]
    fn ledger_rounds_are_sequential_and_persisted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.jsonl");
        let inst = two_server_instance();
        let cfg = RoundConfig::default();
        {
            let mut ledger = Ledger::open(&path).unwrap();
            assert_eq!(ledger.run_round(&inst, SolverChoice::Greedy, &cfg).unwrap().round, 0);
            assert_eq!(ledger.run_round(&inst, SolverChoice::Random, &cfg).unwrap().round, 1);
            let stale = ledger.records()[0].clone();
            assert!(ledger.append(stale).is_err());
        }
        let reopened = Ledger::open(&path).unwrap();
        assert_eq!(reopened.records().len(), 2);
        assert_eq!(reopened.next_round(), 2);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("\"published_resources\""));
        assert!(text.contains("\"intermediary_fee\"") || text.contains("\"task_payment\""));
        assert_eq!(reopened.records()[1].instance().unwrap(), inst);
    }

    #[test]
    fn exact_refusal_propagates() {
        let inst = two_server_instance();
        let cfg = RoundConfig {
            exact_max_log2: Some(1.0),
            ..RoundConfig::default()
        };
        assert!(matches!(
            run_round(0, &inst, SolverChoice::Exact, &cfg),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
