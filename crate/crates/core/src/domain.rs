//! Problem data shared by every solver, and the instance document format.
//!
//! An instance document is JSON with top-level keys `lambda`, `delta`,
//! `servers` and `tasks`:
//!
//! ```json
//! {
//!   "lambda": 0.1,
//!   "delta": 0.01,
//!   "servers": [{ "alpha": 0.01, "theta": 0.01, "f": 2.0, "mu": 300.0, "B": 5.0, "H": 10.0, "G": 10.0 }],
//!   "tasks": [{ "p": 5.0, "D": 10.0, "tau_e": 50.0, "origin": 0 }]
//! }
//! ```
//!
//! Indices are 0-based and implied by array position.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};

/// One offloading task as described by the user that submitted it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: usize,
    /// Payment per CPU cycle.
    pub unit_price: f64,
    pub data_size: f64,
    /// Completion deadline in seconds.
    pub deadline: f64,
    /// Server that received the raw data and submitted the description.
    pub origin_server: usize,
}

/// Computing and communication resources one server publishes for a round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerSpec {
    pub id: usize,
    pub cpu_arch_coeff: f64,
    pub cycles_per_sample: f64,
    pub cpu_frequency: f64,
    /// Maximum total CPU cycles available this round.
    pub capacity: f64,
    pub bandwidth: f64,
    pub tx_power: f64,
    pub channel_gain: f64,
}

impl TaskSpec {
    fn validate(&self, index: usize, servers: usize) -> Result<(), ValidationError> {
        if self.id != index {
            return Err(ValidationError::IdMismatch {
                entity: "task",
                index,
                id: self.id,
            });
        }
        let entity = || format!("task {index}");
        positive(entity, "p", self.unit_price)?;
        positive(entity, "D", self.data_size)?;
        positive(entity, "tau_e", self.deadline)?;
        if self.origin_server >= servers {
            return Err(ValidationError::OriginOutOfRange {
                task: index,
                origin: self.origin_server,
                servers,
            });
        }
        Ok(())
    }
}

impl ServerSpec {
    fn validate(&self, index: usize) -> Result<(), ValidationError> {
        if self.id != index {
            return Err(ValidationError::IdMismatch {
                entity: "server",
                index,
                id: self.id,
            });
        }
        let entity = || format!("server {index}");
        positive(entity, "alpha", self.cpu_arch_coeff)?;
        positive(entity, "theta", self.cycles_per_sample)?;
        positive(entity, "f", self.cpu_frequency)?;
        positive(entity, "mu", self.capacity)?;
        positive(entity, "B", self.bandwidth)?;
        positive(entity, "H", self.tx_power)?;
        positive(entity, "G", self.channel_gain)?;
        Ok(())
    }
}

fn positive(
    entity: impl FnOnce() -> String,
    field: &'static str,
    value: f64,
) -> Result<(), ValidationError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ValidationError::field(entity(), field, "finite and > 0", value))
    }
}

/// A complete allocation problem. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    servers: Vec<ServerSpec>,
    tasks: Vec<TaskSpec>,
    intermediary_rate: f64,
    noise: f64,
}

impl Instance {
    pub fn new(
        servers: Vec<ServerSpec>,
        tasks: Vec<TaskSpec>,
        intermediary_rate: f64,
        noise: f64,
    ) -> Result<Self, ValidationError> {
        let (n, m) = (servers.len(), tasks.len());
        if n == 0 || n > m {
            return Err(ValidationError::ServerTaskCount {
                servers: n,
                tasks: m,
            });
        }
        if !(0.0..1.0).contains(&intermediary_rate) {
            return Err(ValidationError::field(
                "instance",
                "lambda",
                "in [0, 1)",
                intermediary_rate,
            ));
        }
        if !(noise > 0.0 && noise <= 1.0) {
            return Err(ValidationError::field("instance", "delta", "in (0, 1]", noise));
        }
        for (i, s) in servers.iter().enumerate() {
            s.validate(i)?;
        }
        for (j, t) in tasks.iter().enumerate() {
            t.validate(j, n)?;
        }
        Ok(Instance {
            servers,
            tasks,
            intermediary_rate,
            noise,
        })
    }

    pub fn servers(&self) -> &[ServerSpec] {
        &self.servers
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    pub fn server(&self, i: usize) -> &ServerSpec {
        &self.servers[i]
    }

    pub fn task(&self, j: usize) -> &TaskSpec {
        &self.tasks[j]
    }

    pub fn num_servers(&self) -> usize {
        self.servers.len()
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    /// Fraction of a reassigned task's payment owed to its origin server.
    pub fn intermediary_rate(&self) -> f64 {
        self.intermediary_rate
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Rebuilds the instance with every task passed through `f`.
    pub fn map_tasks(&self, f: impl Fn(&TaskSpec) -> TaskSpec) -> Result<Self, ValidationError> {
        Instance::new(
            self.servers.clone(),
            self.tasks.iter().map(f).collect(),
            self.intermediary_rate,
            self.noise,
        )
    }
}

/// Per-task server choice; `None` is the explicit "unassigned" marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(Vec<Option<usize>>);

impl Assignment {
    pub fn unassigned(tasks: usize) -> Self {
        Assignment(vec![None; tasks])
    }

    pub fn get(&self, task: usize) -> Option<usize> {
        self.0[task]
    }

    pub fn set(&mut self, task: usize, server: Option<usize>) {
        self.0[task] = server;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<usize>> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.0
    }

    pub fn assigned_count(&self) -> usize {
        self.0.iter().filter(|a| a.is_some()).count()
    }
}

impl From<Vec<Option<usize>>> for Assignment {
    fn from(v: Vec<Option<usize>>) -> Self {
        Assignment(v)
    }
}

/// An assignment together with its objective value.
///
/// Construct through [`Allocation::score`](crate::allocation) so that
/// `total_utility` always matches [`crate::allocation::evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub assignment: Assignment,
    pub total_utility: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    lambda: f64,
    delta: f64,
    servers: Vec<ServerDoc>,
    tasks: Vec<TaskDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ServerDoc {
    alpha: f64,
    theta: f64,
    f: f64,
    mu: f64,
    #[serde(rename = "B")]
    bandwidth: f64,
    #[serde(rename = "H")]
    tx_power: f64,
    #[serde(rename = "G")]
    gain: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    p: f64,
    #[serde(rename = "D")]
    data: f64,
    tau_e: f64,
    origin: usize,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let servers = doc
        .servers
        .into_iter()
        .enumerate()
        .map(|(id, s)| ServerSpec {
            id,
            cpu_arch_coeff: s.alpha,
            cycles_per_sample: s.theta,
            cpu_frequency: s.f,
            capacity: s.mu,
            bandwidth: s.bandwidth,
            tx_power: s.tx_power,
            channel_gain: s.gain,
        })
        .collect();
    let tasks = doc
        .tasks
        .into_iter()
        .enumerate()
        .map(|(id, t)| TaskSpec {
            id,
            unit_price: t.p,
            data_size: t.data,
            deadline: t.tau_e,
            origin_server: t.origin,
        })
        .collect();
    Ok(Instance::new(servers, tasks, doc.lambda, doc.delta)?)
}

pub fn serialize_instance(inst: &Instance) -> String {
    let doc = InstanceDoc {
        lambda: inst.intermediary_rate,
        delta: inst.noise,
        servers: inst
            .servers
            .iter()
            .map(|s| ServerDoc {
                alpha: s.cpu_arch_coeff,
                theta: s.cycles_per_sample,
                f: s.cpu_frequency,
                mu: s.capacity,
                bandwidth: s.bandwidth,
                tx_power: s.tx_power,
                gain: s.channel_gain,
            })
            .collect(),
        tasks: inst
            .tasks
            .iter()
            .map(|t| TaskDoc {
                p: t.unit_price,
                data: t.data_size,
                tau_e: t.deadline,
                origin: t.origin_server,
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("instance document is always serializable");
    out.push('\n');
    out
}
