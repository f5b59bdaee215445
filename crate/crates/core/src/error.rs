use thiserror::Error;

/// A violated invariant on instance data or solver configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("constraint C4 violated: need 0 < n <= m, got n = {servers}, m = {tasks}")]
    ServerTaskCount { servers: usize, tasks: usize },

    #[error("task {task}: origin server {origin} out of range (n = {servers})")]
    OriginOutOfRange {
        task: usize,
        origin: usize,
        servers: usize,
    },

    #[error("{entity} {index}: id is {id}, expected its position {index}")]
    IdMismatch {
        entity: &'static str,
        index: usize,
        id: usize,
    },

    #[error("{entity}: `{field}` must be {requirement}, got {value}")]
    Field {
        entity: String,
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("assignment has {got} entries, instance has {expected} tasks")]
    AssignmentLength { expected: usize, got: usize },

    #[error("task {task} assigned to server {server}, but n = {servers}")]
    ServerOutOfRange {
        task: usize,
        server: usize,
        servers: usize,
    },

    #[error("{0}")]
    Config(String),
}

impl ValidationError {
    pub(crate) fn field(
        entity: impl Into<String>,
        field: &'static str,
        requirement: &'static str,
        value: f64,
    ) -> Self {
        ValidationError::Field {
            entity: entity.into(),
            field,
            requirement,
            value,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed instance document at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Validation(#[from] ValidationError),

    #[error(
        "exact search refused: m * log2(n + 1) = {required:.2} exceeds the enumeration budget of {budget:.2} (n = {servers}, m = {tasks})"
    )]
    BudgetExceeded {
        servers: usize,
        tasks: usize,
        required: f64,
        budget: f64,
    },

    #[error("ledger: {0}")]
    Ledger(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
