use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by graph construction, the compartment models, the
/// controllers and the simulation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("arc c{arc} references missing vertex {vertex}")]
    DanglingEndpoint { arc: usize, vertex: usize },
    #[error("arc c{arc} has tail = head = {vertex}")]
    SelfLoopArc { arc: usize, vertex: usize },
    #[error("compartment c{k} has negative weight {value}")]
    NegativeWeight { k: usize, value: f64 },
    #[error("arc c{arc} carries unknown material `{material}`")]
    UnknownMaterial { arc: usize, material: String },
    #[error("unknown vertex compartment {0}")]
    UnknownVertex(usize),
    #[error("unknown arc compartment {0}")]
    UnknownArc(usize),
    #[error("balance system is underdetermined: {free} unknown(s) left free")]
    Underdetermined { free: usize },
    #[error("balance of vertex c{vertex} cannot be satisfied (residual {residual})")]
    Inconsistent { vertex: usize, residual: f64 },
    #[error("more than {budget} directed cycles")]
    CycleBudgetExceeded { budget: usize },
    #[error("stock would become negative ({stock} kg)")]
    StockUnderflow { stock: f64 },
    #[error("truck inertia matrix B is singular")]
    SingularB,
    #[error("input matrix G is singular: {channel} = {value}")]
    SingularG { channel: &'static str, value: f64 },
    #[error("Lyapunov gradient is undefined at the origin")]
    OriginSingularity,
    #[error("reservoir would be drained below zero")]
    ReservoirEmpty,
    #[error("rate function returned a non-finite value at t = {t}")]
    NonFiniteRate { t: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("alpha = {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("trajectory has no channel `{0}`")]
    MissingChannel(String),
    #[error("mass ledger drift {drift} kg at t = {time_s} s")]
    LedgerViolation { time_s: f64, drift: f64 },
    #[error("root finding did not converge: {0}")]
    NoConvergence(String),
    #[error("{phase} phase: {source}")]
    Phase { phase: &'static str, source: Box<Error> },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used as the prefix of CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DuplicateId { .. } => "DUPLICATE_ID",
            Error::DanglingEndpoint { .. } => "DANGLING_ENDPOINT",
            Error::SelfLoopArc { .. } => "SELF_LOOP_ARC",
            Error::NegativeWeight { .. } => "NEGATIVE_WEIGHT",
            Error::UnknownMaterial { .. } => "UNKNOWN_MATERIAL",
            Error::UnknownVertex(_) => "UNKNOWN_VERTEX",
            Error::UnknownArc(_) => "UNKNOWN_ARC",
            Error::Underdetermined { .. } => "UNDERDETERMINED",
            Error::Inconsistent { .. } => "INCONSISTENT",
            Error::CycleBudgetExceeded { .. } => "CYCLE_BUDGET_EXCEEDED",
            Error::StockUnderflow { .. } => "STOCK_UNDERFLOW",
            Error::SingularB => "SINGULAR_B",
            Error::SingularG { .. } => "SINGULAR_G",
            Error::OriginSingularity => "ORIGIN_SINGULARITY",
            Error::ReservoirEmpty => "RESERVOIR_EMPTY",
            Error::NonFiniteRate { .. } => "NON_FINITE_RATE",
            Error::InvalidParameter { .. } => "INVALID_PARAMETER",
            Error::InvalidScenario(_) => "INVALID_SCENARIO",
            Error::AlphaOutOfRange(_) => "ALPHA_OUT_OF_RANGE",
            Error::MissingChannel(_) => "MISSING_CHANNEL",
            Error::LedgerViolation { .. } => "LEDGER_VIOLATION",
            Error::NoConvergence(_) => "NO_CONVERGENCE",
            Error::Phase { source, .. } => source.code(),
            Error::Parse { .. } => "PARSE",
            Error::Io(_) => "IO",
        }
    }

    pub(crate) fn in_phase(self, phase: &'static str) -> Self {
        match self {
            e @ Error::Phase { .. } => e,
            e => Error::Phase { phase, source: Box::new(e) },
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.to_string())
        } else {
            Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
