use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("configuration error on line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },

    #[error("Helmholtz solve did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    SolverDivergence { iterations: usize, residual: f64 },

    #[error("invariant violated at step {step}: {violation}")]
    Invariant { step: usize, violation: Violation },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 configuration, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ConfigLine { .. } => 1,
            Error::SolverDivergence { .. } | Error::Invariant { .. } => 2,
            Error::Snapshot(_) | Error::Io(_) => 3,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn at_line(line: usize, msg: impl Into<String>) -> Self {
        Error::ConfigLine { line, msg: msg.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NonFinite,
    DensityRange,
    NutrientRange,
    DrugRange,
    PotentialRange,
    BoundaryData,
    TransportCfl,
    NutrientCfl,
    DrugCfl,
    Positivity,
    MassBudget,
}

/// A failed runtime check, with the offending value and the limit it broke.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub value: f64,
    pub limit: f64,
    /// Interior multi-index (1-based on active axes) when the check is per cell.
    pub cell: Option<[usize; 3]>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {} (value {:e}, limit {:e}", self.kind, self.detail, self.value, self.limit)?;
        if let Some(c) = self.cell {
            write!(f, ", cell {:?}", c)?;
        }
        write!(f, ")")
    }
}
