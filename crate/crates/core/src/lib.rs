pub mod config;
pub mod constitutive;
pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod preset;
pub mod run;
pub mod snapshot;
pub mod stepper;
pub mod verify;

pub use constitutive::ModelParams;
pub use error::{Error, Result, Violation, ViolationKind};
pub use grid::{make_grid, BoundaryKind, BoundaryValue, Field, FieldName, Grid};
