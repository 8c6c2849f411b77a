//! Adaptive compressive-sensing support recovery for structured sparse
//! classes: s-sets, unions of s-intervals, s-stars on a complete graph, and
//! submatrices.
//!
//! The crate provides
//! - the structured support classes and a noisy projection oracle with an
//!   energy ledger ([`support`], [`sensing`]),
//! - a sequential likelihood-ratio test engine and the two-phase
//!   search/refine recovery procedures built on it ([`slrt`],
//!   [`recovery_slrt`]),
//! - sample-efficient sense-and-search bisection procedures with
//!   deterministic measurement schedules ([`recovery_cass`]),
//! - closed-form sufficient/necessary signal-strength thresholds and sample
//!   bounds ([`theory`]),
//! - a seeded, parallel Monte Carlo harness for phase-transition sweeps
//!   ([`harness`]).

pub mod error;
pub mod harness;
pub mod recovery_cass;
pub mod recovery_slrt;
pub mod sensing;
pub mod slrt;
pub mod support;
pub mod theory;

pub use error::{Error, MeasureError, Result};
pub use harness::{
    CompareResult, ExperimentConfig, MuGridSpec, ProcedureId, SweepPoint, SweepResult,
    TrialRecord,
};
pub use recovery_slrt::{PhaseBreakdown, RecoveryResult};
pub use sensing::{BudgetMode, LogPolicy, QueryRecord, SenseVector, SensingOracle, SignalInstance};
pub use slrt::{SlrtConfig, SlrtDecision, SlrtOutcome};
pub use support::{EdgeIndexer, SupportClass, SupportSet};
pub use theory::{LabeledValue, RegimeCheck, ThresholdReport};
