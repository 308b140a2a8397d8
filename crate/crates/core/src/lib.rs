//! Unsupervised evaluation of binary classifier trios from their joint
//! decision counts.
//!
//! The crate recovers label prevalence and per-classifier per-label
//! accuracies from the eight decision-pattern counts of a trio, assuming
//! the classifiers make independent errors, and reports when that
//! assumption is contradicted by the data. A majority-voting baseline,
//! group labeling decisions, synthetic test generation and ground-truth
//! statistics are provided for comparison and verification.

pub mod decision;
pub mod error;
pub mod exact;
pub mod forward;
pub mod majority;
pub mod model;
pub mod moments;
pub mod sketch;
pub mod solver;
pub mod stats;
pub mod synth;

#[cfg(test)]
mod testdata;

pub use error::{Error, Result};
pub use exact::Rational;
pub use model::{
    aggregate, frequencies, project, Aggregate, ByTrueLabelCounts, DecisionPattern, DecisionRecord,
    EvaluationEstimate, EvaluationPoint, Label, Pair, PatternCounts, PatternFrequencies, Slot,
};
pub use decision::{compare_methods, evaluate_trio, ComparisonReport, Method};
pub use moments::TrioMoments;
pub use sketch::Sketch;
pub use solver::{evaluate, AeSolution, AlarmKind, AlarmStatus, SelectionPolicy, SolverOptions};
