//! One-inclusion graph orientation laboratory.
//!
//! This crate builds one-inclusion graphs over finite hypothesis classes,
//! orients them with bounded out-degree (flow-based, closure, random-flip,
//! and a Varshamov-Tenengolts-coded rule that coordinates errors across
//! training sets), and runs the prediction experiment that separates
//! in-expectation optimality from high-probability behavior: the coded rule
//! keeps the optimal expected error yet concentrates a heavy error tail on a
//! coordinated family of training sets, while the closure rule never errs.

pub mod adversarial;
pub mod bits;
pub mod class;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod flow;
pub mod graph;
pub mod mix;
pub mod rule;
pub mod vt;

pub use adversarial::{AdversarialParams, AdversarialRule, BipartiteView};
pub use bits::BitVector;
pub use class::{is_star_system, ProjectedClass, StarSystem};
pub use error::{Error, Result};
pub use experiment::{Experiment, ExperimentConfig, RuleKind, Summary};
pub use graph::{closure_orientation, orient_min_max_outdegree, OneInclusionGraph, Orientation};
pub use rule::{exact_error, predict, ClosureRule, FlowRule, OrientationRule, RandomFlipRule};
