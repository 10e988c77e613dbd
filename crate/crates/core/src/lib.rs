//! Coherent biclustering of user × page access matrices.
//!
//! The pipeline has three stages: two-way K-means seeding ([`seeding`]),
//! greedy ACV-driven growth of each seed ([`greedy`]) and a genetic
//! algorithm over binary membership strings ([`evolve`]). [`metrics`] holds
//! the scoring functions shared by every stage, [`ingest`] turns
//! clickstream sequences into an [`AccessMatrix`], and [`synth`] builds
//! matrices with implanted ground truth for recovery experiments.
//!
//! The crate is `no_std` and only needs `alloc`; file handling and the
//! command-line driver live in the `webbic` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod evolve;
pub mod greedy;
pub mod ingest;
pub mod metrics;
pub mod rng;
pub mod seeding;
pub mod synth;

pub use error::{Error, Result};
pub use evolve::{Chromosome, GaConfig, GaHistory, GaOutcome, GenerationStats, Scored, Threshold};
pub use greedy::{Growth, Move, Stage, StageRecord, StageTrace};
pub use ingest::{AccessMatrix, Session, SessionLog};
pub use metrics::{Bicluster, OverlapReport};
pub use seeding::SeedingConfig;
pub use synth::{CoherenceModel, ImplantSpec, Recovery, SyntheticData};
