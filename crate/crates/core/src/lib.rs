//! Prototype-based fuzzy clustering with knowledge transfer from a source
//! domain: TFCM (centers), TFKPC (planes) and TFSC (weighted subspaces),
//! their non-transfer baselines, validity indices, synthetic benchmark
//! generators and an experiment harness.

// Range checks are written as `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod config;
pub mod data;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod partition;
pub mod prototypes;
pub mod solver;
pub mod transfer;

pub use config::AlgoConfig;
pub use data::DataMatrix;
pub use error::{Error, Result};
pub use partition::FuzzyPartition;
pub use prototypes::{
    CenterSet, KnowledgeKind, PlaneSet, Prototypes, SourceKnowledge, SubspaceKnowledge, SubspaceWeightSet,
};
pub use solver::{RunResult, SweepState};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/transfer.md")]
    mod transfer {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    mod datasets {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
