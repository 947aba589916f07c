//! Sparse trust mining.
//!
//! Trust statements `[trustor, trustee, value]` with values in [0, 1] form a
//! square sparse matrix. The roundtable gossip engine gives every entity
//! full self-confidence, softmax-normalizes each row and repeatedly lets
//! entities adopt their acquaintances' opinions (`T <- G T`) until the
//! nonzero pattern stops growing, then averages the levels. The crate also
//! carries three classic trust metrics for comparison and the evaluation
//! harness used to score them against held-out statements.

pub mod baselines;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod pathtrace;

pub use engine::{
    aggregate, inject_self_confidence, propagate_step, run_rga, run_rga_with_progress, softmax_normalize,
    Aggregation, NormalizedTrustMatrix, PropagationResult, RgaConfig,
};
pub use error::{Error, Result};
pub use matrix::{sparsity_degree, spmm, spmm_with_tolerance, SparseTrustMatrix, TrustList, TrustRecord};
