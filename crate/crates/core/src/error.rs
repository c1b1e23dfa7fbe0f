// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DaptError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e}, allowed {allowed:.3e})")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error(
        "matrix is singular or too close to singular (smallest singular value {sigma_min:.3e})"
    )]
    Singular { sigma_min: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("block structure changed at s = {s}: {detail}")]
    StructureChanged { s: f64, detail: String },

    #[error("ambiguous eigenvalue clustering at s = {s}: {detail}")]
    ClusterAmbiguity { s: f64, detail: String },

    #[error("gap between blocks {m} and {n} closed at s = {s} (|gap| = {gap:.3e})")]
    GapClosure {
        s: f64,
        m: usize,
        n: usize,
        gap: f64,
    },

    #[error("basis of block {block} jumped at s = {s} (smallest overlap singular value {sigma_min:.3e}); refine the grid")]
    GaugeJump {
        s: f64,
        block: usize,
        sigma_min: f64,
    },

    #[error("unitarity drift {drift:.3e} in block {block} at s = {s}; reduce the step")]
    UnitarityDrift { s: f64, block: usize, drift: f64 },

    #[error("order {requested} exceeds the configured maximum {max}")]
    OrderExceeded { requested: usize, max: usize },

    #[error("initial-condition sum rule violated at order {order} (residual {residual:.3e})")]
    SumRule { order: usize, residual: f64 },

    #[error("integration not converged: halving the step changed the endpoint by {change:.3e}")]
    NotConverged { change: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
}

pub type Result<T> = std::result::Result<T, DaptError>;
