//! Simulator and bound toolkit for large 3D erasure networks.
//!
//! Nodes are placed uniformly in a cuboid of `n^lambda x n^mu x n^nu`
//! (unit node density) or in a unit cube with rescaled distances. Links
//! are memoryless erasure channels whose erasure probability grows with
//! distance, either exponentially or polynomially. Packets are routed
//! over a system of percolation highways in the three Cartesian
//! directions under a spatial-reuse TDMA schedule, and the measured
//! aggregate throughput is compared against exact cut-set upper bounds.

pub mod bounds;
pub mod channel;
pub mod harness;
pub mod netgen;
pub mod percolation;
pub mod routing;

pub use channel::ErasureModel;
pub use netgen::{DensityMode, NetworkConfig, NetworkInstance};
pub use percolation::{HighwaySystem, PercolationConfig, SubcubeGrid};
pub use routing::{RoutingConfig, SimReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no valid rectangle partition: kappa*ln({m_across}) = {raw:.4} < 1")]
    NoValidPartition { m_across: usize, raw: f64 },

    #[error("requested {quota} crossings but only {available} exist in rectangle")]
    QuotaInfeasible { quota: usize, available: usize },

    #[error("stalled link: success probability is zero")]
    StalledLink,

    #[error("bound requires p > 5/6, got p = {0}")]
    SubcriticalOccupancy(f64),

    #[error("polynomial decay parameter must exceed 3, got alpha = {0}")]
    AlphaOutOfRange(f64),

    #[error("interference series diverges: x = {0} >= 1")]
    DivergentSeries(f64),

    #[error("exponent fit needs {0}")]
    FitUnderdetermined(&'static str),

    #[error("all trials failed at n = {0}")]
    AllTrialsFailed(u64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
