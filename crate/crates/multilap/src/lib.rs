//! Tensor Laplacians and consensus dynamics on multilayer networks.
//!
//! A multilayer network couples several weighted graphs ("layers") through
//! interlayer edges. This crate builds the combinatorial Laplacian of such a
//! network as a supra-matrix over all (layer, node) pairs and integrates two
//! flows driven by it:
//!
//! * **diffusion** `ẋ = −𝓛x`, which relaxes toward a network-wide constant,
//!   and
//! * a **saddle-point flow** that couples a state vector with Lagrange
//!   multipliers to minimize a sum of per-node convex costs subject to
//!   network-wide agreement — distributed consensus optimization.
//!
//! Per-layer and per-layer-pair diffusion scales multiply edge weights, so
//! the same topology can be swept across coupling strengths without being
//! rebuilt. The [`experiment`] module drives runs and sweeps from JSON
//! manifests; the `multilap` binary exposes the same machinery on the
//! command line.
//!
//! # Example
//!
//! Relax diffusion on a tiny two-layer network and watch it forget its
//! initial condition:
//!
//! ```
//! use multilap::laplacian::LaplacianTensor;
//! use multilap::network::{NetworkBuilder, NodeLayerId};
//! use multilap::dynamics::integrate_diffusion;
//! use multilap::ode::IntegratorConfig;
//! use ndarray::array;
//!
//! let net = NetworkBuilder::new(vec![1, 1])
//!     .inter_edge(NodeLayerId::new(0, 0), NodeLayerId::new(1, 0), 1.0)
//!     .build()?;
//! let lap = LaplacianTensor::from_network(&net);
//!
//! let mut config = IntegratorConfig::default();
//! config.t_end = 10.0;
//! let traj = integrate_diffusion(&lap, array![1.0, 0.0], &config)?;
//!
//! let last = traj.final_sample();
//! // Mass spreads evenly: both components settle at the mean 0.5.
//! assert!((last.y[0] - 0.5).abs() < 1e-6);
//! assert!((last.y[1] - 0.5).abs() < 1e-6);
//! # Ok::<(), multilap::error::Error>(())
//! ```

pub mod cli;
pub mod cost;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod format;
pub mod laplacian;
pub mod linalg;
pub mod network;
pub mod ode;

pub use cost::{CostModel, QuadraticCost};
pub use dynamics::{ConsensusReport, Trajectory};
pub use error::{Error, Result};
pub use experiment::{run_experiment, run_sweep, ExperimentManifest};
pub use laplacian::LaplacianTensor;
pub use network::{Builtin, MultilayerNetwork, NetworkBuilder, NodeLayerId};

/// Runs every fenced Rust block in the guide as a doctest, so the book can
/// never drift from the API it documents.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/laplacian.md")]
    mod laplacian {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
