//! Non-parametric estimation of the environment law of a one-dimensional
//! random walk in random environment (RWRE) from a single trajectory.
//!
//! The crate is organised bottom-up:
//!
//! * [`env_model`]: environment laws ν, their exact c.d.f. and mixed moments,
//!   the Bernstein-type target `F^M` and the regime / κ solver.
//! * [`walk_sim`]: lazily sampled environments, the step-by-step quenched walk,
//!   the branching-process sampler for the left-step counts `Z`, the annealed
//!   transition kernel and the invariant-law tail.
//! * [`estimators`]: the moment estimators, the c.d.f. estimators `F̂^M` and
//!   brute-force conditional-expectation oracles.
//! * [`lepskii`]: adaptive selection of `M`.
//! * [`experiments`]: the Monte Carlo replication harness.

pub mod env_model;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod lepskii;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod walk_sim;

pub use env_model::{EnvSpec, Regime};
pub use error::{Error, Result};
pub use estimators::{CdfEstimate, DeviationBound, MomentEstimate};
pub use lepskii::{LepskiiResult, ZPolicy};
pub use walk_sim::{Environment, KernelRow, SamplerMode, ZPath};
