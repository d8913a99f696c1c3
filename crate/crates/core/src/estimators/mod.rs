//! Moment and c.d.f. estimators built from the left-step process `Z`.

mod cdf;
pub mod io;
mod moments;
mod oracles;
mod weights;

pub use cdf::{estimate_cdf, estimate_cdf_sweep, sup_loss, CdfEstimate};
pub use moments::{estimate_moment, DeviationBound, MomentEstimate};
pub use oracles::{conditional_cdf_oracle, conditional_moment_oracle, ORACLE_TAIL};
pub use weights::{binomial, hypergeometric_pmf, phi, psi};
