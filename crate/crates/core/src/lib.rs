//! Learning the signed support of drift coefficients of high-dimensional
//! linear and linearly-parametrized stochastic differential equations from
//! sampled trajectories, via row-wise l1-regularized least squares.
//!
//! The crate is organized around the pipeline
//! `ensembles -> lyapunov -> sim -> basis -> estimator`, with closed-form
//! sample-complexity bounds in [`bounds`] and a Monte-Carlo experiment
//! driver in [`harness`].

pub mod basis;
pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod io;
pub mod lyapunov;
pub mod seed;
pub mod sim;

pub use error::{DriftError, Result};
