//! Probabilistic stability certificates for switched linear systems learned
//! from sampled output trajectories.
//!
//! The pipeline is: [`data::collect`] draws initial states and switching words,
//! [`data::extract_pairs`] forms the start/end output windows, [`solver::solve`]
//! finds the smallest contraction rate `γ*` with an output-quadratic Lyapunov
//! certificate `P*`, and [`guarantees`] turns `(γ*, P*)` into upper bounds on
//! the joint spectral radius that hold with quantified confidence.

// `!(x >= lo)` style guards are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod model;
pub mod serde_ext;
pub mod data;
pub mod solver;
pub mod guarantees;
pub mod cli;

pub use error::{Error, Result};
