//! Weather data characterization, modelling and sequence generation.
//!
//! The crate is organised along the workflow it supports:
//!
//! * [`climdata`] ingests measured series, filters them by climatic
//!   criteria, bins them and derives psychrometric quantities.
//! * [`solargeo`] provides the solar geometry behind clearness indices.
//! * [`distfit`] fits Weibull, Saunier and Gaussian laws and checks them
//!   with a chi-square test.
//! * [`corrfit`] fits linear-in-parameters correlation functions on
//!   criteria-filtered data.
//! * [`arma`] runs the Box-Jenkins identification, estimation, diagnosis
//!   and simulation pipeline.
//! * [`neuralfit`] trains one-hidden-layer networks with Levenberg-Marquardt.
//! * [`genseq`] stores fitted models in a registry and chains them into
//!   coherent multi-variable sequences.
//! * [`validate`] compares generated and measured data.
//!
//! The `weathergen` binary exposes the same pipeline on the command line,
//! and `examples/` holds one runnable program per capability.

pub mod arma;
pub mod cli;
pub mod climdata;
pub mod corrfit;
pub mod distfit;
mod error;
pub mod genseq;
pub mod neuralfit;
pub mod solargeo;
pub mod stats;
pub mod synthetic;
pub mod validate;

pub use error::{Error, Result, Unresolved};

/// Version string stamped into registry entries and exported files.
pub const VERSION: &str = concat!("weathergen ", env!("CARGO_PKG_VERSION"));
