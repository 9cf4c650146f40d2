//! Harmonic analysis for the Weinstein operator on the half-space `R^d x (0, inf)`.

pub mod error;
pub mod grid;
pub mod interp;
pub mod linalg;
pub mod localization;
pub mod par;
pub mod samples;
pub mod specfun;
pub mod transform;
pub mod translation;
pub mod wavelet;

pub use error::{Error, Result};
