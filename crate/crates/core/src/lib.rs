//! Exponential-type smoothing kernels and Jackson-type inequality checks for
//! shift groups on periodic and weighted-line function spaces.

pub mod approximation;
pub mod error;
pub mod experiment;
pub mod kernel;
pub mod numeric;
pub mod par;
pub mod quadrature;
pub mod smoothness;
pub mod space;
pub mod weight;

pub use error::{Error, Result};
