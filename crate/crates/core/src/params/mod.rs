//! Exact arithmetic in the field of rational functions of the parameters.

pub mod linalg;
mod poly;
mod scalar;

pub use poly::{PMono, Poly};
pub use scalar::ParamScalar;
