//! Symbolic workbench for symmetries, adjoint-symmetries and their brackets
//! for systems of partial differential equations.

pub mod bracket;
pub mod dsl;
pub mod fixtures;
pub mod jetcalc;
pub mod linop;
pub mod params;
pub mod structure;
pub mod symexpr;
