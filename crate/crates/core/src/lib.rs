//! Wave-optics simulation of optical benches that realize the dimensionless
//! position and momentum operators, their coherent superposition in a
//! Mach-Zehnder interferometer, and the spatial Wigner functions of the
//! resulting fields.

pub mod bench;
pub mod elements;
pub mod error;
pub mod field;
pub mod interferometer;
pub mod io;
pub mod validation;
pub mod wigner;

pub use error::{ArmLabel, OpticsError, Result};
pub use field::{gaussian_input, BenchParams, ComplexField, GridSpec};
