//! Numerical harmonic analysis around sphere-singular Fourier multipliers:
//! complex-order Bessel functions, the multipliers built from them,
//! multi-parameter Sobolev norms, dyadic cone and sphere-cap decompositions,
//! localized kernel scans, and a spectral Duhamel wave solver.
//!
//! Generic routines take any [`Real`] scalar; the aliases below fix `f64`.

pub mod acceptance;
pub mod bessel;
pub mod decomp;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernelcheck;
pub mod multipliers;
pub mod prober;
pub mod scalar;
pub mod sobolev;
pub mod stats;
pub mod wave;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Field64 = grid::Field<f64>;
pub type Field32 = grid::Field<f32>;
