//! Numerical machinery for the resonance method on degree-2 L-functions.
//!
//! The crate is split along the pipeline: integer/multiplicative arithmetic
//! (`arith`), resonator profiles and Dirichlet polynomials (`resonator`),
//! archimedean factors and the phase equation (`archimedean`), L-value
//! evaluation via approximate functional equation and smoothed series
//! (`lfun`), and moment assembly with oscillatory kernels (`moments`).
//!
//! Everything here is allocation-only (`no_std` + `alloc`); IO, file formats
//! and the command-line driver live in the companion `resonance-lab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod archimedean;
pub mod error;
pub mod lfun;
pub mod moments;
pub mod quad;
pub mod resonator;

mod flt;
mod gamma;
mod roots;

pub use error::{Error, Result};
pub use gamma::{digamma, log_gamma};

/// Complex double used throughout.
pub type C64 = num_complex::Complex<f64>;
