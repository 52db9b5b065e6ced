//! Numerical toolkit for the free Jacobi process.
//!
//! The crate is `no_std` and needs only `alloc`. It covers:
//!
//! * [`measures`]: probability laws on `[0, 1]` made of two boundary atoms
//!   and a sampled density, with quadrature, moments, Cauchy transforms and
//!   Stieltjes inversion.
//! * [`stationary`]: the closed-form stationary law of `FJP(λ, θ)` and its
//!   transforms.
//! * [`moments`]: the nonlinear moment hierarchy and functionals derived
//!   from it.
//! * [`cauchy`]: the evolution equation for the Cauchy transform `G_t`.
//!
//! Randomized finite-dimensional simulation lives in the companion crate
//! `free-jacobi-matsim`; file formats and the command line live in
//! `free-jacobi`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cauchy;
pub mod dd;
pub mod error;
mod fft;
pub mod linalg;
pub mod measures;
pub mod moments;
pub mod params;
pub mod quad;
pub mod special;
pub mod stationary;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::JacobiParams;
