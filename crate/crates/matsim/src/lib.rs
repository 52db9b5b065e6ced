//! Finite-dimensional Monte Carlo for the matrix Jacobi process.
//!
//! A unitary Brownian motion `Y_t` on `U(d)` is stepped geometrically and
//! compressed to `J_t = XX*`, with `X` the top-left `m × p` block of `Y_t`.
//! As `d → ∞` with `m/p → λ` and `p/d → θ`, the spectrum of `J_t` follows the
//! free Jacobi process `FJP(λ, θ)` studied in `free-jacobi-core`. A second
//! scheme integrates the `m × m` matrix Jacobi SDE directly.
//!
//! Every trial draws from its own ChaCha8 stream (see [`trial_rng`]) and
//! results are reduced in trial order, so a run is bit-for-bit reproducible
//! for any number of worker threads.

#![forbid(unsafe_code)]

pub mod brownian;
pub mod config;
pub mod corner;
pub mod error;
pub mod haar;
pub mod simulate;
pub mod stats;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{MatrixJacobiConfig, MatrixStart, Scheme};
pub use error::{MatsimError, Result};
pub use simulate::{simulate, simulate_direct_sde, simulate_trajectory, Health, Snapshot, TrajectoryRecord};
pub use stats::{convergence_study, ks_distance, martingale_diagnostic, stationary_ks};

/// The random stream of one trial: ChaCha8 keyed by `seed`, stream number
/// `trial`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}
