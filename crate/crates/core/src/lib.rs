//! Numerical testbench for discretization-limited entanglement.
//!
//! The crate simulates three desk-scale experiments side by side under
//! standard quantum mechanics and under an N-discretized state space:
//!
//! * single-photon W-state generation in an iterated beamsplitter cascade,
//!   with per-element loss, a mirror return test and a Walsh certification
//!   stage ([`optics`]),
//! * the two-photon ring-aperture correlation test ([`optics::spdc`]),
//! * the two-mass gravitational spin-entanglement witness ([`bmv`]).
//!
//! Single-photon states live in the single-excitation subspace: `M` path
//! modes plus one vacuum (loss) mode, so a 2^20-mode W state costs a few
//! megabytes rather than 2^(2^20) amplitudes.

pub mod bmv;
pub mod error;
pub mod ist;
pub mod optics;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Pure-state identity tolerance.
pub const PURE_TOL: f64 = 1e-12;
/// Channel contract tolerance (trace preservation, unitarity).
pub const CHANNEL_TOL: f64 = 1e-10;

pub(crate) fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}
