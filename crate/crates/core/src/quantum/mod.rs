//! Complex linear algebra for single-excitation photonic states and
//! two-qubit spin states.

mod density;
pub(crate) mod linalg;
mod spin;
mod state;
mod unitary;

pub use density::{density_from_pure, fidelity_with_pure, PhotonDensity, DENSE_MODE_LIMIT};
pub use spin::SpinDensity;
pub use state::PurePathState;
pub use unitary::{apply_unitary, Unitary};

/// Anything with a well-defined purity `tr(rho^2)`.
pub trait Purity {
    fn purity(&self) -> f64;
}

pub fn purity<D: Purity + ?Sized>(rho: &D) -> f64 {
    rho.purity()
}
