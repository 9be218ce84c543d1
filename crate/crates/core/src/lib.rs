//! Coordinate Bethe ansatz for open and periodic spin-½ chains.
//!
//! The crate builds Bethe wavefunctions for the XXX chain with periodic,
//! diagonal-open and upper-triangular-open boundaries, solves the
//! corresponding Bethe equations, and checks every claimed eigenpair against
//! a dense eigensolver. The XXZ chain with non-diagonal boundaries is covered
//! at the level of its Hamiltonian, the boundary-parameter constraints and the
//! gauged local basis.
//!
//! Conventions used throughout:
//!
//! * `|↑⟩ = (1, 0)ᵀ`, `|↓⟩ = (0, 1)ᵀ`; sites are numbered `1..=L`.
//! * In the full `2^L` space a basis index has bit `x - 1` set iff site `x`
//!   carries a down spin.
//! * Momenta `k` are complex; `z = e^{ik}`.

pub mod ansatz;
pub mod basis;
pub mod bethe;
pub mod cli;
pub mod dense;
mod error;
pub mod hamiltonian;
pub mod oracle;
pub mod weyl;
pub mod xxz;

pub use error::{Error, Result};
pub(crate) use error::{invalid, invalid_dim};

/// Complex scalar used everywhere in the crate.
pub type C64 = num_complex::Complex64;

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
