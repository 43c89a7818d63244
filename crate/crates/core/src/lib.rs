//! Mode, one-body and quasiparticle entanglement of fermionic states with
//! definite number parity.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: occupation-number basis, signed ladder operators, parity,
//!   pure and mixed states.
//! - [`densities`]: one-body density matrix, pairing tensor, the extended
//!   `2n x 2n` generalized density matrix and the entropy hierarchy built on
//!   top of them (basis entropy, one-body entropy, quasiparticle entropy,
//!   quadratic entropy, generalized `S_f`, majorization).
//! - [`bogoliubov`]: canonical quasiparticle transformations, their action on
//!   Fock states, Thouless vacua and the structured diagonalization of the
//!   generalized density matrix.
//! - [`quartet`]: closed forms for four single-particle levels: pure and
//!   mixed-state fermionic concurrence, normal forms, dualization, optimal
//!   decompositions and the convex-roof entanglement entropy.
//! - [`oracle`]: brute-force searches over bases and decompositions used to
//!   cross-check every closed form.
//!
//! Data-parallel loops (sampling, property sweeps) go through [`par`], which
//! uses rayon when the `parallel` feature is enabled and falls back to plain
//! iterators otherwise.

pub mod bogoliubov;
pub mod densities;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod quartet;
pub mod random;

pub use error::{Error, Result};
pub use fock::{FockState, Ladder, MixedState, Parity};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Binary entropy `-p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
///
/// The argument is clipped to `[0, 1]` first.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    xlog2x(p) + xlog2x(1.0 - p)
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}
