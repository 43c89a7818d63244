//! Seeded random matrices and states.
//!
//! Every stochastic routine draws from a `ChaCha8Rng` identified by a
//! `(seed, stream)` pair, so sample `i` of a run is the same no matter how
//! many workers evaluate the run.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::fock::{FockState, Parity};
use crate::{CMatrix, C64};

pub type Rng = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_normal(rng: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn complex_gaussian(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut Rng) -> CMatrix {
    let qr = complex_gaussian(n, n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(n: usize, rng: &mut Rng) -> CMatrix {
    let g = complex_gaussian(n, n, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Random complex antisymmetric matrix with Gaussian entries.
pub fn random_antisymmetric(n: usize, rng: &mut Rng) -> CMatrix {
    let g = complex_gaussian(n, n, rng);
    (&g - g.transpose()).scale(0.5)
}

/// Uniformly random unit vector in `C^dim`.
pub fn unit_vector(dim: usize, rng: &mut Rng) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| complex_normal(rng));
    let nv = v.norm();
    v.unscale(nv)
}

/// Haar-random pure state of `n` modes supported on one parity sector.
pub fn random_state(n: usize, parity: Parity, rng: &mut Rng) -> FockState {
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (mask, a) in amps.iter_mut().enumerate() {
        let odd = mask.count_ones() % 2 == 1;
        let keep = match parity {
            Parity::Even => !odd,
            Parity::Odd => odd,
            Parity::Mixed => true,
        };
        if keep {
            *a = complex_normal(rng);
        }
    }
    FockState::from_amplitudes(n, amps)
        .and_then(|s| s.normalized())
        .expect("random state has a valid dimension and nonzero norm")
}
