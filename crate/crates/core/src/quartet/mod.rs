//! Closed forms for four single-particle levels.
//!
//! Every definite-parity state of four modes is written in an eight-element
//! special basis with coordinates `v = (alpha, conj(beta))`:
//!
//! - odd: `c†_i |0>` and `c_i |full>`;
//! - even: `|0>`, `c†_j c†_1 |0>` (j = 2..4), `-|full>`, `c_1 c_j |full>`
//!   (j = 2..4).
//!
//! In both sectors the dualization acts as `v -> T conj(v)` with
//! `T = [[0, I], [I, 0]]`, so everything downstream of [`special_basis`] is
//! parity agnostic.

mod mixed;

pub use mixed::{
    closing_phases, components_for_rank, d_values_both_routes, formation_entanglement, formation_entanglement_split,
    mixed_concurrence, optimal_decomposition, parity_split, sector_matrix, sector_state, two_fermion_mixture,
    werner_mixture, ConcurrenceReport, Decomposition, DecompositionRoute, ParitySplit,
};

use nalgebra::DVector;

use crate::bogoliubov::{diagonalize_qsp, quasiparticle_amplitudes, BogoliubovMap};
use crate::densities::qsp_matrix;
use crate::error::{Error, Result};
use crate::fock::{FockState, Parity, NORM_TOL};
use crate::linalg::complete_orthonormal;
use crate::{binary_entropy, CMatrix, C64};

/// Number of modes handled by this module.
pub const MODES: usize = 4;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// The eight special-basis states of one parity sector, in coordinate order.
pub fn special_basis(parity: Parity) -> Result<Vec<FockState>> {
    let vac = FockState::vacuum(MODES)?;
    let full = FockState::filled(MODES)?;
    let mut out = Vec::with_capacity(8);
    match parity {
        Parity::Odd => {
            for i in 0..MODES {
                out.push(vac.create(i)?);
            }
            for i in 0..MODES {
                out.push(full.annihilate(i)?);
            }
        }
        Parity::Even => {
            out.push(vac.clone());
            for j in 1..MODES {
                out.push(vac.create(0)?.create(j)?);
            }
            out.push(&full * -1.0);
            for j in 1..MODES {
                out.push(full.annihilate(j)?.annihilate(0)?);
            }
        }
        Parity::Mixed => return Err(Error::MixedParity),
    }
    Ok(out)
}

/// `16 x 8` isometry whose columns are the special basis.
pub fn basis_matrix(parity: Parity) -> Result<CMatrix> {
    let cols: Vec<DVector<C64>> = special_basis(parity)?.iter().map(FockState::to_vector).collect();
    Ok(CMatrix::from_columns(&cols))
}

/// The dualization matrix `[[0, I4], [I4, 0]]`.
pub fn dual_matrix() -> CMatrix {
    let mut t = CMatrix::zeros(8, 8);
    for i in 0..MODES {
        t[(i, MODES + i)] = C64::new(1.0, 0.0);
        t[(MODES + i, i)] = C64::new(1.0, 0.0);
    }
    t
}

/// `u^T T v` for special-basis coordinates; `|v^T T v|` is the concurrence.
pub fn dual_form(u: &DVector<C64>, v: &DVector<C64>) -> C64 {
    (0..MODES).map(|i| u[i] * v[MODES + i] + u[MODES + i] * v[i]).sum()
}

/// Four-mode state of definite parity in the special basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuartetState {
    parity: Parity,
    alpha: [C64; 4],
    beta: [C64; 4],
}

impl QuartetState {
    pub fn new(parity: Parity, alpha: [C64; 4], beta: [C64; 4]) -> Result<Self> {
        if parity == Parity::Mixed {
            return Err(Error::MixedParity);
        }
        let norm: f64 = alpha.iter().chain(beta.iter()).map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(QuartetState { parity, alpha, beta })
    }

    /// From coordinates `(alpha, conj(beta))`; the vector must be normalized.
    pub fn from_coordinates(parity: Parity, v: &DVector<C64>) -> Result<Self> {
        if v.len() != 8 {
            return Err(Error::Dimension { expected: 8, got: v.len() });
        }
        let alpha = [v[0], v[1], v[2], v[3]];
        let beta = [v[4].conj(), v[5].conj(), v[6].conj(), v[7].conj()];
        Self::new(parity, alpha, beta)
    }

    pub fn from_fock(state: &FockState) -> Result<Self> {
        if state.n() != MODES {
            return Err(Error::NotFourLevels(state.n()));
        }
        state.ensure_normalized()?;
        let parity = state.definite_parity()?;
        let basis = special_basis(parity)?;
        let v = DVector::from_iterator(8, basis.iter().map(|b| b.inner(state)));
        // Renormalize away rounding in the projection.
        let v = v.unscale(v.norm());
        Self::from_coordinates(parity, &v)
    }

    pub fn to_fock(&self) -> Result<FockState> {
        FockState::from_vector(MODES, &(basis_matrix(self.parity)? * self.coordinates()))
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn alpha(&self) -> &[C64; 4] {
        &self.alpha
    }

    pub fn beta(&self) -> &[C64; 4] {
        &self.beta
    }

    pub fn coordinates(&self) -> DVector<C64> {
        DVector::from_iterator(8, self.alpha.iter().copied().chain(self.beta.iter().map(|b| b.conj())))
    }

    /// `beta† alpha`.
    pub fn overlap(&self) -> C64 {
        self.beta.iter().zip(&self.alpha).map(|(b, a)| b.conj() * a).sum()
    }

    /// Coordinates of the dual state `T |psi>*`.
    pub fn dual(&self) -> QuartetState {
        QuartetState { parity: self.parity, alpha: self.beta, beta: self.alpha }
    }

    /// Odd-sector number-conserving rotation `c = U a`:
    /// `alpha -> U† alpha`, `beta -> det(U) U† beta`.
    pub fn rotated(&self, u: &CMatrix) -> Result<QuartetState> {
        if self.parity != Parity::Odd {
            return Err(Error::Invariant("rotation formula applies to the odd sector".into()));
        }
        let a = DVector::from_row_slice(&self.alpha);
        let b = DVector::from_row_slice(&self.beta);
        let ud = u.adjoint();
        let det = u.determinant();
        let a2 = &ud * a;
        let b2 = &ud * b * det;
        QuartetState::new(Parity::Odd, [a2[0], a2[1], a2[2], a2[3]], [b2[0], b2[1], b2[2], b2[3]])
    }
}

/// `C = 2 |beta† alpha|`.
pub fn pure_concurrence(q: &QuartetState) -> f64 {
    (2.0 * q.overlap().norm()).min(1.0)
}

/// Concurrence of a four-mode Fock state of definite parity.
pub fn concurrence_of(state: &FockState) -> Result<f64> {
    Ok(pure_concurrence(&QuartetState::from_fock(state)?))
}

/// Four-fold degenerate quasiparticle occupations `(f+, f-)`.
pub fn qsp_eigenvalues_analytic(q: &QuartetState) -> (f64, f64) {
    occupations_from_concurrence(pure_concurrence(q))
}

/// `f± = (1 ± sqrt(1 - C^2)) / 2`.
pub fn occupations_from_concurrence(c: f64) -> (f64, f64) {
    let s = (1.0 - c * c).max(0.0).sqrt();
    ((1.0 + s) / 2.0, (1.0 - s) / 2.0)
}

/// `4 h(f+)`.
pub fn entropy_from_concurrence(c: f64) -> f64 {
    4.0 * binary_entropy(occupations_from_concurrence(c).0)
}

pub fn entropy_qsp_analytic(q: &QuartetState) -> f64 {
    entropy_from_concurrence(pure_concurrence(q))
}

/// `T |psi>*`, with the complex conjugate taken in the occupation basis.
pub fn dual_state(state: &FockState) -> Result<FockState> {
    QuartetState::from_fock(state)?.dual().to_fock()
}

/// Two-term representation of a pure state in its own quasiparticle basis.
#[derive(Clone, Debug)]
pub struct NormalForm {
    /// Real and nonnegative, `alpha^2 = f+`.
    pub alpha: f64,
    /// `|beta|^2 = f-`.
    pub beta: C64,
    /// The state equals, up to a global phase, `apply_map(q', map)` where `q'`
    /// has coordinates `alpha' e_1`, `beta' e_1` in the state's parity.
    pub map: BogoliubovMap,
}

impl NormalForm {
    /// The two-term state in the original occupation basis.
    pub fn reconstruct(&self, parity: Parity) -> Result<FockState> {
        let q =
            QuartetState::new(parity, [C64::new(self.alpha, 0.0), ZERO, ZERO, ZERO], [self.beta, ZERO, ZERO, ZERO])?;
        crate::bogoliubov::apply_map(&q.to_fock()?, &self.map)
    }
}

/// Gap `f+ - f-` below which the spectrum is treated as degenerate.
const DEGENERATE_GAP: f64 = 1e-6;

/// Quasiparticle basis in which the state has a single `alpha` and a single
/// `beta` component with `|alpha'| >= |beta'|`.
pub fn normal_form(q: &QuartetState) -> Result<NormalForm> {
    let parity = q.parity;
    let state = q.to_fock()?;
    let is_normal =
        q.alpha[1..].iter().chain(&q.beta[1..]).all(|z| z.norm() < 1e-12) && q.alpha[0].norm() >= q.beta[0].norm();
    let map = if is_normal {
        BogoliubovMap::identity(MODES)
    } else {
        let (fp, fm) = qsp_eigenvalues_analytic(q);
        let flip0 = BogoliubovMap::particle_hole(MODES, &[0])?;
        if fp - fm > DEGENERATE_GAP {
            // All occupations equal f-: the state is the even two-term form
            // relative to this vacuum, so odd states need mode 1 exchanged.
            let diag = diagonalize_qsp(&qsp_matrix(&state)?)?.map;
            match parity {
                Parity::Even => diag,
                _ => BogoliubovMap::compose(&diag, &flip0)?,
            }
        } else {
            // C = 1: any basis diagonalizes; choose e_1 along alpha.
            let sp = number_conserving_along(&q.alpha, &q.beta)?;
            match parity {
                Parity::Odd => sp,
                _ => BogoliubovMap::compose(&BogoliubovMap::compose(&flip0, &sp)?, &flip0)?,
            }
        }
    };
    let inside = QuartetState::from_fock(&quasiparticle_amplitudes(&state, &map)?)?;
    let residual = inside.alpha[1..].iter().chain(&inside.beta[1..]).map(|z| z.norm()).fold(0.0, f64::max);
    if residual > 1e-8 {
        return Err(Error::Invariant(format!("normal form leaves weight {residual:e} outside mode 1")));
    }
    let (a, b) = (inside.alpha[0], inside.beta[0]);
    let phase = if a.norm() > 0.0 { a.conj() / a.norm() } else { C64::new(1.0, 0.0) };
    // A global factor multiplies alpha and conj(beta) alike.
    Ok(NormalForm { alpha: a.norm(), beta: (b.conj() * phase).conj(), map })
}

/// Map `a = U† c` with the first column of `U` along `alpha` (or `beta` if
/// `alpha` vanishes).
fn number_conserving_along(alpha: &[C64; 4], beta: &[C64; 4]) -> Result<BogoliubovMap> {
    let a = DVector::from_row_slice(alpha);
    let b = DVector::from_row_slice(beta);
    let lead = if a.norm() > 1e-12 { a } else { b };
    let mut cols = vec![lead.unscale(lead.norm())];
    complete_orthonormal(&mut cols, MODES);
    BogoliubovMap::new(CMatrix::from_columns(&cols), CMatrix::zeros(MODES, MODES))
}
