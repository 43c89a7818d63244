//! Occupation-number basis and fermionic ladder operators.
//!
//! Basis states are indexed by a bitmask: bit `k` set means mode `k` is
//! occupied (modes are 0-based here; mode `k` is level `k + 1` in the usual
//! 1-based notation). The basis state for the set `{j1 < j2 < ... < jm}` is
//! `c†_{j1} c†_{j2} ... c†_{jm} |0>`, which fixes every operator sign:
//! `c†_j` and `c_j` pick up `(-1)^(number of occupied modes below j)`.

use std::ops::{Add, Mul, Sub};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect};
use crate::{CMatrix, C64};

pub const MAX_MODES: usize = 12;
pub const NORM_TOL: f64 = 1e-12;
pub const PARITY_TOL: f64 = 1e-12;
/// Tolerance for Hermiticity, trace and positivity of density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn of_mask(mask: usize) -> Parity {
        if mask.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => Parity::Mixed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Action of one ladder operator on a basis state: the signed image, or
/// `None` when the result vanishes.
#[inline]
pub fn ladder_on_basis(op: Ladder, mode: usize, mask: usize) -> Option<(f64, usize)> {
    let bit = 1usize << mode;
    let occupied = mask & bit != 0;
    let below = (mask & (bit - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    match (op, occupied) {
        (Ladder::Create, false) => Some((sign, mask | bit)),
        (Ladder::Annihilate, true) => Some((sign, mask & !bit)),
        _ => None,
    }
}

/// Action of an operator word on a basis state. The word is read left to
/// right as written, so its last letter acts first.
pub fn word_on_basis(word: &[(Ladder, usize)], mask: usize) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    let mut m = mask;
    for &(op, mode) in word.iter().rev() {
        let (s, next) = ladder_on_basis(op, mode, m)?;
        sign *= s;
        m = next;
    }
    Some((sign, m))
}

/// Dense `2^n x 2^n` matrix of an operator word.
pub fn word_matrix(n: usize, word: &[(Ladder, usize)]) -> CMatrix {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for mask in 0..dim {
        if let Some((s, image)) = word_on_basis(word, mask) {
            m[(image, mask)] += C64::new(s, 0.0);
        }
    }
    m
}

/// Dense matrix of the number parity `exp(i pi N)`.
pub fn parity_matrix(n: usize) -> CMatrix {
    let dim = 1usize << n;
    CMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            ZERO
        } else if i.count_ones() % 2 == 0 {
            ONE
        } else {
            -ONE
        }
    })
}

fn check_modes(n: usize) -> Result<()> {
    if n == 0 || n > MAX_MODES {
        Err(Error::ModeCount(n))
    } else {
        Ok(())
    }
}

fn check_mode(n: usize, mode: usize) -> Result<()> {
    if mode >= n {
        Err(Error::ModeOutOfRange { mode, n })
    } else {
        Ok(())
    }
}

/// Dense state vector over the `2^n` occupation-number basis states.
///
/// The vector is not required to be normalized; operations that need a
/// physical state check normalization themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    n: usize,
    amps: Vec<C64>,
}

/// Occupied/empty split of a state with respect to one mode.
#[derive(Clone, Debug)]
pub struct ConditionalComponents {
    pub p_occupied: f64,
    pub occupied: Option<FockState>,
    pub p_empty: f64,
    pub empty: Option<FockState>,
}

impl FockState {
    pub fn zeros(n: usize) -> Result<Self> {
        check_modes(n)?;
        Ok(FockState { n, amps: vec![ZERO; 1 << n] })
    }

    pub fn vacuum(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Completely filled state `c†_1 ... c†_n |0>`.
    pub fn filled(n: usize) -> Result<Self> {
        check_modes(n)?;
        Self::basis(n, (1 << n) - 1)
    }

    pub fn basis(n: usize, mask: usize) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        if mask >= s.amps.len() {
            return Err(Error::Dimension { expected: s.amps.len(), got: mask + 1 });
        }
        s.amps[mask] = ONE;
        Ok(s)
    }

    /// Product `c†_{modes[0]} c†_{modes[1]} ... |0>` in the order given.
    pub fn from_creations(n: usize, modes: &[usize]) -> Result<Self> {
        let mut s = Self::vacuum(n)?;
        for &m in modes.iter().rev() {
            s = s.create(m)?;
        }
        Ok(s)
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        check_modes(n)?;
        if amps.len() != 1 << n {
            return Err(Error::Dimension { expected: 1 << n, got: amps.len() });
        }
        Ok(FockState { n, amps })
    }

    pub fn from_vector(n: usize, v: &DVector<C64>) -> Result<Self> {
        Self::from_amplitudes(n, v.iter().copied().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, mask: usize) -> C64 {
        self.amps[mask]
    }

    pub fn to_vector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amps)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|a| a.norm() < NORM_TOL)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let nrm = self.norm_sqr().sqrt();
        if nrm < NORM_TOL {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(C64::new(1.0 / nrm, 0.0)))
    }

    pub fn scaled(&self, z: C64) -> Self {
        FockState { n: self.n, amps: self.amps.iter().map(|a| a * z).collect() }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FockState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|` for normalized states; 1 means equal up to phase.
    pub fn fidelity_amplitude(&self, other: &FockState) -> f64 {
        self.inner(other).norm()
    }

    /// Complex conjugate in the computational basis.
    pub fn conjugated(&self) -> Self {
        FockState { n: self.n, amps: self.amps.iter().map(|a| a.conj()).collect() }
    }

    /// Multiply by a global phase so the largest-magnitude amplitude is real
    /// and positive.
    pub fn phase_fixed(&self) -> Self {
        let mut best = ZERO;
        for a in &self.amps {
            if a.norm() > best.norm() + 1e-14 {
                best = *a;
            }
        }
        if best.norm() == 0.0 {
            return self.clone();
        }
        self.scaled(best.conj() / best.norm())
    }

    pub fn apply(&self, op: Ladder, mode: usize) -> Result<Self> {
        check_mode(self.n, mode)?;
        let mut out = vec![ZERO; self.amps.len()];
        for (mask, a) in self.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            if let Some((s, image)) = ladder_on_basis(op, mode, mask) {
                out[image] += a * s;
            }
        }
        Ok(FockState { n: self.n, amps: out })
    }

    /// `c†_mode |self>`.
    pub fn create(&self, mode: usize) -> Result<Self> {
        self.apply(Ladder::Create, mode)
    }

    /// `c_mode |self>`.
    pub fn annihilate(&self, mode: usize) -> Result<Self> {
        self.apply(Ladder::Annihilate, mode)
    }

    /// Apply an operator word; the last letter acts first.
    pub fn apply_word(&self, word: &[(Ladder, usize)]) -> Result<Self> {
        let mut s = self.clone();
        for &(op, mode) in word.iter().rev() {
            s = s.apply(op, mode)?;
        }
        Ok(s)
    }

    /// Apply a dense operator matrix on the Fock space.
    pub fn apply_matrix(&self, m: &CMatrix) -> Result<Self> {
        if m.ncols() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: m.ncols() });
        }
        Self::from_vector(self.n, &(m * self.to_vector()))
    }

    /// `<self| word |self>`.
    pub fn expectation_word(&self, word: &[(Ladder, usize)]) -> Result<C64> {
        for &(_, mode) in word {
            check_mode(self.n, mode)?;
        }
        let mut acc = ZERO;
        for (mask, a) in self.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            if let Some((s, image)) = word_on_basis(word, mask) {
                acc += self.amps[image].conj() * a * s;
            }
        }
        Ok(acc)
    }

    /// Parity class from the popcount of the supported bitmasks.
    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for (mask, a) in self.amps.iter().enumerate() {
            if a.norm() >= PARITY_TOL {
                if mask.count_ones() % 2 == 0 {
                    even = true;
                } else {
                    odd = true;
                }
            }
        }
        match (even, odd) {
            (true, true) => Parity::Mixed,
            (false, true) => Parity::Odd,
            _ => Parity::Even,
        }
    }

    /// Normalized state of definite parity, or the corresponding error.
    pub fn definite_parity(&self) -> Result<Parity> {
        self.ensure_normalized()?;
        match self.parity() {
            Parity::Mixed => Err(Error::MixedParity),
            p => Ok(p),
        }
    }

    /// `p_j = <c†_j c_j>`.
    pub fn occupation_probability(&self, mode: usize) -> Result<f64> {
        check_mode(self.n, mode)?;
        self.ensure_normalized()?;
        let bit = 1usize << mode;
        Ok(self.amps.iter().enumerate().filter(|(mask, _)| mask & bit != 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Split into the normalized components where `mode` is occupied and
    /// empty, with their weights. A component of zero weight is `None`.
    pub fn conditional_components(&self, mode: usize) -> Result<ConditionalComponents> {
        check_mode(self.n, mode)?;
        self.ensure_normalized()?;
        // c†_j c_j |psi> and c_j c†_j |psi>
        let occ = self.annihilate(mode)?.create(mode)?;
        let emp = self.create(mode)?.annihilate(mode)?;
        let p_occupied = occ.norm_sqr();
        let p_empty = emp.norm_sqr();
        let finish = |s: FockState, p: f64| if p > NORM_TOL { s.normalized().ok() } else { None };
        Ok(ConditionalComponents {
            occupied: finish(occ, p_occupied),
            empty: finish(emp, p_empty),
            p_occupied,
            p_empty,
        })
    }
}

impl Add for &FockState {
    type Output = FockState;
    fn add(self, rhs: &FockState) -> FockState {
        assert_eq!(self.n, rhs.n, "mode counts differ");
        FockState { n: self.n, amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &FockState {
    type Output = FockState;
    fn sub(self, rhs: &FockState) -> FockState {
        assert_eq!(self.n, rhs.n, "mode counts differ");
        FockState { n: self.n, amps: self.amps.iter().zip(&rhs.amps).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<C64> for &FockState {
    type Output = FockState;
    fn mul(self, z: C64) -> FockState {
        self.scaled(z)
    }
}

impl Mul<f64> for &FockState {
    type Output = FockState;
    fn mul(self, x: f64) -> FockState {
        self.scaled(C64::new(x, 0.0))
    }
}

/// Density matrix on the full `2^n`-dimensional Fock space.
///
/// Construction checks Hermiticity, unit trace and positivity. Commuting
/// with the number parity is checked separately by the routines that need
/// it, so that a parity-violating input can be reported as such.
#[derive(Clone, Debug)]
pub struct MixedState {
    n: usize,
    matrix: CMatrix,
}

impl MixedState {
    pub fn new(n: usize, matrix: CMatrix) -> Result<Self> {
        check_modes(n)?;
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension { expected: dim, got: matrix.nrows() });
        }
        let defect = hermiticity_defect(&matrix);
        if defect > DENSITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::Trace(tr.re));
        }
        let lowest = hermitian_eigenvalues(&matrix)[0];
        if lowest < -DENSITY_TOL {
            return Err(Error::NotPositive(lowest));
        }
        Ok(MixedState { n, matrix })
    }

    pub fn pure(state: &FockState) -> Result<Self> {
        state.ensure_normalized()?;
        let v = state.to_vector();
        Ok(MixedState { n: state.n(), matrix: &v * v.adjoint() })
    }

    /// `sum_i w_i |psi_i><psi_i|`; weights must be nonnegative and sum to 1.
    pub fn mixture(n: usize, parts: &[(f64, FockState)]) -> Result<Self> {
        check_modes(n)?;
        let dim = 1usize << n;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, s) in parts {
            if *w < 0.0 {
                return Err(Error::NotPositive(*w));
            }
            if s.n() != n {
                return Err(Error::Dimension { expected: n, got: s.n() });
            }
            let v = s.to_vector();
            m += (&v * v.adjoint()).scale(*w);
        }
        Self::new(n, m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `|| [rho, P] ||` entrywise maximum: the weight of coherences between
    /// the two parity sectors.
    pub fn parity_commutator_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if (i.count_ones() + j.count_ones()) % 2 == 1 {
                    worst = worst.max(2.0 * self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn ensure_parity_commuting(&self) -> Result<()> {
        let d = self.parity_commutator_defect();
        if d > DENSITY_TOL {
            Err(Error::ParityMixing(d))
        } else {
            Ok(())
        }
    }

    /// Probability of the even sector, `Tr rho (1 + P) / 2`.
    pub fn even_weight(&self) -> f64 {
        (0..self.dim()).filter(|m| m.count_ones() % 2 == 0).map(|m| self.matrix[(m, m)].re).sum()
    }

    /// Parity of the sector carrying all the weight, if there is one.
    pub fn sector(&self) -> Parity {
        let even = self.even_weight();
        if (even - 1.0).abs() < DENSITY_TOL {
            Parity::Even
        } else if even.abs() < DENSITY_TOL {
            Parity::Odd
        } else {
            Parity::Mixed
        }
    }

    /// `Tr(rho word)`.
    pub fn expectation_word(&self, word: &[(Ladder, usize)]) -> Result<C64> {
        for &(_, mode) in word {
            check_mode(self.n, mode)?;
        }
        let mut acc = ZERO;
        for mask in 0..self.dim() {
            if let Some((s, image)) = word_on_basis(word, mask) {
                // Tr(rho W) = sum_b <b| rho W |b> = sum_b s rho[b, image]
                acc += self.matrix[(mask, image)] * s;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Ladder::{Annihilate as A, Create as Cr};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn creation_on_vacuum() {
        let v = FockState::vacuum(4).unwrap();
        assert_eq!(v.create(0).unwrap(), FockState::basis(4, 0b0001).unwrap());
        assert!(v.create(0).unwrap().create(0).unwrap().is_zero());
    }

    #[test]
    fn creation_antisymmetry() {
        let v = FockState::vacuum(4).unwrap();
        let c1c2 = v.create(1).unwrap().create(0).unwrap();
        let c2c1 = v.create(0).unwrap().create(1).unwrap();
        assert_eq!(c1c2, &c2c1 * -1.0);
        assert_eq!(c1c2, FockState::basis(4, 0b0011).unwrap());
    }

    #[test]
    fn annihilation_examples() {
        let v = FockState::vacuum(4).unwrap();
        assert!(v.annihilate(0).unwrap().is_zero());
        assert_eq!(v.create(0).unwrap().annihilate(0).unwrap(), v);
        // c_2 (c†_1 c†_2 |0>) = -c†_1 |0>, worked by hand:
        // c_2 c†_1 c†_2 = -c†_1 c_2 c†_2 = -c†_1 (1 - c†_2 c_2), and c_2|0> = 0.
        let s = FockState::from_creations(4, &[0, 1]).unwrap();
        let out = s.annihilate(1).unwrap();
        assert_eq!(out, &v.create(0).unwrap() * -1.0);
    }

    #[test]
    fn mode_out_of_range() {
        let v = FockState::vacuum(3).unwrap();
        assert!(matches!(v.create(3), Err(Error::ModeOutOfRange { mode: 3, n: 3 })));
        assert!(matches!(FockState::vacuum(13), Err(Error::ModeCount(13))));
    }

    #[test]
    fn parity_classes() {
        let v = FockState::vacuum(4).unwrap();
        assert_eq!(v.parity(), Parity::Even);
        assert_eq!(FockState::from_creations(4, &[0, 1, 2]).unwrap().parity(), Parity::Odd);
        let mix = (&v + &v.create(0).unwrap()).normalized().unwrap();
        assert_eq!(mix.parity(), Parity::Mixed);
        assert!(matches!(mix.definite_parity(), Err(Error::MixedParity)));
    }

    #[test]
    fn occupation_examples() {
        let s = FockState::from_creations(4, &[0]).unwrap();
        assert_eq!(s.occupation_probability(0).unwrap(), 1.0);
        assert_eq!(s.occupation_probability(1).unwrap(), 0.0);
        let t = FockState::from_creations(4, &[1, 2, 3]).unwrap();
        let psi = (&s + &t).normalized().unwrap();
        assert!((psi.occupation_probability(0).unwrap() - 0.5).abs() < 1e-15);
        // Oracle: direct expectation of c†_1 c_1.
        let direct = psi.expectation_word(&[(Cr, 0), (A, 0)]).unwrap();
        assert!((direct - c(0.5)).norm() < 1e-15);
        let unnorm = &s * 2.0;
        assert!(matches!(unnorm.occupation_probability(0), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn conditional_examples() {
        let s = FockState::from_creations(4, &[0]).unwrap();
        let cc = s.conditional_components(0).unwrap();
        assert_eq!(cc.p_occupied, 1.0);
        assert_eq!(cc.occupied.unwrap(), s);
        assert_eq!(cc.p_empty, 0.0);
        assert!(cc.empty.is_none());

        // (c†_1|0> + c_1|0̄>)/sqrt2
        let full = FockState::filled(4).unwrap();
        let psi = (&s + &full.annihilate(0).unwrap()).normalized().unwrap();
        let cc = psi.conditional_components(0).unwrap();
        assert!((cc.p_occupied - 0.5).abs() < 1e-15);
        assert!((cc.occupied.unwrap().inner(&s) - c(1.0)).norm() < 1e-14);

        let s2 = FockState::from_creations(4, &[1]).unwrap();
        let psi = (&s + &s2).normalized().unwrap();
        let cc = psi.conditional_components(0).unwrap();
        assert!((cc.p_occupied - 0.5).abs() < 1e-15 && (cc.p_empty - 0.5).abs() < 1e-15);
        assert!((cc.empty.unwrap().inner(&s2) - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn anticommutation_exhaustive() {
        for n in 1..=6 {
            let dim = 1usize << n;
            for i in 0..n {
                for j in 0..n {
                    let a = word_matrix(n, &[(A, i), (Cr, j)]);
                    let b = word_matrix(n, &[(Cr, j), (A, i)]);
                    let expected = if i == j { CMatrix::identity(dim, dim) } else { CMatrix::zeros(dim, dim) };
                    assert_eq!(a + b, expected, "n={n} i={i} j={j}");
                    let aa = word_matrix(n, &[(A, i), (A, j)]) + word_matrix(n, &[(A, j), (A, i)]);
                    assert_eq!(aa, CMatrix::zeros(dim, dim));
                }
            }
        }
    }

    #[test]
    fn ladder_flips_parity_and_mean_vanishes() {
        let mut rng = crate::random::seeded(1, 0);
        for n in 1..=5 {
            for parity in [Parity::Even, Parity::Odd] {
                let psi = crate::random::random_state(n, parity, &mut rng);
                for j in 0..n {
                    let up = psi.create(j).unwrap();
                    if !up.is_zero() {
                        assert_eq!(up.parity(), parity.flipped());
                    }
                    assert!(psi.expectation_word(&[(A, j)]).unwrap().norm() < 1e-12);
                    assert!(psi.expectation_word(&[(Cr, j)]).unwrap().norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mixed_state_checks() {
        let v = FockState::vacuum(2).unwrap();
        let one = v.create(0).unwrap();
        let rho = MixedState::mixture(2, &[(0.5, v.clone()), (0.5, one.clone())]).unwrap();
        assert!(rho.ensure_parity_commuting().is_ok());
        assert_eq!(rho.sector(), Parity::Mixed);
        let sup = (&v + &one).normalized().unwrap();
        let rho = MixedState::pure(&sup).unwrap();
        assert!(matches!(rho.ensure_parity_commuting(), Err(Error::ParityMixing(_))));
        let bad = CMatrix::identity(4, 4);
        assert!(matches!(MixedState::new(2, bad), Err(Error::Trace(_))));
        let mut neg = CMatrix::zeros(4, 4);
        neg[(0, 0)] = c(1.5);
        neg[(1, 1)] = c(-0.5);
        assert!(matches!(MixedState::new(2, neg), Err(Error::NotPositive(_))));
    }

    #[test]
    fn mixed_expectation_matches_pure() {
        let mut rng = crate::random::seeded(2, 0);
        let psi = crate::random::random_state(3, Parity::Odd, &mut rng);
        let rho = MixedState::pure(&psi).unwrap();
        let w = [(Cr, 2), (A, 0)];
        let a = psi.expectation_word(&w).unwrap();
        let b = rho.expectation_word(&w).unwrap();
        assert!((a - b).norm() < 1e-13);
    }
}
