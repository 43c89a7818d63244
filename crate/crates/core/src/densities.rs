//! One-body density matrices and the entropy hierarchy built on them.
//!
//! For a state with definite parity:
//!
//! - `rho_sp[i][j] = <c†_j c_i>` (one-body density matrix),
//! - `kappa[i][j] = <c_j c_i>` (pairing tensor, antisymmetric),
//! - `rho_qsp = [[rho_sp, kappa], [-conj(kappa), 1 - conj(rho_sp)]]`.
//!
//! Eigenvalues of `rho_qsp` come in pairs `(f, 1 - f)`. All entropies use
//! base-2 logarithms.

use std::fmt;
use std::sync::Arc;

use crate::bogoliubov::BogoliubovMap;
use crate::error::{Error, Result};
use crate::fock::{FockState, Ladder, MixedState, DENSITY_TOL};
use crate::linalg::{frobenius, hermitian_eigenvalues, hermiticity_defect};
use crate::{binary_entropy, CMatrix};

use Ladder::{Annihilate, Create};

/// One-body density matrix `rho_sp[i][j] = <c†_j c_i>`.
#[derive(Clone, Debug)]
pub struct SpMatrix(CMatrix);

/// Pairing tensor `kappa[i][j] = <c_j c_i>`.
#[derive(Clone, Debug)]
pub struct PairingTensor(CMatrix);

impl SpMatrix {
    /// Wrap an `n x n` matrix after checking Hermiticity and that the
    /// spectrum lies in `[0, 1]` (both to 1e-10).
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = hermiticity_defect(&m);
        if defect > DENSITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let ev = hermitian_eigenvalues(&m);
        if ev.first().is_some_and(|&x| x < -DENSITY_TOL) || ev.last().is_some_and(|&x| x > 1.0 + DENSITY_TOL) {
            return Err(Error::Invariant(format!("one-body eigenvalues {ev:?} leave [0, 1]")));
        }
        Ok(SpMatrix(m))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    /// Natural occupations, descending and clipped to `[0, 1]`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_eigenvalues(&self.0).into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
        ev.reverse();
        ev
    }

    /// `S_sp = tr h(rho_sp)`.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues().into_iter().map(binary_entropy).sum()
    }

    /// Diagonal occupations `p_j` in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.0[(j, j)].re).collect()
    }
}

impl PairingTensor {
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = frobenius(&(&m + m.transpose()));
        if defect > DENSITY_TOL {
            return Err(Error::Invariant(format!("pairing tensor not antisymmetric ({defect:e})")));
        }
        Ok(PairingTensor(m))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Generalized one-body density matrix of size `2n x 2n`.
#[derive(Clone, Debug)]
pub struct QspMatrix {
    n: usize,
    m: CMatrix,
}

impl QspMatrix {
    /// Assemble `[[rho, kappa], [-conj(kappa), 1 - conj(rho)]]` and validate.
    pub fn from_blocks(sp: &SpMatrix, kappa: &PairingTensor) -> Result<Self> {
        let n = sp.n();
        if kappa.0.nrows() != n {
            return Err(Error::Dimension { expected: n, got: kappa.0.nrows() });
        }
        let id = CMatrix::identity(n, n);
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&sp.0);
        m.view_mut((0, n), (n, n)).copy_from(&kappa.0);
        m.view_mut((n, 0), (n, n)).copy_from(&(-kappa.0.conjugate()));
        m.view_mut((n, n), (n, n)).copy_from(&(id - sp.0.conjugate()));
        Self::from_matrix(m)
    }

    /// Validate a full `2n x 2n` matrix: Hermitian, spectrum in `[0, 1]` and
    /// closed under `x -> 1 - x`, all to 1e-10.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if !m.nrows().is_multiple_of(2) || m.nrows() != m.ncols() {
            return Err(Error::Dimension { expected: 2 * (m.nrows() / 2), got: m.nrows() });
        }
        let n = m.nrows() / 2;
        let defect = hermiticity_defect(&m);
        if defect > DENSITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let q = QspMatrix { n, m };
        let ev = hermitian_eigenvalues(&q.m);
        if ev[0] < -DENSITY_TOL || ev[2 * n - 1] > 1.0 + DENSITY_TOL {
            return Err(Error::Invariant(format!("generalized density eigenvalues {ev:?} leave [0, 1]")));
        }
        let pairing = q.pairing_defect_of(&ev);
        if pairing > 1e-9 {
            return Err(Error::Invariant(format!("generalized density spectrum not paired ({pairing:e})")));
        }
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn sp_block(&self) -> CMatrix {
        self.m.view((0, 0), (self.n, self.n)).into_owned()
    }

    pub fn kappa_block(&self) -> CMatrix {
        self.m.view((0, self.n), (self.n, self.n)).into_owned()
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = hermitian_eigenvalues(&self.m);
        ev.reverse();
        ev
    }

    fn pairing_defect_of(&self, ascending: &[f64]) -> f64 {
        let k = ascending.len();
        (0..k).map(|i| (ascending[i] + ascending[k - 1 - i] - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max_k |lambda_k + lambda_{2n+1-k} - 1|` over the sorted spectrum.
    pub fn pairing_defect(&self) -> f64 {
        self.pairing_defect_of(&hermitian_eigenvalues(&self.m))
    }

    /// Quasiparticle occupations `f_nu`: the lower member of each eigenvalue
    /// pair, symmetrized over the pair, sorted descending.
    pub fn paired_occupations(&self) -> Vec<f64> {
        let ev = hermitian_eigenvalues(&self.m);
        let k = ev.len();
        let mut f: Vec<f64> = (0..self.n).map(|i| ((ev[i] + 1.0 - ev[k - 1 - i]) / 2.0).clamp(0.0, 0.5)).collect();
        f.sort_by(|a, b| b.total_cmp(a));
        f
    }

    /// `S_qsp = sum_nu h(f_nu)`.
    pub fn entropy(&self) -> f64 {
        self.paired_occupations().into_iter().map(binary_entropy).sum()
    }

    /// Quadratic entropy from the trace formula
    /// `4 tr[rho (1 - rho) - kappa† kappa]`.
    pub fn quadratic_entropy(&self) -> f64 {
        let rho = self.sp_block();
        let kappa = self.kappa_block();
        let id = CMatrix::identity(self.n, self.n);
        let t = (&rho * (id - &rho) - kappa.adjoint() * &kappa).trace();
        4.0 * t.re
    }

    /// Quadratic entropy from the spectrum, `4 sum_nu f_nu (1 - f_nu)`.
    pub fn quadratic_entropy_spectral(&self) -> f64 {
        4.0 * self.paired_occupations().into_iter().map(|f| f * (1.0 - f)).sum::<f64>()
    }

    /// Occupations `<a†_nu a_nu>` in the quasiparticle basis of `map`,
    /// read off the diagonal of `W† rho_qsp W`.
    pub fn occupations_in(&self, map: &BogoliubovMap) -> Result<Vec<f64>> {
        if map.n() != self.n {
            return Err(Error::Dimension { expected: self.n, got: map.n() });
        }
        let w = map.w_matrix();
        let rotated = w.adjoint() * &self.m * w;
        Ok((0..self.n).map(|k| rotated[(k, k)].re).collect())
    }
}

fn check_state(state: &FockState) -> Result<()> {
    state.definite_parity().map(|_| ())
}

/// `rho_sp` of a normalized definite-parity state.
pub fn sp_matrix(state: &FockState) -> Result<SpMatrix> {
    check_state(state)?;
    let n = state.n();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = state.expectation_word(&[(Create, j), (Annihilate, i)])?;
        }
    }
    SpMatrix::new(m)
}

/// `kappa` of a normalized definite-parity state.
pub fn pairing_tensor(state: &FockState) -> Result<PairingTensor> {
    check_state(state)?;
    let n = state.n();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = state.expectation_word(&[(Annihilate, j), (Annihilate, i)])?;
        }
    }
    PairingTensor::new(m)
}

pub fn qsp_matrix(state: &FockState) -> Result<QspMatrix> {
    QspMatrix::from_blocks(&sp_matrix(state)?, &pairing_tensor(state)?)
}

pub fn sp_matrix_mixed(rho: &MixedState) -> Result<SpMatrix> {
    rho.ensure_parity_commuting()?;
    let n = rho.n();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = rho.expectation_word(&[(Create, j), (Annihilate, i)])?;
        }
    }
    SpMatrix::new(m)
}

pub fn pairing_tensor_mixed(rho: &MixedState) -> Result<PairingTensor> {
    rho.ensure_parity_commuting()?;
    let n = rho.n();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = rho.expectation_word(&[(Annihilate, j), (Annihilate, i)])?;
        }
    }
    PairingTensor::new(m)
}

pub fn qsp_matrix_mixed(rho: &MixedState) -> Result<QspMatrix> {
    QspMatrix::from_blocks(&sp_matrix_mixed(rho)?, &pairing_tensor_mixed(rho)?)
}

/// Basis entropy `S_c = sum_j h(p_j)`, in the computational basis or in the
/// quasiparticle basis of `basis`.
pub fn entropy_sc(state: &FockState, basis: Option<&BogoliubovMap>) -> Result<f64> {
    let q = qsp_matrix(state)?;
    let p = match basis {
        None => sp_matrix(state)?.diagonal(),
        Some(map) => q.occupations_in(map)?,
    };
    Ok(p.into_iter().map(binary_entropy).sum())
}

/// `S_sp = tr h(rho_sp)`, the minimum of `S_c` over single-particle bases.
pub fn entropy_sp(state: &FockState) -> Result<f64> {
    Ok(sp_matrix(state)?.entropy())
}

/// `S_qsp`, the minimum of `S_c` over quasiparticle bases.
pub fn entropy_qsp(state: &FockState) -> Result<f64> {
    Ok(qsp_matrix(state)?.entropy())
}

/// Quadratic entropy `S_2(rho_qsp)`; the trace and spectral formulas are
/// both evaluated and must agree to 1e-10.
pub fn entropy_quadratic(state: &FockState) -> Result<f64> {
    let q = qsp_matrix(state)?;
    let trace = q.quadratic_entropy();
    let spectral = q.quadratic_entropy_spectral();
    if (trace - spectral).abs() > 1e-10 {
        return Err(Error::Invariant(format!("quadratic entropy mismatch: {trace} vs {spectral}")));
    }
    Ok(trace)
}

/// Concave `f: [0, 1] -> R` with `f(0) = f(1) = 0`, used for `S_f = tr f`.
#[derive(Clone)]
pub enum EntropyFunction {
    /// Binary entropy `h(p)`.
    VonNeumann,
    /// `2 p (1 - p)`.
    Quadratic,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for EntropyFunction {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyFunction::VonNeumann => write!(fm, "VonNeumann"),
            EntropyFunction::Quadratic => write!(fm, "Quadratic"),
            EntropyFunction::Custom { name, .. } => write!(fm, "Custom({name})"),
        }
    }
}

impl EntropyFunction {
    /// Wrap a callable. Only the endpoint conditions are checked; concavity
    /// is the caller's responsibility.
    pub fn custom<F>(name: &str, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (a, b) = (f(0.0), f(1.0));
        if a.abs() > 1e-12 || b.abs() > 1e-12 {
            return Err(Error::EntropyFunction(format!("{name}: f(0) = {a}, f(1) = {b}, expected 0")));
        }
        Ok(EntropyFunction::Custom { name: name.to_string(), f: Arc::new(f) })
    }

    pub fn eval(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            EntropyFunction::VonNeumann => binary_entropy(p),
            EntropyFunction::Quadratic => 2.0 * p * (1.0 - p),
            EntropyFunction::Custom { f, .. } => f(p),
        }
    }

    pub fn trace(&self, spectrum: &[f64]) -> f64 {
        spectrum.iter().map(|&p| self.eval(p)).sum()
    }
}

/// Which extended matrix `S_f` is evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Diagonal of `diag(rho_sp, 1 - rho_sp)`.
    Diagonal,
    /// `diag(rho_sp, 1 - rho_sp)`.
    Sp,
    /// `rho_qsp`.
    Qsp,
}

/// Spectrum (descending) of the matrix selected by `variant`.
pub fn extended_spectrum(q: &QspMatrix, variant: Variant) -> Vec<f64> {
    let mut s: Vec<f64> = match variant {
        Variant::Diagonal => {
            let d: Vec<f64> = (0..q.n).map(|j| q.m[(j, j)].re).collect();
            d.iter().copied().chain(d.iter().map(|p| 1.0 - p)).collect()
        }
        Variant::Sp => {
            let ev = hermitian_eigenvalues(&q.sp_block());
            ev.iter().copied().chain(ev.iter().map(|p| 1.0 - p)).collect()
        }
        Variant::Qsp => hermitian_eigenvalues(&q.m),
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Generalized entropy `S_f` of the selected extended matrix.
pub fn entropy_generalized(q: &QspMatrix, f: &EntropyFunction, variant: Variant) -> f64 {
    f.trace(&extended_spectrum(q, variant))
}

#[derive(Clone, Debug)]
pub struct MajorizationReport {
    pub holds: bool,
    /// Prefix sums of the descending spectra of the diagonal, `sp` and `qsp`
    /// extended matrices, in that order.
    pub partial_sums: [Vec<f64>; 3],
    /// Smallest `later - earlier` prefix-sum difference over both links.
    pub min_slack: f64,
}

/// Check `diag ≺ sp ≺ qsp` by prefix sums, tolerance 1e-10.
pub fn majorization_chain(q: &QspMatrix) -> MajorizationReport {
    let prefix = |v: Vec<f64>| -> Vec<f64> {
        v.iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    };
    let d = prefix(extended_spectrum(q, Variant::Diagonal));
    let s = prefix(extended_spectrum(q, Variant::Sp));
    let g = prefix(extended_spectrum(q, Variant::Qsp));
    let mut slack = f64::INFINITY;
    for k in 0..d.len() - 1 {
        slack = slack.min(s[k] - d[k]).min(g[k] - s[k]);
    }
    MajorizationReport { holds: slack >= -1e-10, partial_sums: [d, s, g], min_slack: slack }
}

/// Sum of `h` over a list of occupations.
pub fn entropy_of_occupations(p: &[f64]) -> f64 {
    p.iter().map(|&x| binary_entropy(x)).sum()
}
