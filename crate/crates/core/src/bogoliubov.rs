//! Canonical quasiparticle (Bogoliubov) transformations.
//!
//! A map is the pair `(U, V)` defining
//! `a_nu = sum_j conj(U[j][nu]) c_j + V[j][nu] c†_j`, i.e.
//! `(a; a†) = W† (c; c†)` with `W = [[U, V], [conj(V), conj(U)]]` unitary.
//!
//! Internally the structured diagonalization works in the Majorana basis,
//! where every valid `W` becomes a real orthogonal matrix
//! `O = Omega† W Omega` and the generalized density matrix becomes a real
//! antisymmetric matrix.

use nalgebra::{DMatrix, DVector};

use crate::densities::{qsp_matrix, QspMatrix};
use crate::error::{Error, Result};
use crate::fock::{word_matrix, FockState, Ladder, MixedState};
use crate::linalg::{frobenius, hermiticity_defect, unitary_exp, HermitianEigen};
use crate::random::{random_antisymmetric, random_hermitian, Rng};
use crate::{CMatrix, C64};

/// Tolerance on `UU† + VV† = 1` and `UV^T + VU^T = 0`.
pub const MAP_TOL: f64 = 1e-10;
/// Smallest `|det U|` for which the Thouless form is used.
pub const THOULESS_DET_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct BogoliubovMap {
    u: CMatrix,
    v: CMatrix,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest violation of the two canonical conditions.
pub fn canonical_defect(u: &CMatrix, v: &CMatrix) -> f64 {
    let n = u.nrows();
    let a = u * u.adjoint() + v * v.adjoint() - CMatrix::identity(n, n);
    let b = u * v.transpose() + v * u.transpose();
    max_abs(&a).max(max_abs(&b))
}

/// `true` when `(U, V)` defines a canonical transformation (to 1e-10).
pub fn validate(u: &CMatrix, v: &CMatrix) -> bool {
    u.nrows() == u.ncols() && u.shape() == v.shape() && canonical_defect(u, v) <= MAP_TOL
}

/// Unitary change of basis to normalized Majorana operators,
/// `(c; c†) = Omega (w_x; w_y)` with `c = (w_x + i w_y) / sqrt 2`.
pub fn majorana_basis(n: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(j, j)] = C64::new(s, 0.0);
        m[(j, n + j)] = C64::new(0.0, s);
        m[(n + j, j)] = C64::new(s, 0.0);
        m[(n + j, n + j)] = C64::new(0.0, -s);
    }
    m
}

impl BogoliubovMap {
    pub fn new(u: CMatrix, v: CMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() || u.shape() != v.shape() {
            return Err(Error::InvalidMap(format!("block shapes {:?} and {:?}", u.shape(), v.shape())));
        }
        let defect = canonical_defect(&u, &v);
        if defect > MAP_TOL {
            return Err(Error::InvalidMap(format!("canonical conditions violated by {defect:e}")));
        }
        Ok(BogoliubovMap { u, v })
    }

    pub fn identity(n: usize) -> Self {
        BogoliubovMap { u: CMatrix::identity(n, n), v: CMatrix::zeros(n, n) }
    }

    /// Particle-hole exchange `c_j <-> c†_j` on the listed modes.
    pub fn particle_hole(n: usize, modes: &[usize]) -> Result<Self> {
        let mut u = CMatrix::identity(n, n);
        let mut v = CMatrix::zeros(n, n);
        for &j in modes {
            if j >= n {
                return Err(Error::ModeOutOfRange { mode: j, n });
            }
            u[(j, j)] = C64::new(0.0, 0.0);
            v[(j, j)] = C64::new(1.0, 0.0);
        }
        Self::new(u, v)
    }

    /// Extract `(U, V)` from a `2n x 2n` matrix of the structured form.
    pub fn from_w(w: &CMatrix) -> Result<Self> {
        let n = w.nrows() / 2;
        let u = w.view((0, 0), (n, n)).into_owned();
        let v = w.view((0, n), (n, n)).into_owned();
        let lower = w.view((n, 0), (n, 2 * n)).into_owned();
        let mut expected = CMatrix::zeros(n, 2 * n);
        expected.view_mut((0, 0), (n, n)).copy_from(&v.conjugate());
        expected.view_mut((0, n), (n, n)).copy_from(&u.conjugate());
        let defect = max_abs(&(lower - expected));
        if defect > MAP_TOL {
            return Err(Error::InvalidMap(format!("lower blocks are not conj(V), conj(U) ({defect:e})")));
        }
        Self::new(u, v)
    }

    /// `W = exp(-i angle O)` for a Hermitian quadratic generator.
    pub fn from_generator(op: &QuadraticOperator, angle: f64) -> Result<Self> {
        Self::from_w(&unitary_exp(&op.matrix(), angle))
    }

    /// Random map `exp(-i O)` with Gaussian generator entries.
    pub fn random(n: usize, rng: &mut Rng) -> Self {
        Self::from_generator(&QuadraticOperator::random(n, rng), 1.0)
            .expect("exponential of a structured Hermitian generator is canonical")
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn defect(&self) -> f64 {
        canonical_defect(&self.u, &self.v)
    }

    pub fn w_matrix(&self) -> CMatrix {
        let n = self.n();
        let mut w = CMatrix::zeros(2 * n, 2 * n);
        w.view_mut((0, 0), (n, n)).copy_from(&self.u);
        w.view_mut((0, n), (n, n)).copy_from(&self.v);
        w.view_mut((n, 0), (n, n)).copy_from(&self.v.conjugate());
        w.view_mut((n, n), (n, n)).copy_from(&self.u.conjugate());
        w
    }

    /// Real orthogonal matrix of the map in the Majorana basis.
    pub fn majorana_orthogonal(&self) -> DMatrix<f64> {
        let om = majorana_basis(self.n());
        (om.adjoint() * self.w_matrix() * om).map(|z| z.re)
    }

    /// Inverse of [`majorana_orthogonal`](Self::majorana_orthogonal).
    pub fn from_majorana_orthogonal(o: &DMatrix<f64>) -> Result<Self> {
        let n = o.nrows() / 2;
        let om = majorana_basis(n);
        let oc = o.map(|x| C64::new(x, 0.0));
        Self::from_w(&(&om * oc * om.adjoint()))
    }

    /// `outer ∘ inner`: applying `inner` then `outer` to a state equals
    /// applying the composition, `W = W_outer W_inner`.
    pub fn compose(outer: &BogoliubovMap, inner: &BogoliubovMap) -> Result<Self> {
        Self::from_w(&(outer.w_matrix() * inner.w_matrix()))
    }

    pub fn determinant_u(&self) -> f64 {
        self.u.determinant().norm()
    }

    /// Fock-space matrix of `a_nu`.
    pub fn annihilator_matrix(&self, nu: usize) -> CMatrix {
        let n = self.n();
        let mut m = CMatrix::zeros(1 << n, 1 << n);
        for j in 0..n {
            let cu = self.u[(j, nu)].conj();
            if cu != C64::new(0.0, 0.0) {
                m += word_matrix(n, &[(Ladder::Annihilate, j)]).scale(1.0) * cu;
            }
            let cv = self.v[(j, nu)];
            if cv != C64::new(0.0, 0.0) {
                m += word_matrix(n, &[(Ladder::Create, j)]) * cv;
            }
        }
        m
    }

    /// Fock-space matrices of all `a_nu`.
    pub fn annihilators(&self) -> Vec<CMatrix> {
        (0..self.n()).map(|nu| self.annihilator_matrix(nu)).collect()
    }
}

/// Hermitian quadratic operator
/// `O = sum o11_ij c†_i c_j + (o20_ij c_i c_j + o02_ij c†_i c†_j) / 2 - tr(o11) / 2`
/// with `o02 = o20†`, so that `O = (c†, c) M (c; c†) / 2` with
/// `M = [[o11, o02], [o20, -o11^T]]` Hermitian.
#[derive(Clone, Debug)]
pub struct QuadraticOperator {
    o11: CMatrix,
    o20: CMatrix,
}

impl QuadraticOperator {
    pub fn new(o11: CMatrix, o20: CMatrix) -> Result<Self> {
        let h = hermiticity_defect(&o11);
        if h > MAP_TOL {
            return Err(Error::NotHermitian(h));
        }
        let a = frobenius(&(&o20 + o20.transpose()));
        if a > MAP_TOL {
            return Err(Error::Invariant(format!("o20 is not antisymmetric ({a:e})")));
        }
        Ok(QuadraticOperator { o11, o20 })
    }

    /// Number-conserving generator `sum o_ij c†_i c_j - tr(o) / 2`.
    pub fn one_body(o11: CMatrix) -> Result<Self> {
        let n = o11.nrows();
        Self::new(o11, CMatrix::zeros(n, n))
    }

    /// Split a Hermitian `2n x 2n` matrix of the structured form.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        let n = m.nrows() / 2;
        let op = Self::new(m.view((0, 0), (n, n)).into_owned(), m.view((n, 0), (n, n)).into_owned())?;
        let defect = frobenius(&(op.matrix() - m));
        if defect > MAP_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(op)
    }

    pub fn random(n: usize, rng: &mut Rng) -> Self {
        QuadraticOperator { o11: random_hermitian(n, rng), o20: random_antisymmetric(n, rng) }
    }

    pub fn n(&self) -> usize {
        self.o11.nrows()
    }

    pub fn o11(&self) -> &CMatrix {
        &self.o11
    }

    pub fn o20(&self) -> &CMatrix {
        &self.o20
    }

    pub fn o02(&self) -> CMatrix {
        self.o20.adjoint()
    }

    pub fn matrix(&self) -> CMatrix {
        let n = self.n();
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.o11);
        m.view_mut((0, n), (n, n)).copy_from(&self.o02());
        m.view_mut((n, 0), (n, n)).copy_from(&self.o20);
        m.view_mut((n, n), (n, n)).copy_from(&(-self.o11.transpose()));
        m
    }

    /// Fock-space matrix of the operator.
    pub fn fock_matrix(&self) -> CMatrix {
        use Ladder::{Annihilate as A, Create as Cr};
        let n = self.n();
        let dim = 1usize << n;
        let o02 = self.o02();
        let mut m = CMatrix::identity(dim, dim) * (-self.o11.trace() * 0.5);
        for i in 0..n {
            for j in 0..n {
                if self.o11[(i, j)].norm() > 0.0 {
                    m += word_matrix(n, &[(Cr, i), (A, j)]) * self.o11[(i, j)];
                }
                if self.o20[(i, j)].norm() > 0.0 {
                    m += word_matrix(n, &[(A, i), (A, j)]) * (self.o20[(i, j)] * 0.5);
                }
                if o02[(i, j)].norm() > 0.0 {
                    m += word_matrix(n, &[(Cr, i), (Cr, j)]) * (o02[(i, j)] * 0.5);
                }
            }
        }
        m
    }
}

/// `<O>` from the generalized density matrix, `tr'(rho_qsp M) / 2`.
pub fn quadratic_expectation_from_qsp(q: &QspMatrix, op: &QuadraticOperator) -> C64 {
    (q.matrix() * op.matrix()).trace() * 0.5
}

/// `<psi|O|psi>`, evaluated both as a Fock-space matrix element and through
/// `rho_qsp`; the two must agree to 1e-10.
pub fn quadratic_expectation(state: &FockState, op: &QuadraticOperator) -> Result<f64> {
    if op.n() != state.n() {
        return Err(Error::Dimension { expected: state.n(), got: op.n() });
    }
    let via_qsp = quadratic_expectation_from_qsp(&qsp_matrix(state)?, op);
    let v = state.to_vector();
    let direct = (v.adjoint() * op.fock_matrix() * &v)[(0, 0)];
    if (direct - via_qsp).norm() > 1e-10 {
        return Err(Error::Invariant(format!("<O> mismatch: Fock {direct} vs trace {via_qsp}")));
    }
    Ok(via_qsp.re)
}

pub fn quadratic_expectation_mixed(rho: &MixedState, op: &QuadraticOperator) -> Result<f64> {
    if op.n() != rho.n() {
        return Err(Error::Dimension { expected: rho.n(), got: op.n() });
    }
    let via_qsp = quadratic_expectation_from_qsp(&crate::densities::qsp_matrix_mixed(rho)?, op);
    let direct = (rho.matrix() * op.fock_matrix()).trace();
    if (direct - via_qsp).norm() > 1e-10 {
        return Err(Error::Invariant(format!("<O> mismatch: Fock {direct} vs trace {via_qsp}")));
    }
    Ok(via_qsp.re)
}

/// `exp(-i angle O) |psi>` by exact exponentiation on the Fock space.
pub fn apply_to_state(state: &FockState, op: &QuadraticOperator, angle: f64) -> Result<FockState> {
    if op.n() != state.n() {
        return Err(Error::Dimension { expected: state.n(), got: op.n() });
    }
    state.apply_matrix(&unitary_exp(&op.fock_matrix(), angle))
}

/// `gamma exp(sum_{i<j} T_ij c†_i c†_j) |0>` with `T = V conj(U)^{-1}`,
/// normalized and phase fixed (largest amplitude real positive).
///
/// The result is checked to be annihilated by every `a_nu` to 1e-9.
pub fn thouless_vacuum(map: &BogoliubovMap) -> Result<FockState> {
    let n = map.n();
    let det = map.determinant_u();
    if det <= THOULESS_DET_TOL {
        return Err(Error::SingularU(det));
    }
    let ubar_inv = map.u.conjugate().try_inverse().ok_or(Error::SingularU(det))?;
    let t = &map.v * ubar_inv;
    // Pair creation operator sum_{i<j} T_ij c†_i c†_j.
    let mut pair = CMatrix::zeros(1 << n, 1 << n);
    for i in 0..n {
        for j in i + 1..n {
            pair += word_matrix(n, &[(Ladder::Create, i), (Ladder::Create, j)]) * t[(i, j)];
        }
    }
    // exp(pair)|0> terminates after n/2 + 1 terms.
    let vac = FockState::vacuum(n)?.to_vector();
    let mut term = vac.clone();
    let mut acc = vac;
    for k in 1..=n / 2 {
        term = &pair * term / C64::new(k as f64, 0.0);
        acc += &term;
    }
    let state = FockState::from_vector(n, &acc)?.normalized()?.phase_fixed();
    let residual = annihilation_residual(map, &state);
    if residual > 1e-9 {
        return Err(Error::Invariant(format!("Thouless state not annihilated by a_nu ({residual:e})")));
    }
    Ok(state)
}

/// Vacuum of the quasiparticle operators for any valid map: the null vector
/// of `sum_nu a†_nu a_nu`. Used when `U` is singular.
pub fn quasiparticle_vacuum(map: &BogoliubovMap) -> Result<FockState> {
    if map.determinant_u() > THOULESS_DET_TOL {
        return thouless_vacuum(map);
    }
    let n = map.n();
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    for a in map.annihilators() {
        h += a.adjoint() * &a;
    }
    let eig = HermitianEigen::new(&h);
    let v = eig.vectors.column(0).into_owned();
    let state = FockState::from_vector(n, &v)?.normalized()?.phase_fixed();
    let residual = annihilation_residual(map, &state);
    if residual > 1e-9 {
        return Err(Error::Invariant(format!("quasiparticle vacuum residual {residual:e}")));
    }
    Ok(state)
}

/// `max_nu || a_nu |psi> ||`.
pub fn annihilation_residual(map: &BogoliubovMap, state: &FockState) -> f64 {
    let v = state.to_vector();
    map.annihilators().iter().map(|a| (a * &v).norm()).fold(0.0, f64::max)
}

/// Unitary on the Fock space whose column `b` is
/// `a†_{b1} ... a†_{bm} |0_a>` (ascending `b1 < ... < bm`).
pub fn quasiparticle_basis(map: &BogoliubovMap) -> Result<CMatrix> {
    let n = map.n();
    let dim = 1usize << n;
    let vac = quasiparticle_vacuum(map)?.to_vector();
    let creators: Vec<CMatrix> = map.annihilators().iter().map(|a| a.adjoint()).collect();
    let mut basis = CMatrix::zeros(dim, dim);
    for mask in 0..dim {
        let mut v = vac.clone();
        for j in (0..n).rev() {
            if mask & (1 << j) != 0 {
                v = &creators[j] * v;
            }
        }
        basis.set_column(mask, &v);
    }
    Ok(basis)
}

/// Many-body action of a map: the state with the same amplitudes in the
/// quasiparticle basis, `sum_b psi_b a†_{b1} ... a†_{bm} |0_a>`. Its
/// generalized density matrix is `W rho_qsp W†`.
pub fn apply_map(state: &FockState, map: &BogoliubovMap) -> Result<FockState> {
    let n = state.n();
    if map.n() != n {
        return Err(Error::Dimension { expected: n, got: map.n() });
    }
    FockState::from_vector(n, &(quasiparticle_basis(map)? * state.to_vector()))
}

/// Inverse of [`apply_map`]: amplitudes of `state` in the quasiparticle
/// occupation basis of `map`.
pub fn quasiparticle_amplitudes(state: &FockState, map: &BogoliubovMap) -> Result<FockState> {
    let n = state.n();
    if map.n() != n {
        return Err(Error::Dimension { expected: n, got: map.n() });
    }
    FockState::from_vector(n, &(quasiparticle_basis(map)?.adjoint() * state.to_vector()))
}

/// Particle-hole exchange `c_j <-> c†_j` on `modes`, with the new vacuum
/// `prod_{j in modes} c†_j |0>`: each basis product of creators is
/// re-evaluated with `c_j` in place of `c†_j` for the exchanged modes.
pub fn particle_hole(state: &FockState, modes: &[usize]) -> Result<FockState> {
    let n = state.n();
    let mut flip = 0usize;
    for &j in modes {
        if j >= n {
            return Err(Error::ModeOutOfRange { mode: j, n });
        }
        flip |= 1 << j;
    }
    let mut out = vec![C64::new(0.0, 0.0); state.dim()];
    for (mask, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm() == 0.0 {
            continue;
        }
        let word: Vec<(Ladder, usize)> = (0..n)
            .filter(|j| mask & (1 << j) != 0)
            .map(|j| if flip & (1 << j) != 0 { (Ladder::Annihilate, j) } else { (Ladder::Create, j) })
            .collect();
        if let Some((s, image)) = crate::fock::word_on_basis(&word, flip) {
            out[image] += amp * s;
        }
    }
    FockState::from_amplitudes(n, out)
}

/// Result of the structured diagonalization of `rho_qsp`.
#[derive(Clone, Debug)]
pub struct QspDiagonalization {
    pub map: BogoliubovMap,
    /// Quasiparticle occupations `<a†_nu a_nu>`, each in `[0, 1/2]`, sorted
    /// descending.
    pub occupations: Vec<f64>,
}

/// Find `W` with `W† rho_qsp W = diag(f, 1 - f)`.
///
/// `f` takes the lower member of each eigenvalue pair, so a quasiparticle
/// vacuum has `f = 0`. Among maps with this property one with
/// `det U != 0` is returned when the half-filled modes allow it.
pub fn diagonalize_qsp(q: &QspMatrix) -> Result<QspDiagonalization> {
    let n = q.n();
    let om = majorana_basis(n);
    let shifted = q.matrix() - CMatrix::identity(2 * n, 2 * n).scale(0.5);
    let g_complex = (om.adjoint() * shifted * &om) * C64::new(0.0, 2.0);
    let g_real = g_complex.map(|z| z.re);
    let gamma = (&g_real - g_real.transpose()) * 0.5;

    // i Gamma is Hermitian with spectrum +-lambda.
    let h = gamma.map(|x| C64::new(0.0, x));
    let eig = HermitianEigen::new(&h);
    let zero_tol = 1e-10;

    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
    let mut kernel_raw: Vec<DVector<f64>> = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        if lam > zero_tol {
            let x = v.map(|z| z.re * std::f64::consts::SQRT_2);
            let y = v.map(|z| -z.im * std::f64::consts::SQRT_2);
            pairs.push((lam, x, y));
        } else if lam >= -zero_tol {
            kernel_raw.push(v.map(|z| z.re));
            kernel_raw.push(v.map(|z| z.im));
        }
    }
    // Real orthonormal basis of the kernel, paired arbitrarily.
    let mut kernel: Vec<DVector<f64>> = Vec::new();
    for mut v in kernel_raw {
        for _ in 0..2 {
            for u in kernel.iter().chain(pairs.iter().flat_map(|(_, x, y)| [x, y])) {
                let p = u.dot(&v);
                v -= u * p;
            }
        }
        let nv = v.norm();
        if nv > 1e-6 {
            kernel.push(v / nv);
        }
    }
    if !kernel.len().is_multiple_of(2) || pairs.len() + kernel.len() / 2 != n {
        return Err(Error::Invariant(format!(
            "structured diagonalization found {} paired and {} kernel directions for n = {n}",
            pairs.len(),
            kernel.len()
        )));
    }
    let mut modes: Vec<(f64, DVector<f64>, DVector<f64>)> =
        kernel.chunks(2).map(|c| (0.0, c[0].clone(), c[1].clone())).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half_filled = modes.len();
    modes.extend(pairs);

    let build = |modes: &[(f64, DVector<f64>, DVector<f64>)]| -> Result<BogoliubovMap> {
        let mut o = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for (nu, (_, x, y)) in modes.iter().enumerate() {
            o.set_column(nu, x);
            o.set_column(n + nu, y);
        }
        BogoliubovMap::from_majorana_orthogonal(&o)
    };
    let mut map = build(&modes)?;
    // Prefer det U != 0: exchanging a_nu and a†_nu for a half-filled mode
    // flips the parity of the quasiparticle vacuum.
    let mut flip = 0;
    while map.determinant_u() <= THOULESS_DET_TOL && flip < half_filled {
        modes[flip].2 *= -1.0;
        let candidate = build(&modes)?;
        if candidate.determinant_u() > map.determinant_u() {
            map = candidate;
        } else {
            modes[flip].2 *= -1.0;
        }
        flip += 1;
    }

    let occupations: Vec<f64> = modes.iter().map(|(lam, _, _)| ((1.0 - lam) / 2.0).clamp(0.0, 0.5)).collect();
    let w = map.w_matrix();
    let rotated = w.adjoint() * q.matrix() * &w;
    let mut target = CMatrix::zeros(2 * n, 2 * n);
    for (nu, f) in occupations.iter().enumerate() {
        target[(nu, nu)] = C64::new(*f, 0.0);
        target[(n + nu, n + nu)] = C64::new(1.0 - f, 0.0);
    }
    let defect = max_abs(&(rotated - target));
    if defect > 1e-9 {
        return Err(Error::Invariant(format!("W† rho_qsp W deviates from diag(f, 1 - f) by {defect:e}")));
    }
    Ok(QspDiagonalization { map, occupations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{entropy_of_occupations, entropy_qsp, entropy_sp, sp_matrix};
    use crate::fock::Parity;
    use crate::random::{random_state, seeded};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn validation_examples() {
        let id = CMatrix::identity(4, 4);
        let z = CMatrix::zeros(4, 4);
        assert!(validate(&id, &z));
        assert!(validate(&z, &id));
        assert!(!validate(&id, &id));
        assert!(BogoliubovMap::new(id.clone(), id).is_err());
    }

    #[test]
    fn random_maps_are_canonical_on_fock_space() {
        let mut rng = seeded(21, 0);
        for n in 1..=5 {
            let map = BogoliubovMap::random(n, &mut rng);
            assert!(map.defect() < 1e-10);
            let a = map.annihilators();
            let dim = 1usize << n;
            for i in 0..n {
                for j in 0..n {
                    let ac = &a[i] * a[j].adjoint() + a[j].adjoint() * &a[i];
                    let expected = if i == j { CMatrix::identity(dim, dim) } else { CMatrix::zeros(dim, dim) };
                    assert!(frobenius(&(ac - expected)) < 1e-9);
                    let aa = &a[i] * &a[j] + &a[j] * &a[i];
                    assert!(frobenius(&aa) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn majorana_round_trip() {
        let mut rng = seeded(22, 0);
        let map = BogoliubovMap::random(4, &mut rng);
        let o = map.majorana_orthogonal();
        assert!((&o * o.transpose() - DMatrix::<f64>::identity(8, 8)).norm() < 1e-10);
        let back = BogoliubovMap::from_majorana_orthogonal(&o).unwrap();
        assert!(frobenius(&(back.w_matrix() - map.w_matrix())) < 1e-10);
    }

    #[test]
    fn quadratic_expectation_examples() {
        let n = 4;
        let number = QuadraticOperator::one_body(CMatrix::identity(n, n)).unwrap();
        let vac = FockState::vacuum(n).unwrap();
        assert!((quadratic_expectation(&vac, &number).unwrap() + 2.0).abs() < 1e-14);
        let mut o = CMatrix::zeros(n, n);
        o[(0, 0)] = c(1.0);
        let op = QuadraticOperator::one_body(o).unwrap();
        let s = vac.create(0).unwrap();
        assert!((quadratic_expectation(&s, &op).unwrap() - 0.5).abs() < 1e-14);
        let mut rng = seeded(23, 0);
        for parity in [Parity::Even, Parity::Odd] {
            let psi = random_state(n, parity, &mut rng);
            let op = QuadraticOperator::random(n, &mut rng);
            quadratic_expectation(&psi, &op).unwrap();
        }
    }

    #[test]
    fn exponential_action() {
        let mut rng = seeded(24, 0);
        let psi = random_state(4, Parity::Odd, &mut rng);
        let op = QuadraticOperator::random(4, &mut rng);
        let same = apply_to_state(&psi, &op, 0.0).unwrap();
        assert!((same.inner(&psi) - c(1.0)).norm() < 1e-12);
        let angle = 0.37;
        let out = apply_to_state(&psi, &op, angle).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(out.parity(), Parity::Odd);
        let w = unitary_exp(&op.matrix(), angle);
        let before = qsp_matrix(&psi).unwrap();
        let after = qsp_matrix(&out).unwrap();
        let predicted = &w * before.matrix() * w.adjoint();
        assert!(frobenius(&(after.matrix() - predicted)) < 1e-8);
    }

    #[test]
    fn thouless_trivial_and_density() {
        let id = BogoliubovMap::identity(4);
        let vac = thouless_vacuum(&id).unwrap();
        assert_eq!(vac, FockState::vacuum(4).unwrap());

        let mut rng = seeded(25, 0);
        let mut checked = 0;
        while checked < 10 {
            let map = BogoliubovMap::random(4, &mut rng);
            if map.determinant_u() < 0.1 {
                continue;
            }
            let psi = thouless_vacuum(&map).unwrap();
            let sp = sp_matrix(&psi).unwrap();
            let vv = map.v() * map.v().adjoint();
            assert!(frobenius(&(sp.matrix() - vv)) < 1e-9);
            assert!(entropy_qsp(&psi).unwrap() < 1e-9);
            let sv = map.v().clone().singular_values();
            let expected: f64 = sv.iter().map(|s| crate::binary_entropy(s * s)).sum();
            assert!((entropy_sp(&psi).unwrap() - expected).abs() < 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn thouless_bcs_pair() {
        // Mix modes 3 and 4 (0-based 2, 3): a_3 = u c_3 - v c†_4, a_4 = u c_4 + v c†_3.
        let (u, v) = (0.8, 0.6);
        let mut um = CMatrix::identity(4, 4);
        let mut vm = CMatrix::zeros(4, 4);
        um[(2, 2)] = c(u);
        um[(3, 3)] = c(u);
        vm[(3, 2)] = c(-v);
        vm[(2, 3)] = c(v);
        let map = BogoliubovMap::new(um, vm).unwrap();
        let psi = thouless_vacuum(&map).unwrap();
        let vac = FockState::vacuum(4).unwrap();
        let pair = vac.create(3).unwrap().create(2).unwrap();
        // Direct annihilation check fixes the relative sign.
        let expected = (&(&vac * u) + &(&pair * v)).normalized().unwrap();
        assert!((psi.inner(&expected).norm() - 1.0).abs() < 1e-12);
        assert!(annihilation_residual(&map, &psi) < 1e-12);
    }

    #[test]
    fn singular_u_is_reported() {
        let ph = BogoliubovMap::particle_hole(4, &[0, 1, 2, 3]).unwrap();
        assert!(matches!(thouless_vacuum(&ph), Err(Error::SingularU(_))));
        let vac = quasiparticle_vacuum(&ph).unwrap();
        assert!((vac.inner(&FockState::filled(4).unwrap()).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonalize_examples() {
        let s = FockState::from_creations(4, &[0, 2]).unwrap();
        let d = diagonalize_qsp(&qsp_matrix(&s).unwrap()).unwrap();
        assert!(d.occupations.iter().all(|f| f.abs() < 1e-12));

        let psi = (&FockState::from_creations(4, &[0]).unwrap()
            + &FockState::filled(4).unwrap().annihilate(0).unwrap())
            .normalized()
            .unwrap();
        let d = diagonalize_qsp(&qsp_matrix(&psi).unwrap()).unwrap();
        assert!(d.occupations.iter().all(|f| (f - 0.5).abs() < 1e-12));
        assert!(d.map.determinant_u() > THOULESS_DET_TOL);

        let mut rng = seeded(26, 0);
        for parity in [Parity::Even, Parity::Odd] {
            let psi = random_state(4, parity, &mut rng);
            let q = qsp_matrix(&psi).unwrap();
            let d = diagonalize_qsp(&q).unwrap();
            let spread = d.occupations[0] - d.occupations[3];
            assert!(spread < 1e-9, "four-fold degeneracy spread {spread:e}");
            assert!((entropy_of_occupations(&d.occupations) - q.entropy()).abs() < 1e-10);
            let inside = quasiparticle_amplitudes(&psi, &d.map).unwrap();
            let back = apply_map(&inside, &d.map).unwrap();
            assert!((back.inner(&psi).norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn diagonalize_random_n() {
        let mut rng = seeded(27, 0);
        for n in 2..=5 {
            let psi = random_state(n, Parity::Even, &mut rng);
            let q = qsp_matrix(&psi).unwrap();
            let d = diagonalize_qsp(&q).unwrap();
            assert!((entropy_of_occupations(&d.occupations) - q.entropy()).abs() < 1e-10);
        }
    }

    #[test]
    fn apply_map_transforms_density_and_composes() {
        let mut rng = seeded(28, 0);
        let psi = random_state(4, Parity::Even, &mut rng);
        let m1 = BogoliubovMap::random(4, &mut rng);
        let m2 = BogoliubovMap::random(4, &mut rng);
        let once = apply_map(&psi, &m1).unwrap();
        assert!((once.norm_sqr() - 1.0).abs() < 1e-10);
        let w1 = m1.w_matrix();
        let predicted = &w1 * qsp_matrix(&psi).unwrap().matrix() * w1.adjoint();
        assert!(frobenius(&(qsp_matrix(&once).unwrap().matrix() - predicted)) < 1e-8);

        let twice = apply_map(&once, &m2).unwrap();
        let composed = apply_map(&psi, &BogoliubovMap::compose(&m2, &m1).unwrap()).unwrap();
        let a = qsp_matrix(&twice).unwrap();
        let b = qsp_matrix(&composed).unwrap();
        assert!(frobenius(&(a.matrix() - b.matrix())) < 1e-8);
    }

    #[test]
    fn particle_hole_examples() {
        let mut rng = seeded(29, 0);
        let psi = random_state(4, Parity::Odd, &mut rng);
        assert_eq!(particle_hole(&psi, &[]).unwrap(), psi);
        let flipped = particle_hole(&psi, &[0, 2]).unwrap();
        assert_eq!(flipped.parity(), Parity::Odd);
        let before = qsp_matrix(&psi).unwrap().eigenvalues();
        let after = qsp_matrix(&flipped).unwrap().eigenvalues();
        assert!(crate::linalg::max_sorted_difference(&before, &after) < 1e-10);
        // Odd form -> even form: c†_1|0> -> |0>, c†_j|0> -> c†_j c†_1|0>.
        let vac = FockState::vacuum(4).unwrap();
        assert_eq!(particle_hole(&vac.create(0).unwrap(), &[0]).unwrap(), vac);
        assert_eq!(particle_hole(&vac.create(2).unwrap(), &[0]).unwrap(), vac.create(0).unwrap().create(2).unwrap());
        let full = FockState::filled(4).unwrap();
        assert_eq!(particle_hole(&full, &[0]).unwrap(), &full.annihilate(0).unwrap() * -1.0);
    }
}
