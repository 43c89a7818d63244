//! Mixed four-mode states: concurrence, optimal decompositions and the
//! convex-roof quasiparticle entropy.

use nalgebra::{DMatrix, DVector};

use super::{basis_matrix, dual_form, dual_matrix, entropy_from_concurrence, QuartetState, MODES};
use crate::error::{Error, Result};
use crate::fock::{parity_matrix, FockState, MixedState, Parity, DENSITY_TOL};
use crate::linalg::{max_sorted_difference, takagi, HermitianEigen};
use crate::{CMatrix, C64};

/// Eigenvalues of `rho` below this are treated as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Required agreement between the two routes to the values `d_k`.
pub const ROUTE_TOL: f64 = 1e-8;

/// Parity sector of `rho` and its `8 x 8` matrix in the special basis.
pub fn sector_matrix(rho: &MixedState) -> Result<(Parity, CMatrix)> {
    if rho.n() != MODES {
        return Err(Error::NotFourLevels(rho.n()));
    }
    rho.ensure_parity_commuting()?;
    let parity = rho.sector();
    if parity == Parity::Mixed {
        return Err(Error::BothSectors);
    }
    let e = basis_matrix(parity)?;
    Ok((parity, e.adjoint() * rho.matrix() * &e))
}

/// Embed an `8 x 8` density matrix given in the special basis.
pub fn sector_state(parity: Parity, m: &CMatrix) -> Result<MixedState> {
    if m.shape() != (8, 8) {
        return Err(Error::Dimension { expected: 8, got: m.nrows() });
    }
    let e = basis_matrix(parity)?;
    MixedState::new(MODES, &e * m * e.adjoint())
}

/// `p |psi><psi| + (1 - p) I/8` inside the sector of `psi`.
pub fn werner_mixture(psi: &FockState, p: f64) -> Result<MixedState> {
    let q = QuartetState::from_fock(psi)?;
    let v = q.coordinates();
    let m = (&v * v.adjoint()) * C64::new(p, 0.0) + CMatrix::identity(8, 8) * C64::new((1.0 - p) / 8.0, 0.0);
    sector_state(q.parity(), &m)
}

/// `p |psi><psi| + (1 - p) I/6` over the six two-fermion states.
pub fn two_fermion_mixture(psi: &FockState, p: f64) -> Result<MixedState> {
    if psi.n() != MODES {
        return Err(Error::NotFourLevels(psi.n()));
    }
    let v = psi.to_vector();
    if (0..16).any(|m: usize| m.count_ones() != 2 && v[m].norm() > 0.0) {
        return Err(Error::Invariant("state has components outside the two-fermion space".into()));
    }
    let mut m = (&v * v.adjoint()) * C64::new(p, 0.0);
    for mask in (0..16usize).filter(|m| m.count_ones() == 2) {
        m[(mask, mask)] += C64::new((1.0 - p) / 6.0, 0.0);
    }
    MixedState::new(MODES, m)
}

/// Subnormalized eigenstates `sqrt(lambda_k) psi_k` of a sector matrix (as
/// columns of special-basis coordinates), keeping `lambda_k > RANK_TOL`.
fn weighted_eigenstates(m: &CMatrix) -> CMatrix {
    let eig = HermitianEigen::new(m);
    let cols: Vec<DVector<C64>> = (0..m.nrows())
        .rev()
        .filter(|&k| eig.values[k] > RANK_TOL)
        .map(|k| eig.vectors.column(k).into_owned() * C64::new(eig.values[k].sqrt(), 0.0))
        .collect();
    if cols.is_empty() {
        return CMatrix::zeros(m.nrows(), 0);
    }
    CMatrix::from_columns(&cols)
}

/// Symmetric matrix `C_kl = x_k^T T x_l` of a set of subnormalized states.
fn preconcurrence(x: &CMatrix) -> CMatrix {
    let r = x.ncols();
    CMatrix::from_fn(r, r, |k, l| dual_form(&x.column(k).into_owned(), &x.column(l).into_owned()))
}

/// `R`-route values: singular values of `rho^{1/2} T conj(rho^{1/2})`.
fn values_from_r(m: &CMatrix) -> Vec<f64> {
    let eig = HermitianEigen::new(m);
    let root = eig.apply(|x| C64::new(if x > RANK_TOL { x.sqrt() } else { 0.0 }, 0.0));
    let b = &root * dual_matrix() * root.conjugate();
    let mut d: Vec<f64> = b.singular_values().iter().copied().collect();
    d.sort_by(|a, b| b.total_cmp(a));
    d
}

#[derive(Clone, Debug)]
pub struct ConcurrenceReport {
    pub parity: Parity,
    /// Descending, one per nonzero eigenvalue of `rho`.
    pub d: Vec<f64>,
    /// `max(d_1 - sum_{k>=2} d_k, 0)`.
    pub concurrence: f64,
    /// `d_1 - sum_{k>=2} d_k` before clipping.
    pub raw: f64,
    pub separable: bool,
    pub decomposition: Option<Decomposition>,
}

impl ConcurrenceReport {
    pub fn rank(&self) -> usize {
        self.d.len()
    }
}

/// The values `d_k` by both routes, each padded to eight entries and sorted
/// descending: Takagi values of `C_kl = sqrt(lambda_k lambda_l) <dual(k)|l>`
/// and eigenvalues of `R = sqrt(rho^{1/2} T rho* T rho^{1/2})`.
pub fn d_values_both_routes(rho: &MixedState) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, m) = sector_matrix(rho)?;
    let mut d = takagi_values(&m)?;
    d.resize(8, 0.0);
    Ok((d, values_from_r(&m)))
}

fn takagi_values(m: &CMatrix) -> Result<Vec<f64>> {
    let x = weighted_eigenstates(m);
    let c = preconcurrence(&x);
    let asym = (&c - c.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asym > 1e-10 {
        return Err(Error::Invariant(format!("preconcurrence matrix not symmetric ({asym:e})")));
    }
    Ok(takagi(&c, 0.0).values)
}

/// Concurrence of a single-sector four-mode mixed state.
///
/// Both routes of [`d_values_both_routes`] are evaluated and must agree to
/// 1e-8.
pub fn mixed_concurrence(rho: &MixedState) -> Result<ConcurrenceReport> {
    let (parity, m) = sector_matrix(rho)?;
    let d = takagi_values(&m)?;
    let mut padded = d.clone();
    padded.resize(8, 0.0);
    let gap = max_sorted_difference(&padded, &values_from_r(&m));
    if gap > ROUTE_TOL {
        return Err(Error::Invariant(format!("d_k routes disagree by {gap:e}")));
    }
    Ok(report_from_values(parity, d))
}

fn report_from_values(parity: Parity, d: Vec<f64>) -> ConcurrenceReport {
    let raw = match d.split_first() {
        Some((first, rest)) => first - rest.iter().sum::<f64>(),
        None => 0.0,
    };
    ConcurrenceReport { parity, d, concurrence: raw.max(0.0), raw, separable: raw <= 1e-12, decomposition: None }
}

/// `4 h((1 + sqrt(1 - C^2)) / 2)` of the mixed-state concurrence.
pub fn formation_entanglement(rho: &MixedState) -> Result<f64> {
    Ok(entropy_from_concurrence(mixed_concurrence(rho)?.concurrence))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionRoute {
    /// Rank one: the state itself.
    Pure,
    /// Equal-modulus mixing with polygon-closing phases; every component has
    /// zero concurrence.
    Separable,
    /// Equal-modulus mixing with phases `pi/2`.
    Hadamard,
    /// Real rotation of the Takagi states zeroing the diagonal of
    /// `diag(d_1, -d_2, ...) - C G`.
    Rotation,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub route: DecompositionRoute,
    pub components: Vec<(f64, QuartetState)>,
}

impl Decomposition {
    /// `sum_j p_j |phi_j><phi_j|` in the full Fock space.
    pub fn reconstruct(&self) -> Result<CMatrix> {
        let mut m = CMatrix::zeros(16, 16);
        for (p, q) in &self.components {
            let v = q.to_fock()?.to_vector();
            m += (&v * v.adjoint()) * C64::new(*p, 0.0);
        }
        Ok(m)
    }

    /// `sum_j p_j C(phi_j)`.
    pub fn average_concurrence(&self) -> f64 {
        self.components.iter().map(|(p, q)| p * super::pure_concurrence(q)).sum()
    }
}

/// Phases `phi_k` with `sum_k l_k e^{i phi_k} = target` for real
/// `target >= 0`, by recursive triangle closure. `None` if the polygon
/// cannot close.
pub fn closing_phases(lengths: &[f64], target: f64) -> Option<Vec<f64>> {
    let tol = 1e-12 * (1.0 + target + lengths.iter().sum::<f64>());
    let (&l0, rest) = lengths.split_first()?;
    if rest.is_empty() {
        return ((l0 - target).abs() <= tol).then(|| vec![0.0]);
    }
    let hi = rest.iter().sum::<f64>();
    let lmax = rest.iter().copied().fold(0.0, f64::max);
    let lo = (2.0 * lmax - hi).max(0.0);
    // Resultant R of the remaining sides must close a triangle with l0 and target.
    let r = (target - l0).abs().clamp(lo, hi);
    if r > target + l0 + tol || r < (target - l0).abs() - tol {
        return None;
    }
    let phi0 = if l0 <= tol || target <= tol {
        0.0
    } else {
        ((l0 * l0 + target * target - r * r) / (2.0 * l0 * target)).clamp(-1.0, 1.0).acos()
    };
    let z = C64::new(target, 0.0) - C64::from_polar(l0, phi0);
    let psi = if z.norm() > 0.0 { z.arg() } else { 0.0 };
    let mut out = vec![phi0];
    out.extend(closing_phases(rest, r)?.into_iter().map(|p| p + psi));
    Some(out)
}

/// Sign rows `mu_k` for `r' = 2, 4, 8` components.
fn sign_rows(r_prime: usize) -> Vec<Vec<u8>> {
    match r_prime {
        2 => vec![vec![0, 0], vec![0, 1]],
        4 => vec![vec![0, 0, 0, 0], vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![0, 1, 1, 0]],
        _ => vec![
            vec![0, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 1, 1, 1, 1],
            vec![0, 0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 1, 1, 1, 1, 0, 0],
            vec![0, 1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 0, 1, 1, 0, 1, 0],
            vec![0, 1, 1, 0, 0, 1, 1, 0],
            vec![0, 1, 1, 0, 1, 0, 0, 1],
        ],
    }
}

/// Number of components used for rank `r`.
pub fn components_for_rank(r: usize) -> usize {
    match r {
        0..=2 => 2,
        3 | 4 => 4,
        _ => 8,
    }
}

/// `r' x r` mixing matrix `S_ik = e^{i theta_k} (-1)^{mu_k[i]} / sqrt(r')`.
fn equal_modulus_mixing(thetas: &[f64]) -> CMatrix {
    let r = thetas.len();
    let rp = components_for_rank(r);
    let rows = sign_rows(rp);
    let s = 1.0 / (rp as f64).sqrt();
    CMatrix::from_fn(rp, r, |i, k| {
        let sign = if rows[k][i] == 1 { -1.0 } else { 1.0 };
        C64::from_polar(s * sign, thetas[k])
    })
}

/// Normalized components of `z = S w` (columns of `w` are subnormalized
/// states), dropping empty ones.
fn components(parity: Parity, z: &CMatrix) -> Result<Vec<(f64, QuartetState)>> {
    let mut out = Vec::with_capacity(z.ncols());
    for col in z.column_iter() {
        let p = col.norm_squared();
        if p > 1e-14 {
            let v = col.into_owned().unscale(p.sqrt());
            out.push((p, QuartetState::from_coordinates(parity, &v)?));
        }
    }
    Ok(out)
}

/// Decomposition attaining the minimal average concurrence.
///
/// Separable states are split into zero-concurrence components; otherwise
/// every component has concurrence `C(rho)`. The equal-modulus construction
/// with phases `pi/2` is tried first and a real rotation of the Takagi states
/// is used when its components do not share the same concurrence.
pub fn optimal_decomposition(rho: &MixedState) -> Result<Decomposition> {
    let report = mixed_concurrence(rho)?;
    let (parity, m) = sector_matrix(rho)?;
    let x = weighted_eigenstates(&m);
    let r = x.ncols();
    if r == 1 {
        let comps = components(parity, &x)?;
        return Ok(Decomposition { route: DecompositionRoute::Pure, components: comps });
    }
    let c = preconcurrence(&x);
    let tk = takagi(&c, 0.0);
    // w_j = sum_k conj(V_kj) x_k has w^T T w = diag(d).
    let w = &x * tk.vectors.conjugate();
    let d = &tk.values;

    if report.separable {
        let mut phis = vec![0.0];
        let rest = closing_phases(&d[1..], d[0])
            .ok_or_else(|| Error::Invariant("phases closing the d_k polygon not found".into()))?;
        phis.extend(rest.into_iter().map(|p| p + std::f64::consts::PI));
        let thetas: Vec<f64> = phis.iter().map(|p| p / 2.0).collect();
        let s = equal_modulus_mixing(&thetas);
        let comps = components(parity, &(&w * s.transpose()))?;
        return Ok(Decomposition { route: DecompositionRoute::Separable, components: comps });
    }

    let mut thetas = vec![std::f64::consts::FRAC_PI_2; r];
    thetas[0] = 0.0;
    let s = equal_modulus_mixing(&thetas);
    let comps = components(parity, &(&w * s.transpose()))?;
    let spread = comps.iter().map(|(_, q)| (super::pure_concurrence(q) - report.concurrence).abs()).fold(0.0, f64::max);
    if spread <= 1e-9 {
        return Ok(Decomposition { route: DecompositionRoute::Hadamard, components: comps });
    }

    // y_1 = w_1, y_k = i w_k: y^T T y = diag(d_1, -d_2, ...).
    let mut y = w.clone();
    for k in 1..r {
        let col = y.column(k) * C64::new(0.0, 1.0);
        y.set_column(k, &col);
    }
    let gram = y.adjoint() * &y;
    let cc = report.concurrence;
    let mut mm = DMatrix::<f64>::from_fn(r, r, |i, j| {
        let tau = if i != j {
            0.0
        } else if i == 0 {
            d[0]
        } else {
            -d[i]
        };
        tau - cc * gram[(i, j)].re
    });
    let o = zero_diagonal_rotation(&mut mm);
    let oc = o.map(|v| C64::new(v, 0.0));
    let comps = components(parity, &(&y * oc.transpose()))?;
    Ok(Decomposition { route: DecompositionRoute::Rotation, components: comps })
}

/// Orthogonal `O` with `diag(O M O^T) = 0` for a traceless real symmetric
/// `M`, built from Givens rotations; `M` is overwritten with `O M O^T`.
fn zero_diagonal_rotation(m: &mut DMatrix<f64>) -> DMatrix<f64> {
    let r = m.nrows();
    let mut o = DMatrix::<f64>::identity(r, r);
    let scale = m.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-15 * scale;
    for _ in 0..4 * r {
        let pos = (0..r).filter(|&i| m[(i, i)] > tol).max_by(|&a, &b| m[(a, a)].total_cmp(&m[(b, b)]));
        let neg = (0..r).filter(|&i| m[(i, i)] < -tol).min_by(|&a, &b| m[(a, a)].total_cmp(&m[(b, b)]));
        let (Some(i), Some(j)) = (pos, neg) else { break };
        // Solve m_ii + 2 t m_ij + t^2 m_jj = 0 for t = tan(angle).
        let (a, b, cq) = (m[(j, j)], 2.0 * m[(i, j)], m[(i, i)]);
        let disc = (b * b - 4.0 * a * cq).max(0.0).sqrt();
        let t = (-b + disc) / (2.0 * a);
        let cs = 1.0 / (1.0 + t * t).sqrt();
        let sn = t * cs;
        let mut g = DMatrix::<f64>::identity(r, r);
        g[(i, i)] = cs;
        g[(i, j)] = sn;
        g[(j, i)] = -sn;
        g[(j, j)] = cs;
        *m = &g * &*m * g.transpose();
        o = g * o;
    }
    o
}

/// Parity components of a full-space state.
#[derive(Clone, Debug)]
pub struct ParitySplit {
    pub p_even: f64,
    pub even: Option<MixedState>,
    pub p_odd: f64,
    pub odd: Option<MixedState>,
}

/// `rho_± = (1 ± P) rho / (2 p_±)`, `p_± = tr[(1 ± P) rho] / 2`.
pub fn parity_split(rho: &MixedState) -> Result<ParitySplit> {
    rho.ensure_parity_commuting()?;
    let n = rho.n();
    let dim = rho.dim();
    let p = parity_matrix(n);
    let id = CMatrix::identity(dim, dim);
    let part = |sign: f64| -> Result<(f64, Option<MixedState>)> {
        let proj = (&id + &p * C64::new(sign, 0.0)) * C64::new(0.5, 0.0);
        let m = &proj * rho.matrix();
        let w = m.trace().re;
        if w <= DENSITY_TOL {
            return Ok((w.max(0.0), None));
        }
        let m = (&m + m.adjoint()) * C64::new(0.5 / w, 0.0);
        Ok((w, Some(MixedState::new(n, m)?)))
    };
    let (p_even, even) = part(1.0)?;
    let (p_odd, odd) = part(-1.0)?;
    Ok(ParitySplit { p_even, even, p_odd, odd })
}

/// `p_+ E(rho_+) + p_- E(rho_-)` for states mixing both sectors.
pub fn formation_entanglement_split(rho: &MixedState) -> Result<f64> {
    let split = parity_split(rho)?;
    let mut e = 0.0;
    for (p, part) in [(split.p_even, &split.even), (split.p_odd, &split.odd)] {
        if let Some(s) = part {
            e += p * formation_entanglement(s)?;
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartet::{concurrence_of, pure_concurrence};
    use crate::random::{haar_unitary, random_state, seeded};

    fn max_entangled(parity: Parity) -> FockState {
        let vac = FockState::vacuum(4).unwrap();
        let full = FockState::filled(4).unwrap();
        match parity {
            Parity::Odd => (&vac.create(0).unwrap() + &full.annihilate(0).unwrap()).normalized().unwrap(),
            _ => (&FockState::from_creations(4, &[0, 1]).unwrap() + &FockState::from_creations(4, &[2, 3]).unwrap())
                .normalized()
                .unwrap(),
        }
    }

    fn check_decomposition(rho: &MixedState, dec: &Decomposition) {
        let total: f64 = dec.components.iter().map(|(p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-10);
        let diff = (dec.reconstruct().unwrap() - rho.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "reconstruction error {diff:e}");
    }

    #[test]
    fn pure_state_report() {
        let mut rng = seeded(41, 0);
        for parity in [Parity::Odd, Parity::Even] {
            let psi = random_state(4, parity, &mut rng);
            let r = mixed_concurrence(&MixedState::pure(&psi).unwrap()).unwrap();
            assert_eq!(r.rank(), 1);
            assert!((r.concurrence - concurrence_of(&psi).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn werner_closed_form() {
        for parity in [Parity::Odd, Parity::Even] {
            let psi = max_entangled(parity);
            for p in [0.0, 0.2, 3.0 / 7.0, 0.5, 0.9, 1.0] {
                let r = mixed_concurrence(&werner_mixture(&psi, p).unwrap()).unwrap();
                let expected = ((7.0 * p - 3.0) / 4.0).max(0.0);
                assert!((r.concurrence - expected).abs() < 1e-10, "p = {p}");
                assert!((r.raw - (7.0 * p - 3.0) / 4.0).abs() < 1e-10 || r.rank() < 8);
            }
        }
    }

    #[test]
    fn two_fermion_closed_form() {
        let psi = max_entangled(Parity::Even);
        for p in [0.1, 0.4, 0.7, 1.0] {
            let r = mixed_concurrence(&two_fermion_mixture(&psi, p).unwrap()).unwrap();
            assert!((r.concurrence - ((5.0 * p - 2.0) / 3.0).max(0.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn polygon_closure() {
        let cases: [(&[f64], f64); 4] =
            [(&[1.0, 1.0], 0.5), (&[0.3, 0.3, 0.3], 0.9), (&[0.5, 0.2, 0.2], 0.1), (&[0.2; 7], 0.0)];
        for (lengths, target) in cases {
            let phis = closing_phases(lengths, target).unwrap();
            let sum: C64 = lengths.iter().zip(&phis).map(|(l, p)| C64::from_polar(*l, *p)).sum();
            assert!((sum - C64::new(target, 0.0)).norm() < 1e-12);
        }
        assert!(closing_phases(&[1.0, 0.1], 0.5).is_none());
    }

    #[test]
    fn werner_decompositions() {
        let psi = max_entangled(Parity::Odd);
        let rho = werner_mixture(&psi, 3.0 / 7.0).unwrap();
        let dec = optimal_decomposition(&rho).unwrap();
        assert_eq!(dec.route, DecompositionRoute::Separable);
        assert_eq!(dec.components.len(), 8);
        assert!(dec.components.iter().all(|(_, q)| pure_concurrence(q) < 1e-8));
        check_decomposition(&rho, &dec);

        let rho = werner_mixture(&psi, 0.9).unwrap();
        let dec = optimal_decomposition(&rho).unwrap();
        assert_eq!(dec.components.len(), 8);
        assert!(dec.components.iter().all(|(_, q)| (pure_concurrence(q) - 0.825).abs() < 1e-8));
        check_decomposition(&rho, &dec);
    }

    #[test]
    fn random_decompositions() {
        let mut rng = seeded(42, 0);
        let mut routes = Vec::new();
        for rank in 2..=8 {
            for parity in [Parity::Odd, Parity::Even] {
                let weights: Vec<f64> = (0..rank).map(|k| 1.0 / (k as f64 + 1.5)).collect();
                let total: f64 = weights.iter().sum();
                let anchor = max_entangled(parity);
                let mut parts = vec![(weights[0] / total, anchor)];
                for w in &weights[1..] {
                    parts.push((w / total, random_state(4, parity, &mut rng)));
                }
                let rho = MixedState::mixture(4, &parts).unwrap();
                let report = mixed_concurrence(&rho).unwrap();
                let dec = optimal_decomposition(&rho).unwrap();
                check_decomposition(&rho, &dec);
                for (_, q) in &dec.components {
                    let target = if report.separable { 0.0 } else { report.concurrence };
                    assert!((pure_concurrence(q) - target).abs() < 1e-8);
                }
                routes.push(dec.route);
            }
        }
        assert!(routes.contains(&DecompositionRoute::Rotation) || routes.contains(&DecompositionRoute::Hadamard));
    }

    #[test]
    fn random_mixings_bound_the_concurrence() {
        let mut rng = seeded(43, 0);
        let parts: Vec<(f64, FockState)> = (0..3)
            .map(|k| {
                (1.0 / 3.0, if k == 0 { max_entangled(Parity::Odd) } else { random_state(4, Parity::Odd, &mut rng) })
            })
            .collect();
        let rho = MixedState::mixture(4, &parts).unwrap();
        let report = mixed_concurrence(&rho).unwrap();
        let (_, m) = sector_matrix(&rho).unwrap();
        let x = weighted_eigenstates(&m);
        for _ in 0..50 {
            let u = haar_unitary(6, &mut rng);
            let s = u.columns(0, x.ncols()).into_owned();
            let z = &x * s.transpose();
            let avg: f64 = z.column_iter().map(|col| dual_form(&col.into_owned(), &col.into_owned()).norm()).sum();
            assert!(avg >= report.concurrence - 1e-8);
        }
    }

    #[test]
    fn parity_split_examples() {
        let psi = max_entangled(Parity::Even);
        let rho = MixedState::pure(&psi).unwrap();
        let split = parity_split(&rho).unwrap();
        assert!((split.p_even - 1.0).abs() < 1e-14 && split.odd.is_none());

        let a = FockState::vacuum(4).unwrap();
        let b = FockState::from_creations(4, &[0]).unwrap();
        let rho = MixedState::mixture(4, &[(0.5, a.clone()), (0.5, b.clone())]).unwrap();
        let split = parity_split(&rho).unwrap();
        assert!((split.p_even - 0.5).abs() < 1e-14 && (split.p_odd - 0.5).abs() < 1e-14);
        assert!(formation_entanglement_split(&rho).unwrap().abs() < 1e-12);
        assert!(matches!(mixed_concurrence(&rho), Err(Error::BothSectors)));

        let sup = (&a + &b).normalized().unwrap();
        assert!(parity_split(&MixedState::pure(&sup).unwrap()).is_err());
    }

    #[test]
    fn formation_values() {
        let psi = max_entangled(Parity::Odd);
        assert!((formation_entanglement(&MixedState::pure(&psi).unwrap()).unwrap() - 4.0).abs() < 1e-10);
        let e = formation_entanglement(&werner_mixture(&psi, 0.9).unwrap()).unwrap();
        assert!((e - 3.021_814_535_744_310_2).abs() < 1e-9);
        assert!(formation_entanglement(&werner_mixture(&psi, 0.3).unwrap()).unwrap().abs() < 1e-12);
    }
}
