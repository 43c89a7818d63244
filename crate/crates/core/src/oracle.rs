//! Brute-force verifiers: direct minimization over single-particle bases,
//! quasiparticle bases and pure-state decompositions.
//!
//! Every search draws sample `i` from its own generator `(seed, i)`, refines
//! each running record (a sample whose raw value beats all earlier samples)
//! by cyclic line searches over Givens angles, and returns the best refined
//! record. Enlarging the budget therefore never raises the returned minimum,
//! and the result does not depend on the number of workers.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use crate::bogoliubov::{majorana_basis, BogoliubovMap};
use crate::densities::{qsp_matrix, sp_matrix};
use crate::error::{Error, Result};
use crate::fock::{parity_matrix, word_matrix, FockState, Ladder, MixedState};
use crate::linalg::HermitianEigen;
use crate::par::{map_indices, map_slice, Execution};
use crate::quartet::{components_for_rank, entropy_from_concurrence, MODES};
use crate::random::{haar_unitary, seeded, Rng};
use crate::{binary_entropy, CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    pub samples: usize,
    /// Maximum number of refinement sweeps per record.
    pub refine_steps: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { samples: 5000, refine_steps: 300, seed: 0, tolerance: 1e-3 }
    }
}

impl SearchBudget {
    pub fn new(samples: usize, refine_steps: usize, seed: u64) -> Self {
        SearchBudget { samples, refine_steps, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Budget("samples must be positive".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Budget(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// Best point found by a search.
#[derive(Clone, Debug)]
pub struct SearchResult<T> {
    pub value: f64,
    pub best: T,
    /// Number of running records (new minima in sampling order).
    pub records: usize,
}

/// A point of a search space with its tracked objective value.
trait Candidate: Clone + Send + Sync {
    fn value(&self) -> f64;
    /// One cyclic sweep; returns the improvement.
    fn sweep(&mut self) -> f64;
    /// Called once before refinement starts.
    fn prepare(&mut self) {}
}

const SWEEP_STOP: f64 = 1e-14;
/// Best samples refined in addition to the running records.
const REFINE_POOL: usize = 8;

fn refine<C: Candidate>(start: C, steps: usize) -> C {
    let mut c = start.clone();
    c.prepare();
    for _ in 0..steps {
        if c.sweep() < SWEEP_STOP {
            break;
        }
    }
    if c.value() <= start.value() {
        c
    } else {
        start
    }
}

fn run_search<C, F>(budget: &SearchBudget, exec: Execution, sample: F) -> Result<SearchResult<C>>
where
    C: Candidate,
    F: Fn(&mut Rng) -> C + Sync + Send,
{
    budget.validate()?;
    let candidates = map_indices(exec, budget.samples, |i| sample(&mut seeded(budget.seed, i as u64)));
    let mut best = f64::INFINITY;
    let mut records = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        if c.value() < best {
            best = c.value();
            records.push((i, c.clone()));
        }
    }
    let count = records.len();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| candidates[a].value().total_cmp(&candidates[b].value()));
    for &i in order.iter().take(REFINE_POOL) {
        if records.iter().all(|(j, _)| *j != i) {
            records.push((i, candidates[i].clone()));
        }
    }
    let refined = map_slice(exec, &records, |(_, c)| refine(c.clone(), budget.refine_steps));
    let (value, winner) = refined
        .into_iter()
        .map(|c| (c.value(), c))
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one sample");
    Ok(SearchResult { value, best: winner, records: count })
}

/// Minimize a `pi`-periodic function of one angle, starting from `f(0) = f0`.
/// Returns the angle and value when strictly better than `f0`.
fn line_min<F: FnMut(f64) -> f64>(mut f: F, f0: f64) -> Option<(f64, f64)> {
    const GRID: usize = 12;
    let step = PI / GRID as f64;
    let (mut bt, mut bf) = (0.0, f0);
    for k in 0..GRID {
        let t = -FRAC_PI_2 + k as f64 * step;
        if t == 0.0 {
            continue;
        }
        let v = f(t);
        if v < bf {
            bt = t;
            bf = v;
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (bt - step, bt + step);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..40 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v < bf {
            bt = t;
            bf = v;
        }
    }
    (bf < f0).then_some((bt, bf))
}

/// `2 x 2` unitary on a plane, `[[c, -s e^{-i phi}], [s e^{i phi}, c]]` with
/// `phi = kind * pi / kinds`. Kind 0 is the real rotation.
fn plane_unitary(kind: usize, kinds: usize, t: f64) -> [[C64; 2]; 2] {
    let (s, c) = t.sin_cos();
    let phase = C64::from_polar(1.0, kind as f64 * PI / kinds as f64);
    [[C64::new(c, 0.0), -phase.conj() * s], [phase * s, C64::new(c, 0.0)]]
}

// ---------------------------------------------------------------------------
// Single-particle bases.

#[derive(Clone)]
struct SpCandidate {
    /// `U† rho U`.
    rho: CMatrix,
    u: CMatrix,
    value: f64,
}

impl SpCandidate {
    fn new(rho: &CMatrix, u: CMatrix) -> Self {
        let r = u.adjoint() * rho * &u;
        let value = (0..r.nrows()).map(|j| binary_entropy(r[(j, j)].re)).sum();
        SpCandidate { rho: r, u, value }
    }

    /// Diagonal entries `j, k` after `U -> U G` with `G` acting on columns `j, k`.
    fn rotated_pair(&self, j: usize, k: usize, g: &[[C64; 2]; 2]) -> (f64, f64) {
        let idx = [j, k];
        let mut out = [0.0; 2];
        for (col, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += g[a][col].conj() * self.rho[(idx[a], idx[b])] * g[b][col];
                }
            }
            *o = acc.re;
        }
        (out[0], out[1])
    }

    fn apply(&mut self, j: usize, k: usize, g: &[[C64; 2]; 2]) {
        let n = self.u.nrows();
        let mut gm = CMatrix::identity(n, n);
        gm[(j, j)] = g[0][0];
        gm[(j, k)] = g[0][1];
        gm[(k, j)] = g[1][0];
        gm[(k, k)] = g[1][1];
        self.rho = gm.adjoint() * &self.rho * &gm;
        self.u = &self.u * gm;
    }
}

impl Candidate for SpCandidate {
    fn value(&self) -> f64 {
        self.value
    }

    fn sweep(&mut self) -> f64 {
        let start = self.value;
        let n = self.u.nrows();
        for j in 0..n {
            for k in j + 1..n {
                for kind in 0..2 {
                    let base = self.value - binary_entropy(self.rho[(j, j)].re) - binary_entropy(self.rho[(k, k)].re);
                    let found = line_min(
                        |t| {
                            let (a, b) = self.rotated_pair(j, k, &plane_unitary(kind, 2, t));
                            base + binary_entropy(a) + binary_entropy(b)
                        },
                        self.value,
                    );
                    if let Some((t, v)) = found {
                        self.apply(j, k, &plane_unitary(kind, 2, t));
                        self.value = v;
                    }
                }
            }
        }
        start - self.value
    }
}

/// Minimum of the basis entropy `S_c` over single-particle bases; the best
/// unitary `U` defines modes `a = U† c`.
pub fn min_entropy_over_sp_bases(
    state: &FockState,
    budget: &SearchBudget,
    exec: Execution,
) -> Result<SearchResult<CMatrix>> {
    let rho = sp_matrix(state)?.matrix().clone();
    let n = state.n();
    let res = run_search(budget, exec, |rng| SpCandidate::new(&rho, haar_unitary(n, rng)))?;
    Ok(SearchResult { value: res.value, best: res.best.u, records: res.records })
}

// ---------------------------------------------------------------------------
// Quasiparticle bases, in the Majorana picture.

/// Real antisymmetric Majorana form `2i Omega†(rho_qsp - 1/2) Omega` of a
/// state; quasiparticle occupations are `(1 - G[nu][n + nu]) / 2`.
fn majorana_covariance(state: &FockState) -> Result<DMatrix<f64>> {
    let q = qsp_matrix(state)?;
    let n = q.n();
    let om = majorana_basis(n);
    let shifted = q.matrix() - CMatrix::identity(2 * n, 2 * n).scale(0.5);
    let g = ((om.adjoint() * shifted * om) * C64::new(0.0, 2.0)).map(|z| z.re);
    Ok((&g - g.transpose()) * 0.5)
}

#[derive(Clone)]
struct QspCandidate {
    /// `O^T Gamma O`.
    gamma: DMatrix<f64>,
    o: DMatrix<f64>,
    value: f64,
}

impl QspCandidate {
    fn n(&self) -> usize {
        self.o.nrows() / 2
    }

    fn new(gamma: &DMatrix<f64>, o: DMatrix<f64>) -> Self {
        let g = o.transpose() * gamma * &o;
        let n = o.nrows() / 2;
        let value = (0..n).map(|nu| binary_entropy((1.0 - g[(nu, n + nu)]) / 2.0)).sum();
        QspCandidate { gamma: g, o, value }
    }

    fn column(&self, x: usize, p: usize, q: usize, c: f64, s: f64) -> [(usize, f64); 2] {
        if x == p {
            [(p, c), (q, s)]
        } else if x == q {
            [(p, -s), (q, c)]
        } else {
            [(x, 1.0), (x, 0.0)]
        }
    }

    fn rotated_entry(&self, a: usize, b: usize, p: usize, q: usize, c: f64, s: f64) -> f64 {
        let mut acc = 0.0;
        for (i, gi) in self.column(a, p, q, c, s) {
            for (j, gj) in self.column(b, p, q, c, s) {
                acc += gi * gj * self.gamma[(i, j)];
            }
        }
        acc
    }

    fn affected(&self, p: usize, q: usize) -> Vec<usize> {
        let n = self.n();
        let mut modes = vec![p % n];
        if q % n != p % n {
            modes.push(q % n);
        }
        modes
    }

    fn apply(&mut self, p: usize, q: usize, t: f64) {
        let m = self.o.nrows();
        let (s, c) = t.sin_cos();
        let mut g = DMatrix::<f64>::identity(m, m);
        g[(p, p)] = c;
        g[(q, p)] = s;
        g[(p, q)] = -s;
        g[(q, q)] = c;
        self.gamma = g.transpose() * &self.gamma * &g;
        self.o = &self.o * g;
    }
}

impl Candidate for QspCandidate {
    fn value(&self) -> f64 {
        self.value
    }

    fn sweep(&mut self) -> f64 {
        let start = self.value;
        let n = self.n();
        for p in 0..2 * n {
            for q in p + 1..2 * n {
                let modes = self.affected(p, q);
                let old: f64 = modes.iter().map(|&nu| binary_entropy((1.0 - self.gamma[(nu, n + nu)]) / 2.0)).sum();
                let base = self.value - old;
                let found = line_min(
                    |t| {
                        let (s, c) = t.sin_cos();
                        base + modes
                            .iter()
                            .map(|&nu| binary_entropy((1.0 - self.rotated_entry(nu, n + nu, p, q, c, s)) / 2.0))
                            .sum::<f64>()
                    },
                    self.value,
                );
                if let Some((t, v)) = found {
                    self.apply(p, q, t);
                    self.value = v;
                }
            }
        }
        start - self.value
    }
}

/// Minimum of `S_c` over quasiparticle bases, starting from random maps
/// `exp(-i O)`.
pub fn min_entropy_over_qsp_bases(
    state: &FockState,
    budget: &SearchBudget,
    exec: Execution,
) -> Result<SearchResult<BogoliubovMap>> {
    let gamma = majorana_covariance(state)?;
    let n = state.n();
    let res =
        run_search(budget, exec, |rng| QspCandidate::new(&gamma, BogoliubovMap::random(n, rng).majorana_orthogonal()))?;
    let best = BogoliubovMap::from_majorana_orthogonal(&res.best.o)?;
    Ok(SearchResult { value: res.value, best, records: res.records })
}

// ---------------------------------------------------------------------------
// Pure-state decompositions of four-mode mixed states.

fn levi_civita(p: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Fock-space matrix of the four-mode dualization operator, assembled from
/// ladder-operator words (odd-sector form on odd states, even-sector form on
/// even states).
pub fn dualization_operator() -> CMatrix {
    use Ladder::{Annihilate as A, Create as Cr};
    let n = MODES;
    let dim = 1 << n;
    let mut odd = CMatrix::zeros(dim, dim);
    let mut even = CMatrix::zeros(dim, dim);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let e = levi_civita([i, j, k, l]);
                    if e == 0.0 {
                        continue;
                    }
                    odd -= (word_matrix(n, &[(Cr, i), (Cr, j), (Cr, k), (A, l)])
                        + word_matrix(n, &[(Cr, i), (A, j), (A, k), (A, l)]))
                        * C64::new(e / 6.0, 0.0);
                    even -= word_matrix(n, &[(Cr, i), (Cr, j), (A, k), (A, l)]) * C64::new(e / 4.0, 0.0);
                }
            }
        }
    }
    even -= word_matrix(n, &[(Cr, 0), (Cr, 1), (Cr, 2), (Cr, 3)]);
    // Adjoint of the full-creation term, so that T|full> = -|0>.
    even -= word_matrix(n, &[(A, 3), (A, 2), (A, 1), (A, 0)]);
    let p = parity_matrix(n);
    let id = CMatrix::identity(dim, dim);
    let p_even = (&id + &p) * C64::new(0.5, 0.0);
    let p_odd = (&id - &p) * C64::new(0.5, 0.0);
    odd * p_odd + even * p_even
}

const ROOF_PLANE_KINDS: usize = 4;
/// Initial and final smoothing widths of `sqrt(|tau_ii|^2 + eps^2)`.
const ROOF_EPS_START: f64 = 1e-2;
const ROOF_EPS_END: f64 = 1e-9;

#[derive(Clone)]
struct RoofCandidate {
    /// `r' x r` isometry.
    s: CMatrix,
    /// `tau = Z^T T Z` for the components `z_i = sum_k S_ik x_k`.
    tau: CMatrix,
    /// Smoothing width; zero once the continuation has finished.
    eps: f64,
    /// Smoothed objective at the current `eps`.
    objective: f64,
}

impl RoofCandidate {
    fn new(base: &CMatrix, s: CMatrix) -> Self {
        let tau = &s * base * s.transpose();
        let mut c = RoofCandidate { s, tau, eps: 0.0, objective: 0.0 };
        c.objective = c.smoothed_total();
        c
    }

    fn magnitude(&self, z: C64) -> f64 {
        if self.eps == 0.0 {
            z.norm()
        } else {
            (z.norm_sqr() + self.eps * self.eps).sqrt()
        }
    }

    fn smoothed_total(&self) -> f64 {
        (0..self.tau.nrows()).map(|i| self.magnitude(self.tau[(i, i)])).sum()
    }

    fn rotated_diag(&self, i: usize, j: usize, g: &[[C64; 2]; 2]) -> (C64, C64) {
        let idx = [i, j];
        let mut out = [C64::new(0.0, 0.0); 2];
        for (row, o) in out.iter_mut().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    *o += g[row][a] * g[row][b] * self.tau[(idx[a], idx[b])];
                }
            }
        }
        (out[0], out[1])
    }

    fn apply(&mut self, i: usize, j: usize, g: &[[C64; 2]; 2]) {
        let m = self.s.nrows();
        let mut gm = CMatrix::identity(m, m);
        gm[(i, i)] = g[0][0];
        gm[(i, j)] = g[0][1];
        gm[(j, i)] = g[1][0];
        gm[(j, j)] = g[1][1];
        self.tau = &gm * &self.tau * gm.transpose();
        self.s = gm * &self.s;
    }

    fn plane_sweep(&mut self) -> f64 {
        let start = self.objective;
        let m = self.s.nrows();
        for i in 0..m {
            for j in i + 1..m {
                for kind in 0..ROOF_PLANE_KINDS {
                    let rest = self.objective - self.magnitude(self.tau[(i, i)]) - self.magnitude(self.tau[(j, j)]);
                    let found = line_min(
                        |t| {
                            let (a, b) = self.rotated_diag(i, j, &plane_unitary(kind, ROOF_PLANE_KINDS, t));
                            rest + self.magnitude(a) + self.magnitude(b)
                        },
                        self.objective,
                    );
                    if let Some((t, v)) = found {
                        self.apply(i, j, &plane_unitary(kind, ROOF_PLANE_KINDS, t));
                        self.objective = v;
                    }
                }
            }
        }
        start - self.objective
    }
}

impl Candidate for RoofCandidate {
    fn value(&self) -> f64 {
        (0..self.tau.nrows()).map(|i| self.tau[(i, i)].norm()).sum()
    }

    /// Sweeps on the smoothed objective, narrowing `eps` tenfold each time a
    /// sweep stalls, and finishing on the exact objective.
    fn sweep(&mut self) -> f64 {
        let gain = self.plane_sweep();
        if gain < SWEEP_STOP && self.eps > 0.0 {
            self.eps = if self.eps * 0.1 < ROOF_EPS_END { 0.0 } else { self.eps * 0.1 };
            self.objective = self.smoothed_total();
            return f64::INFINITY;
        }
        gain
    }

    fn prepare(&mut self) {
        self.eps = ROOF_EPS_START;
        self.objective = self.smoothed_total();
    }
}

/// Best decomposition found by [`convex_roof_search`].
#[derive(Clone, Debug)]
pub struct RoofSearch {
    /// Minimal average concurrence found.
    pub value: f64,
    /// Average convex-roof entropy `sum_j p_j 4h(f+(C_j))` of that decomposition.
    pub entropy: f64,
    pub components: Vec<(f64, FockState)>,
    pub records: usize,
}

/// Minimize the average pure-state concurrence over decompositions
/// `z_i = sum_k S_ik sqrt(lambda_k) psi_k` with random isometries `S`.
pub fn convex_roof_search(rho: &MixedState, budget: &SearchBudget, exec: Execution) -> Result<RoofSearch> {
    if rho.n() != MODES {
        return Err(Error::NotFourLevels(rho.n()));
    }
    rho.ensure_parity_commuting()?;
    let eig = HermitianEigen::new(rho.matrix());
    let cols: Vec<DVector<C64>> = (0..rho.dim())
        .rev()
        .filter(|&k| eig.values[k] > 1e-10)
        .map(|k| eig.vectors.column(k).into_owned() * C64::new(eig.values[k].sqrt(), 0.0))
        .collect();
    let x = CMatrix::from_columns(&cols);
    let r = x.ncols();
    let rp = components_for_rank(r).max(r);
    let base = x.transpose() * dualization_operator() * &x;
    let res = run_search(budget, exec, |rng| {
        let u = haar_unitary(rp, rng);
        RoofCandidate::new(&base, u.columns(0, r).into_owned())
    })?;
    let z = &x * res.best.s.transpose();
    let mut components = Vec::new();
    let mut entropy = 0.0;
    for (i, col) in z.column_iter().enumerate() {
        let p = col.norm_squared();
        if p <= 1e-14 {
            continue;
        }
        let c = (res.best.tau[(i, i)].norm() / p).min(1.0);
        entropy += p * entropy_from_concurrence(c);
        components.push((p, FockState::from_vector(MODES, &col.into_owned().unscale(p.sqrt()))?));
    }
    Ok(RoofSearch { value: res.value, entropy, components, records: res.records })
}

/// `<psi| word |psi>` through the dense matrix of the word.
pub fn expectation_oracle(state: &FockState, word: &[(Ladder, usize)]) -> Result<C64> {
    for &(_, mode) in word {
        if mode >= state.n() {
            return Err(Error::ModeOutOfRange { mode, n: state.n() });
        }
    }
    let v = state.to_vector();
    Ok((v.adjoint() * word_matrix(state.n(), word) * &v)[(0, 0)])
}
